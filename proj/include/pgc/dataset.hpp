#ifndef PGC_DATASET_HPP
#define PGC_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pgc {

/// Dense 0/1 matrix, one sample per row.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<const std::uint8_t> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<std::uint8_t> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::uint8_t operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  /// Appends a row; the first row fixes the column count.
  void push_row(std::span<const std::uint8_t> values);

  BinaryMatrix select_rows(std::span<const std::size_t> idx) const;

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> data_;
};

struct Dataset {
  std::size_t num_vars = 0;
  BinaryMatrix train;
  BinaryMatrix valid;
  BinaryMatrix test;

  const BinaryMatrix& split(const std::string& name) const;
};

/// Comma-separated 0/1 rows. Refuses empty input; ragged rows and tokens
/// other than 0/1 raise ParseError with the 1-based line number.
BinaryMatrix parse_binary_csv(std::istream& in);
BinaryMatrix load_binary_csv(const std::filesystem::path& path);
void write_binary_csv(std::ostream& out, const BinaryMatrix& m);

/// Loads <dir>/<name>.train.data, .valid.data and .test.data.
Dataset load_twenty_datasets(const std::filesystem::path& dir,
                             const std::string& name);
Dataset load_splits(const std::filesystem::path& train,
                    const std::filesystem::path& valid,
                    const std::filesystem::path& test);

/// Whitespace-separated 1-based item indices, one basket per line. Empty
/// lines are empty baskets; repeated indices count once.
BinaryMatrix parse_baskets(std::istream& in, std::size_t num_items);
BinaryMatrix load_baskets(const std::filesystem::path& path,
                          std::size_t num_items);
void write_baskets(std::ostream& out, const BinaryMatrix& m);

/// Below this many variables a registry category is one the benchmark
/// omits; loaders only warn.
inline constexpr std::size_t kMinRegistryVariables = 10;

/// Shuffles rows with the given seed (Fisher-Yates driven by mt19937_64)
/// and cuts 70% / 10% / 20%: floor(0.7 N) train, floor(0.1 N) valid, the
/// rest test. Refuses fewer than 10 rows.
Dataset split_dataset(const BinaryMatrix& rows, std::uint64_t seed);

}  // namespace pgc

#endif  // PGC_DATASET_HPP
