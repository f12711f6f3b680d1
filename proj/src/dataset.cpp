#include "pgc/dataset.hpp"

#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "pgc/errors.hpp"
#include "pgc/random.hpp"

namespace pgc {

void BinaryMatrix::push_row(std::span<const std::uint8_t> values) {
  if (rows_ == 0 && data_.empty()) cols_ = values.size();
  if (values.size() != cols_) {
    throw ContractViolation("push_row: expected " + std::to_string(cols_) +
                            " columns, got " + std::to_string(values.size()));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

BinaryMatrix BinaryMatrix::select_rows(std::span<const std::size_t> idx) const {
  BinaryMatrix out(0, cols_);
  out.data_.reserve(idx.size() * cols_);
  for (std::size_t r : idx) {
    const auto src = row(r);
    out.data_.insert(out.data_.end(), src.begin(), src.end());
    ++out.rows_;
  }
  return out;
}

const BinaryMatrix& Dataset::split(const std::string& name) const {
  if (name == "train") return train;
  if (name == "valid") return valid;
  if (name == "test") return test;
  throw ContractViolation("unknown split '" + name + "'");
}

BinaryMatrix parse_binary_csv(std::istream& in) {
  BinaryMatrix m;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::uint8_t> row;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    row.clear();
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const auto first = tok.find_first_not_of(" \t");
      const auto last = tok.find_last_not_of(" \t");
      tok = first == std::string::npos ? "" : tok.substr(first, last - first + 1);
      if (tok != "0" && tok != "1") {
        throw ParseError("expected 0 or 1, found '" + tok + "'", line_no);
      }
      row.push_back(tok == "1" ? 1 : 0);
    }
    if (!m.empty() && row.size() != m.cols()) {
      throw ParseError("row has " + std::to_string(row.size()) +
                           " columns, expected " + std::to_string(m.cols()),
                       line_no);
    }
    m.push_row(row);
  }
  if (m.empty()) throw RefusalError("binary csv: no rows");
  return m;
}

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RefusalError("cannot open " + path.string());
  return in;
}

}  // namespace

BinaryMatrix load_binary_csv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  try {
    return parse_binary_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.line());
  }
}

void write_binary_csv(std::ostream& out, const BinaryMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << static_cast<int>(m(r, c));
    }
    out << '\n';
  }
}

Dataset load_splits(const std::filesystem::path& train,
                    const std::filesystem::path& valid,
                    const std::filesystem::path& test) {
  Dataset d;
  d.train = load_binary_csv(train);
  d.valid = load_binary_csv(valid);
  d.test = load_binary_csv(test);
  d.num_vars = d.train.cols();
  if (d.valid.cols() != d.num_vars || d.test.cols() != d.num_vars) {
    throw ParseError("splits disagree on the number of variables", 1);
  }
  return d;
}

Dataset load_twenty_datasets(const std::filesystem::path& dir,
                             const std::string& name) {
  return load_splits(dir / (name + ".train.data"),
                     dir / (name + ".valid.data"),
                     dir / (name + ".test.data"));
}

BinaryMatrix parse_baskets(std::istream& in, std::size_t num_items) {
  if (num_items < kMinRegistryVariables) {
    std::clog << "warning: " << num_items << " items; registry categories "
              << "with fewer than " << kMinRegistryVariables
              << " variables are normally omitted\n";
  }
  BinaryMatrix m(0, num_items);
  std::vector<std::uint8_t> row(num_items);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::fill(row.begin(), row.end(), 0);
    std::stringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      std::size_t pos = 0;
      long long idx = 0;
      try {
        idx = std::stoll(tok, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != tok.size()) {
        throw ParseError("bad item index '" + tok + "'", line_no);
      }
      if (idx < 1 || static_cast<std::size_t>(idx) > num_items) {
        throw ParseError("item index " + tok + " outside 1.." +
                             std::to_string(num_items),
                         line_no);
      }
      row[static_cast<std::size_t>(idx - 1)] = 1;
    }
    m.push_row(row);
  }
  return m;
}

BinaryMatrix load_baskets(const std::filesystem::path& path,
                          std::size_t num_items) {
  auto in = open_or_throw(path);
  try {
    return parse_baskets(in, num_items);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.line());
  }
}

void write_baskets(std::ostream& out, const BinaryMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    bool first = true;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (!m(r, c)) continue;
      out << (first ? "" : " ") << c + 1;
      first = false;
    }
    out << '\n';
  }
}

Dataset split_dataset(const BinaryMatrix& rows, std::uint64_t seed) {
  const std::size_t n = rows.rows();
  if (n < 10) {
    throw RefusalError("split_dataset: need at least 10 rows, got " +
                       std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  const std::size_t n_train = n * 7 / 10;
  const std::size_t n_valid = n / 10;
  const std::span<const std::size_t> all(order);
  Dataset d;
  d.num_vars = rows.cols();
  d.train = rows.select_rows(all.subspan(0, n_train));
  d.valid = rows.select_rows(all.subspan(n_train, n_valid));
  d.test = rows.select_rows(all.subspan(n_train + n_valid));
  return d;
}

}  // namespace pgc
