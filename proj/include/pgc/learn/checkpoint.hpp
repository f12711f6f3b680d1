#ifndef PGC_LEARN_CHECKPOINT_HPP
#define PGC_LEARN_CHECKPOINT_HPP

#include <filesystem>
#include <iosfwd>

#include "pgc/learn/model.hpp"

namespace pgc::learn {

inline constexpr int kCheckpointVersion = 1;

// Text checkpoint; reals in shortest round-trip form, variables 1-based.
//
//   pgc-model 1
//   vars <n>
//   groups <m>
//   group <v> ...            (m lines)
//   components <C>
//   logits <l_1> ... <l_C>
//   factor <m rows of m reals, one row per line>   (per component)
//   theta <2^k - 1 reals>                          (per group, per component)
//   end
void write_checkpoint(std::ostream& out, const SimplePgcModel& model);
SimplePgcModel read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const SimplePgcModel& model);
SimplePgcModel load_checkpoint(const std::filesystem::path& path);

}  // namespace pgc::learn

#endif  // PGC_LEARN_CHECKPOINT_HPP
