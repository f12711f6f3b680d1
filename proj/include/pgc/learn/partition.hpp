#ifndef PGC_LEARN_PARTITION_HPP
#define PGC_LEARN_PARTITION_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pgc/compose.hpp"
#include "pgc/dataset.hpp"

namespace pgc::learn {

/// Empirical Pr(X_i = 1) and Pr(X_i = 1, X_j = 1), by counting.
struct PairStats {
  Eigen::VectorXd single;
  Eigen::MatrixXd joint;
};

PairStats estimate_pairwise(const BinaryMatrix& data);

/// p_ij log(p_ij / (p_i p_j)) in nats; zero when p_ij or p_i p_j is zero.
double pair_weight(const PairStats& stats, std::size_t i, std::size_t j);

struct PairWeight {
  std::size_t i;
  std::size_t j;
  double w;
};

/// All pairs i < j with their weights.
std::vector<PairWeight> all_pair_weights(const PairStats& stats);

/// Greedy grouping: every variable starts alone; pairs with positive weight
/// are visited by descending weight (ties by ascending (i, j)) and their
/// groups merge when the merged group has at most max_group members.
/// Groups are returned sorted internally and ordered by smallest member.
GroupPartition partition_variables(std::size_t n,
                                   std::span<const PairWeight> weights,
                                   std::size_t max_group);

GroupPartition partition_variables(const PairStats& stats,
                                   std::size_t max_group);

}  // namespace pgc::learn

#endif  // PGC_LEARN_PARTITION_HPP
