#include "pgc/learn/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "pgc/errors.hpp"

namespace pgc::learn {

PairStats estimate_pairwise(const BinaryMatrix& data) {
  if (data.empty()) throw RefusalError("estimate_pairwise: no rows");
  const auto n = static_cast<Eigen::Index>(data.cols());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd pair_counts = Eigen::MatrixXd::Zero(n, n);
  std::vector<Eigen::Index> on;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    on.clear();
    const auto row = data.row(r);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (row[static_cast<std::size_t>(i)]) on.push_back(i);
    }
    for (Eigen::Index a : on) {
      counts(a) += 1.0;
      for (Eigen::Index b : on) pair_counts(a, b) += 1.0;
    }
  }
  const double total = static_cast<double>(data.rows());
  return {counts / total, pair_counts / total};
}

double pair_weight(const PairStats& stats, std::size_t i, std::size_t j) {
  const auto a = static_cast<Eigen::Index>(i);
  const auto b = static_cast<Eigen::Index>(j);
  const double pij = stats.joint(a, b);
  const double indep = stats.single(a) * stats.single(b);
  if (pij <= 0.0 || indep <= 0.0) return 0.0;
  return pij * std::log(pij / indep);
}

std::vector<PairWeight> all_pair_weights(const PairStats& stats) {
  const auto n = static_cast<std::size_t>(stats.single.size());
  std::vector<PairWeight> out;
  out.reserve(n * (n - (n > 0 ? 1 : 0)) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out.push_back({i, j, pair_weight(stats, i, j)});
    }
  }
  return out;
}

GroupPartition partition_variables(std::size_t n,
                                   std::span<const PairWeight> weights,
                                   std::size_t max_group) {
  if (max_group == 0) {
    throw ContractViolation("partition_variables: max group size must be >= 1");
  }
  std::vector<PairWeight> positive;
  for (const auto& p : weights) {
    if (p.i >= n || p.j >= n || p.i == p.j) {
      throw ContractViolation("partition_variables: bad pair index");
    }
    if (p.w > 0.0) {
      positive.push_back(p.i < p.j ? p : PairWeight{p.j, p.i, p.w});
    }
  }
  std::sort(positive.begin(), positive.end(),
            [](const PairWeight& a, const PairWeight& b) {
              if (a.w != b.w) return a.w > b.w;
              if (a.i != b.i) return a.i < b.i;
              return a.j < b.j;
            });

  std::vector<std::size_t> parent(n);
  std::vector<std::size_t> size(n, 1);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& p : positive) {
    const std::size_t a = find(p.i);
    const std::size_t b = find(p.j);
    if (a == b || size[a] + size[b] > max_group) continue;
    parent[b] = a;
    size[a] += size[b];
  }

  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t v = 0; v < n; ++v) by_root[find(v)].push_back(v);
  GroupPartition out;
  for (auto& [root, members] : by_root) out.groups.push_back(std::move(members));
  std::sort(out.groups.begin(), out.groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

GroupPartition partition_variables(const PairStats& stats,
                                   std::size_t max_group) {
  const auto weights = all_pair_weights(stats);
  return partition_variables(static_cast<std::size_t>(stats.single.size()),
                             weights, max_group);
}

}  // namespace pgc::learn
