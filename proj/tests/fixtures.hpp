// The running three-variable example in four representations.
#ifndef PGC_TESTS_FIXTURES_HPP
#define PGC_TESTS_FIXTURES_HPP

#include <array>
#include <memory>

#include <Eigen/Dense>

#include "pgc/circuit.hpp"
#include "pgc/kernel.hpp"
#include "pgc/mass_circuit.hpp"

namespace fixture {

// Joint table in truth-table order (X1 most significant).
inline constexpr std::array<double, 8> kJoint{0.02, 0.08, 0.12, 0.48,
                                              0.02, 0.08, 0.04, 0.16};

// (0.1 (z1 + 1)(6 z2 + 1) - 0.4 z1 z2)(0.8 z3 + 0.2)
inline std::shared_ptr<const pgc::NodeCircuit> compact_pgc() {
  pgc::CircuitBuilder b;
  const auto z1 = b.var(0);
  const auto z2 = b.var(1);
  const auto z3 = b.var(2);
  const auto one = b.constant(1.0);
  const auto a = b.sum({{z1, 1.0}, {one, 1.0}});
  const auto c = b.sum({{z2, 6.0}, {one, 1.0}});
  const auto ac = b.product({a, c});
  const auto z12 = b.product({z1, z2});
  const auto left = b.sum({{ac, 0.1}, {z12, -0.4}});
  const auto right = b.sum({{z3, 0.8}, {one, 0.2}});
  b.product({left, right});
  return std::move(b).build(3);
}

// Product of a sum over the four X1 X2 configurations and 0.8 X3 + 0.2 !X3.
inline pgc::MassCircuit mass_circuit() {
  std::vector<pgc::MassNode> n;
  n.emplace_back(pgc::PosLeaf{0});   // 0
  n.emplace_back(pgc::NegLeaf{0});   // 1
  n.emplace_back(pgc::PosLeaf{1});   // 2
  n.emplace_back(pgc::NegLeaf{1});   // 3
  n.emplace_back(pgc::PosLeaf{2});   // 4
  n.emplace_back(pgc::NegLeaf{2});   // 5
  n.emplace_back(pgc::ProductNode{{1, 3}});
  n.emplace_back(pgc::ProductNode{{1, 2}});
  n.emplace_back(pgc::ProductNode{{0, 3}});
  n.emplace_back(pgc::ProductNode{{0, 2}});
  n.emplace_back(pgc::SumNode{{{6, 0.1}, {7, 0.6}, {8, 0.1}, {9, 0.2}}});
  n.emplace_back(pgc::SumNode{{{4, 0.8}, {5, 0.2}}});
  n.emplace_back(pgc::ProductNode{{10, 11}});
  return pgc::MassCircuit(std::move(n), 3);
}

inline pgc::Kernel l_beta() {
  Eigen::MatrixXd l(3, 3);
  l << 1, 2, 0, 2, 6, 0, 0, 0, 4;
  return {l, pgc::KernelKind::kLEnsemble};
}

inline pgc::Kernel k_beta() {
  Eigen::MatrixXd k(3, 3);
  k << 0.3, 0.2, 0, 0.2, 0.8, 0, 0, 0, 0.8;
  return {k, pgc::KernelKind::kMarginal};
}

}  // namespace fixture

#endif  // PGC_TESTS_FIXTURES_HPP
