#ifndef PGC_MASS_CIRCUIT_HPP
#define PGC_MASS_CIRCUIT_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "pgc/circuit.hpp"

namespace pgc {

/// Indicator leaf X_i.
struct PosLeaf {
  std::size_t var;
};
/// Indicator leaf for the negation of X_i.
struct NegLeaf {
  std::size_t var;
};

using MassNode = std::variant<SumNode, ProductNode, PosLeaf, NegLeaf>;

/// Probabilistic mass circuit: a DAG over indicator leaves with
/// nonnegative sum weights, root last. Pr(x) is proportional to the value
/// obtained with X_i = x_i and its negation = 1 - x_i.
class MassCircuit {
 public:
  /// Throws ContractViolation on bad syntax or a negative weight.
  MassCircuit(std::vector<MassNode> nodes, std::size_t num_vars);

  std::size_t num_vars() const { return num_vars_; }
  std::span<const MassNode> nodes() const { return nodes_; }
  NodeId root() const { return nodes_.size() - 1; }
  std::size_t size() const;

  /// Sorted variable indices under each node.
  const std::vector<std::vector<std::size_t>>& scopes() const {
    return scopes_;
  }

  /// Evaluates with explicit indicator values for every X_i and its
  /// negation.
  double evaluate(std::span<const double> pos,
                  std::span<const double> neg) const;

 private:
  std::vector<MassNode> nodes_;
  std::size_t num_vars_;
  std::vector<std::vector<std::size_t>> scopes_;
};

struct StructureCheck {
  bool ok = true;
  std::vector<NodeId> offending;
};

StructureCheck check_decomposable(const MassCircuit& pc);
StructureCheck check_smooth(const MassCircuit& pc);

/// Returns an equivalent smooth, decomposable circuit whose root covers all
/// variables. Each sum child missing variable j is multiplied by the gadget
/// (X_j + not X_j); the root is extended the same way. Refuses
/// non-decomposable input.
MassCircuit smooth(const MassCircuit& pc);

/// Marginal probability, normalized by the all-free evaluation. Refuses
/// circuits that are not smooth and decomposable.
double pc_marginal(const MassCircuit& pc, const MarginalQuery& q);

double pc_likelihood(const MassCircuit& pc, std::span<const std::uint8_t> x);

/// Replaces each X_i by z_i and each negated leaf by the constant 1,
/// smoothing first when needed. Unnormalized circuits get their root
/// rescaled so the result is a normalized generating polynomial.
std::shared_ptr<const NodeCircuit> to_pgc(const MassCircuit& pc);

}  // namespace pgc

#endif  // PGC_MASS_CIRCUIT_HPP
