#ifndef PGC_COMPOSE_HPP
#define PGC_COMPOSE_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "pgc/circuit.hpp"
#include "pgc/determinant.hpp"
#include "pgc/kernel.hpp"

namespace pgc {

/// A circuit placed in a global variable space: local variable j of
/// `circuit` is global variable scope[j]. Scopes produced by this module
/// are sorted.
struct ScopedCircuit {
  CircuitPtr circuit;
  std::vector<std::size_t> scope;
};

/// Wraps a circuit whose variables are the globals 0..n-1.
ScopedCircuit scoped(CircuitPtr c);

/// Partition of variables into nonempty, disjoint groups.
struct GroupPartition {
  std::vector<std::vector<std::size_t>> groups;

  std::size_t num_groups() const { return groups.size(); }
  /// Throws ContractViolation unless the groups are nonempty, disjoint and
  /// cover 0..n-1.
  void validate(std::size_t n) const;
};

/// Generating polynomial obtained by substituting, for each formal
/// variable (slot) i of an outer circuit, the polynomial of inner circuit i.
/// Inner circuits read their variables from the composite's own variable
/// space through per-slot index maps.
class SubstitutionCircuit final : public Circuit {
 public:
  SubstitutionCircuit(CircuitPtr outer, std::vector<CircuitPtr> inner,
                      std::vector<std::vector<std::size_t>> var_maps,
                      std::size_t num_vars);

  std::size_t num_vars() const override { return num_vars_; }
  Poly evaluate_ring(std::span<const Poly> leaf_values,
                     std::size_t cap) const override;
  double evaluate_numeric(std::span<const double> z) const override;
  std::size_t size() const override;

 private:
  CircuitPtr outer_;
  std::vector<CircuitPtr> inner_;
  std::vector<std::vector<std::size_t>> var_maps_;
  std::size_t num_vars_;
};

/// alpha f + (1 - alpha) g over the union of the scopes; variables outside
/// a component's scope are zero under that component.
ScopedCircuit mix(const ScopedCircuit& f, const ScopedCircuit& g, double alpha);

/// f g; refuses overlapping scopes.
ScopedCircuit product(const ScopedCircuit& f, const ScopedCircuit& g);

/// Substitutes leaves[i] for slot i of `outer`; refuses overlapping leaf
/// scopes.
ScopedCircuit hier_compose(const CircuitPtr& outer,
                           const std::vector<ScopedCircuit>& leaves);

/// Determinantal PGC: the L-ensemble with L = factor * factor^T over the
/// groups, with group i's variables generated by leaf_gps[i]. Local
/// variable k of leaf i is global variable partition.groups[i][k].
ScopedCircuit det_pgc(const Eigen::MatrixXd& factor,
                      const GroupPartition& partition,
                      const std::vector<CircuitPtr>& leaf_gps,
                      DetBackend backend = DetBackend::kBird);

/// Same, from a PSD kernel; the kernel is validated and factored first.
ScopedCircuit det_pgc(const Kernel& l, const GroupPartition& partition,
                      const std::vector<CircuitPtr>& leaf_gps,
                      DetBackend backend = DetBackend::kBird);

}  // namespace pgc

#endif  // PGC_COMPOSE_HPP
