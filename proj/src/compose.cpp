#include "pgc/compose.hpp"

#include <algorithm>
#include <iterator>

#include "pgc/errors.hpp"

namespace pgc {
namespace {

std::vector<std::size_t> sorted_union(
    const std::vector<const std::vector<std::size_t>*>& scopes) {
  std::vector<std::size_t> all;
  for (const auto* s : scopes) all.insert(all.end(), s->begin(), s->end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

void check_scoped(const ScopedCircuit& s, const char* op) {
  if (!s.circuit) throw ContractViolation(std::string(op) + ": null circuit");
  if (s.circuit->num_vars() != s.scope.size()) {
    throw ContractViolation(std::string(op) +
                            ": scope size does not match circuit variables");
  }
  std::vector<std::size_t> copy = s.scope;
  std::sort(copy.begin(), copy.end());
  if (std::adjacent_find(copy.begin(), copy.end()) != copy.end()) {
    throw ContractViolation(std::string(op) + ": repeated scope variable");
  }
}

bool pairwise_disjoint(const std::vector<const std::vector<std::size_t>*>& s) {
  std::size_t total = 0;
  for (const auto* v : s) total += v->size();
  return sorted_union(s).size() == total;
}

std::vector<std::size_t> positions_in(const std::vector<std::size_t>& scope,
                                      const std::vector<std::size_t>& all) {
  std::vector<std::size_t> map;
  map.reserve(scope.size());
  for (std::size_t g : scope) {
    map.push_back(static_cast<std::size_t>(
        std::lower_bound(all.begin(), all.end(), g) - all.begin()));
  }
  return map;
}

ScopedCircuit substitute(const CircuitPtr& outer,
                         const std::vector<ScopedCircuit>& leaves) {
  std::vector<const std::vector<std::size_t>*> scopes;
  for (const auto& l : leaves) scopes.push_back(&l.scope);
  std::vector<std::size_t> all = sorted_union(scopes);
  std::vector<CircuitPtr> inner;
  std::vector<std::vector<std::size_t>> maps;
  for (const auto& l : leaves) {
    inner.push_back(l.circuit);
    maps.push_back(positions_in(l.scope, all));
  }
  auto c = std::make_shared<SubstitutionCircuit>(outer, std::move(inner),
                                                 std::move(maps), all.size());
  return {std::move(c), std::move(all)};
}

}  // namespace

ScopedCircuit scoped(CircuitPtr c) {
  std::vector<std::size_t> scope(c->num_vars());
  for (std::size_t i = 0; i < scope.size(); ++i) scope[i] = i;
  return {std::move(c), std::move(scope)};
}

void GroupPartition::validate(std::size_t n) const {
  std::vector<bool> seen(n, false);
  std::size_t count = 0;
  for (const auto& g : groups) {
    if (g.empty()) throw ContractViolation("partition: empty group");
    for (std::size_t v : g) {
      if (v >= n) throw ContractViolation("partition: variable out of range");
      if (seen[v]) throw ContractViolation("partition: groups overlap");
      seen[v] = true;
      ++count;
    }
  }
  if (count != n) throw ContractViolation("partition: groups do not cover");
}

SubstitutionCircuit::SubstitutionCircuit(
    CircuitPtr outer, std::vector<CircuitPtr> inner,
    std::vector<std::vector<std::size_t>> var_maps, std::size_t num_vars)
    : outer_(std::move(outer)),
      inner_(std::move(inner)),
      var_maps_(std::move(var_maps)),
      num_vars_(num_vars) {
  if (outer_->num_vars() != inner_.size() || inner_.size() != var_maps_.size()) {
    throw ContractViolation("SubstitutionCircuit: slot count mismatch");
  }
  for (std::size_t i = 0; i < inner_.size(); ++i) {
    if (inner_[i]->num_vars() != var_maps_[i].size()) {
      throw ContractViolation("SubstitutionCircuit: variable map size");
    }
    for (std::size_t v : var_maps_[i]) {
      if (v >= num_vars_) {
        throw ContractViolation("SubstitutionCircuit: variable out of range");
      }
    }
  }
}

Poly SubstitutionCircuit::evaluate_ring(std::span<const Poly> leaf_values,
                                        std::size_t cap) const {
  check_leaf_values(leaf_values, cap);
  std::vector<Poly> slots;
  slots.reserve(inner_.size());
  std::vector<Poly> local;
  for (std::size_t i = 0; i < inner_.size(); ++i) {
    local.clear();
    for (std::size_t v : var_maps_[i]) local.push_back(leaf_values[v]);
    slots.push_back(inner_[i]->evaluate_ring(local, cap));
  }
  return outer_->evaluate_ring(slots, cap);
}

double SubstitutionCircuit::evaluate_numeric(std::span<const double> z) const {
  if (z.size() != num_vars_) {
    throw ContractViolation("evaluate_numeric: dimension mismatch");
  }
  std::vector<double> slots;
  std::vector<double> local;
  for (std::size_t i = 0; i < inner_.size(); ++i) {
    local.clear();
    for (std::size_t v : var_maps_[i]) local.push_back(z[v]);
    slots.push_back(inner_[i]->evaluate_numeric(local));
  }
  return outer_->evaluate_numeric(slots);
}

std::size_t SubstitutionCircuit::size() const {
  std::size_t total = outer_->size();
  for (const auto& c : inner_) total += c->size();
  return total;
}

ScopedCircuit mix(const ScopedCircuit& f, const ScopedCircuit& g,
                  double alpha) {
  check_scoped(f, "mix");
  check_scoped(g, "mix");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ContractViolation("mix: alpha must lie in [0, 1]");
  }
  CircuitBuilder b;
  const NodeId s0 = b.var(0);
  const NodeId s1 = b.var(1);
  b.sum({{s0, alpha}, {s1, 1.0 - alpha}});
  return substitute(std::move(b).build(2), {f, g});
}

ScopedCircuit product(const ScopedCircuit& f, const ScopedCircuit& g) {
  check_scoped(f, "product");
  check_scoped(g, "product");
  if (!pairwise_disjoint({&f.scope, &g.scope})) {
    throw RefusalError("product: scopes overlap");
  }
  CircuitBuilder b;
  const NodeId s0 = b.var(0);
  const NodeId s1 = b.var(1);
  b.product({s0, s1});
  return substitute(std::move(b).build(2), {f, g});
}

ScopedCircuit hier_compose(const CircuitPtr& outer,
                           const std::vector<ScopedCircuit>& leaves) {
  if (!outer) throw ContractViolation("hier_compose: null outer circuit");
  if (outer->num_vars() != leaves.size()) {
    throw ContractViolation("hier_compose: outer circuit has " +
                            std::to_string(outer->num_vars()) +
                            " slots but " + std::to_string(leaves.size()) +
                            " leaves were given");
  }
  std::vector<const std::vector<std::size_t>*> scopes;
  for (const auto& l : leaves) {
    check_scoped(l, "hier_compose");
    scopes.push_back(&l.scope);
  }
  if (!pairwise_disjoint(scopes)) {
    throw RefusalError("hier_compose: leaf scopes overlap");
  }
  return substitute(outer, leaves);
}

ScopedCircuit det_pgc(const Eigen::MatrixXd& factor,
                      const GroupPartition& partition,
                      const std::vector<CircuitPtr>& leaf_gps,
                      DetBackend backend) {
  const std::size_t m = partition.num_groups();
  if (static_cast<std::size_t>(factor.rows()) != m || leaf_gps.size() != m) {
    throw ContractViolation("det_pgc: need one factor row and one leaf per group");
  }
  Kernel l{factor * factor.transpose(), KernelKind::kLEnsemble};
  std::vector<ScopedCircuit> leaves;
  leaves.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    leaves.push_back({leaf_gps[i], partition.groups[i]});
  }
  return hier_compose(lensemble_gp(l, backend), leaves);
}

ScopedCircuit det_pgc(const Kernel& l, const GroupPartition& partition,
                      const std::vector<CircuitPtr>& leaf_gps,
                      DetBackend backend) {
  if (l.kind != KernelKind::kLEnsemble) {
    throw ContractViolation("det_pgc: expected a symmetric L-ensemble kernel");
  }
  const auto rep = validate_kernel(l);
  if (!rep.valid) throw RefusalError("det_pgc: " + rep.reason);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (l.matrix + l.matrix.transpose()));
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd factor = eig.eigenvectors() * roots.asDiagonal();
  return det_pgc(factor, partition, leaf_gps, backend);
}

}  // namespace pgc
