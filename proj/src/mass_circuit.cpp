#include "pgc/mass_circuit.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>

#include "pgc/errors.hpp"

namespace pgc {
namespace {

std::vector<std::size_t> merge_scopes(const std::vector<std::size_t>& a,
                                      const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

bool disjoint(const std::vector<std::size_t>& a,
              const std::vector<std::size_t>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return false;
    if (*i < *j) {
      ++i;
    } else {
      ++j;
    }
  }
  return true;
}

std::string ids_to_string(const std::vector<NodeId>& ids) {
  std::string s;
  for (NodeId id : ids) s += (s.empty() ? "" : " ") + std::to_string(id);
  return s;
}

std::vector<std::size_t> all_vars(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

MassCircuit::MassCircuit(std::vector<MassNode> nodes, std::size_t num_vars)
    : nodes_(std::move(nodes)), num_vars_(num_vars) {
  std::vector<Node> shape;
  shape.reserve(nodes_.size());
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, SumNode>) {
            for (const auto& e : n.children) {
              if (!(e.weight >= 0.0)) {
                throw ContractViolation(
                    "mass circuit node " + std::to_string(id) +
                    ": sum weights must be nonnegative");
              }
            }
            shape.emplace_back(n);
          } else if constexpr (std::is_same_v<T, ProductNode>) {
            shape.emplace_back(n);
          } else {
            shape.emplace_back(VarLeaf{n.var});
          }
        },
        nodes_[id]);
  }
  const auto issues = validate_syntax(shape, num_vars_);
  if (!issues.empty()) {
    std::string msg = "invalid mass circuit:";
    for (const auto& v : issues) msg += " [" + v.message + "]";
    throw ContractViolation(msg);
  }

  scopes_.resize(nodes_.size());
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, SumNode>) {
            for (const auto& e : n.children) {
              scopes_[id] = merge_scopes(scopes_[id], scopes_[e.child]);
            }
          } else if constexpr (std::is_same_v<T, ProductNode>) {
            for (NodeId c : n.children) {
              scopes_[id] = merge_scopes(scopes_[id], scopes_[c]);
            }
          } else {
            scopes_[id] = {n.var};
          }
        },
        nodes_[id]);
  }
}

std::size_t MassCircuit::size() const {
  std::size_t edges = 0;
  for (const auto& n : nodes_) {
    if (const auto* s = std::get_if<SumNode>(&n)) edges += s->children.size();
    if (const auto* p = std::get_if<ProductNode>(&n)) {
      edges += p->children.size();
    }
  }
  return edges;
}

double MassCircuit::evaluate(std::span<const double> pos,
                             std::span<const double> neg) const {
  if (pos.size() != num_vars_ || neg.size() != num_vars_) {
    throw ContractViolation("MassCircuit::evaluate: dimension mismatch");
  }
  std::vector<double> value(nodes_.size());
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    value[id] = std::visit(
        [&](const auto& n) -> double {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, SumNode>) {
            double acc = 0.0;
            for (const auto& e : n.children) acc += e.weight * value[e.child];
            return acc;
          } else if constexpr (std::is_same_v<T, ProductNode>) {
            double acc = 1.0;
            for (NodeId c : n.children) acc *= value[c];
            return acc;
          } else if constexpr (std::is_same_v<T, PosLeaf>) {
            return pos[n.var];
          } else {
            return neg[n.var];
          }
        },
        nodes_[id]);
  }
  return value.back();
}

StructureCheck check_decomposable(const MassCircuit& pc) {
  StructureCheck out;
  const auto& scopes = pc.scopes();
  for (NodeId id = 0; id < pc.nodes().size(); ++id) {
    const auto* p = std::get_if<ProductNode>(&pc.nodes()[id]);
    if (p == nullptr) continue;
    std::vector<std::size_t> seen;
    bool ok = true;
    for (NodeId c : p->children) {
      if (!disjoint(seen, scopes[c])) {
        ok = false;
        break;
      }
      seen = merge_scopes(seen, scopes[c]);
    }
    if (!ok) {
      out.ok = false;
      out.offending.push_back(id);
    }
  }
  return out;
}

StructureCheck check_smooth(const MassCircuit& pc) {
  StructureCheck out;
  const auto& scopes = pc.scopes();
  for (NodeId id = 0; id < pc.nodes().size(); ++id) {
    const auto* s = std::get_if<SumNode>(&pc.nodes()[id]);
    if (s == nullptr) continue;
    const bool same = std::all_of(
        s->children.begin(), s->children.end(),
        [&](const WeightedEdge& e) { return scopes[e.child] == scopes[id]; });
    if (!same) {
      out.ok = false;
      out.offending.push_back(id);
    }
  }
  return out;
}

MassCircuit smooth(const MassCircuit& pc) {
  const auto dec = check_decomposable(pc);
  if (!dec.ok) {
    throw RefusalError("smooth: circuit is not decomposable at nodes " +
                       ids_to_string(dec.offending));
  }
  const auto& scopes = pc.scopes();
  std::vector<MassNode> out;
  std::vector<NodeId> remap(pc.nodes().size());
  std::map<std::size_t, NodeId> gadget;

  auto push = [&](MassNode n) {
    out.push_back(std::move(n));
    return out.size() - 1;
  };
  auto gadget_for = [&](std::size_t var) {
    auto it = gadget.find(var);
    if (it != gadget.end()) return it->second;
    const NodeId pos = push(PosLeaf{var});
    const NodeId neg = push(NegLeaf{var});
    const NodeId s = push(SumNode{{{pos, 1.0}, {neg, 1.0}}});
    gadget.emplace(var, s);
    return s;
  };
  auto extend = [&](NodeId new_child, const std::vector<std::size_t>& have,
                    const std::vector<std::size_t>& want) {
    std::vector<std::size_t> missing;
    std::set_difference(want.begin(), want.end(), have.begin(), have.end(),
                        std::back_inserter(missing));
    if (missing.empty()) return new_child;
    std::vector<NodeId> factors{new_child};
    for (std::size_t j : missing) factors.push_back(gadget_for(j));
    return push(ProductNode{std::move(factors)});
  };

  for (NodeId id = 0; id < pc.nodes().size(); ++id) {
    remap[id] = std::visit(
        [&](const auto& n) -> NodeId {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, SumNode>) {
            SumNode s;
            for (const auto& e : n.children) {
              s.children.push_back(
                  {extend(remap[e.child], scopes[e.child], scopes[id]),
                   e.weight});
            }
            return push(std::move(s));
          } else if constexpr (std::is_same_v<T, ProductNode>) {
            ProductNode p;
            for (NodeId c : n.children) p.children.push_back(remap[c]);
            return push(std::move(p));
          } else {
            return push(n);
          }
        },
        pc.nodes()[id]);
  }
  const NodeId root = remap[pc.root()];
  const NodeId new_root =
      extend(root, scopes[pc.root()], all_vars(pc.num_vars()));
  if (new_root != out.size() - 1) {
    // Root must stay last; only happens if it was remapped earlier.
    out.push_back(ProductNode{{new_root}});
  }
  return MassCircuit(std::move(out), pc.num_vars());
}

namespace {

void require_tractable(const MassCircuit& pc, const char* op) {
  const auto dec = check_decomposable(pc);
  if (!dec.ok) {
    throw RefusalError(std::string(op) +
                       ": circuit is not decomposable at nodes " +
                       ids_to_string(dec.offending));
  }
  const auto sm = check_smooth(pc);
  if (!sm.ok) {
    throw RefusalError(std::string(op) + ": circuit is not smooth at nodes " +
                       ids_to_string(sm.offending));
  }
}

}  // namespace

double pc_marginal(const MassCircuit& pc, const MarginalQuery& q) {
  require_tractable(pc, "pc_marginal");
  const std::size_t n = pc.num_vars();
  std::vector<double> pos(n, 1.0);
  std::vector<double> neg(n, 1.0);
  std::vector<bool> fixed(n, false);
  for (const auto* set : {&q.ones, &q.zeros}) {
    for (std::size_t i : *set) {
      if (i >= n) {
        throw ContractViolation("pc_marginal: variable " + std::to_string(i) +
                                " out of range");
      }
      if (fixed[i]) {
        throw ContractViolation("pc_marginal: variable " + std::to_string(i) +
                                " fixed twice");
      }
      fixed[i] = true;
    }
  }
  for (std::size_t i : q.ones) neg[i] = 0.0;
  for (std::size_t i : q.zeros) pos[i] = 0.0;

  const double z = pc.evaluate(std::vector<double>(n, 1.0),
                               std::vector<double>(n, 1.0));
  if (!(z > 0.0)) {
    throw NumericalError("pc_marginal: circuit evaluates to zero everywhere");
  }
  // Variables outside the root's scope are uniform under Pr ~ A(x).
  const auto& root_scope = pc.scopes()[pc.root()];
  double outside = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (fixed[i] &&
        !std::binary_search(root_scope.begin(), root_scope.end(), i)) {
      outside *= 0.5;
    }
  }
  return outside * pc.evaluate(pos, neg) / z;
}

double pc_likelihood(const MassCircuit& pc, std::span<const std::uint8_t> x) {
  if (x.size() != pc.num_vars()) {
    throw ContractViolation("pc_likelihood: dimension mismatch");
  }
  MarginalQuery q;
  for (std::size_t i = 0; i < x.size(); ++i) {
    (x[i] ? q.ones : q.zeros).push_back(i);
  }
  return pc_marginal(pc, q);
}

std::shared_ptr<const NodeCircuit> to_pgc(const MassCircuit& pc) {
  const bool ready = check_decomposable(pc).ok && check_smooth(pc).ok &&
                     pc.scopes()[pc.root()].size() == pc.num_vars();
  const MassCircuit src = ready ? pc : smooth(pc);

  const std::size_t n = src.num_vars();
  const double z = src.evaluate(std::vector<double>(n, 1.0),
                                std::vector<double>(n, 1.0));
  if (!(z > 0.0)) {
    throw NumericalError("to_pgc: circuit evaluates to zero everywhere");
  }

  std::vector<Node> nodes;
  nodes.reserve(src.nodes().size() + 1);
  for (const auto& mn : src.nodes()) {
    nodes.push_back(std::visit(
        [](const auto& n) -> Node {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, PosLeaf>) {
            return VarLeaf{n.var};
          } else if constexpr (std::is_same_v<T, NegLeaf>) {
            return ConstLeaf{1.0};
          } else {
            return n;
          }
        },
        mn));
  }
  if (std::abs(z - 1.0) > 1e-12) {
    if (auto* s = std::get_if<SumNode>(&nodes.back())) {
      for (auto& e : s->children) e.weight /= z;
    } else {
      const NodeId old_root = nodes.size() - 1;
      nodes.push_back(SumNode{{{old_root, 1.0 / z}}});
    }
  }
  return std::make_shared<const NodeCircuit>(std::move(nodes), n);
}

}  // namespace pgc
