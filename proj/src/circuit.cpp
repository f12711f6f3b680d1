#include "pgc/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pgc/errors.hpp"

namespace pgc {

double Circuit::evaluate_numeric(std::span<const double> z) const {
  if (z.size() != num_vars()) {
    throw ContractViolation("evaluate_numeric: expected " +
                            std::to_string(num_vars()) + " values, got " +
                            std::to_string(z.size()));
  }
  std::vector<Poly> leaves;
  leaves.reserve(z.size());
  for (double v : z) leaves.push_back(Poly::constant(v, 0));
  return evaluate_ring(leaves, 0).coef(0);
}

void Circuit::check_leaf_values(std::span<const Poly> leaf_values,
                                std::size_t cap) const {
  if (leaf_values.size() != num_vars()) {
    throw ContractViolation("evaluate_ring: expected " +
                            std::to_string(num_vars()) +
                            " leaf values, got " +
                            std::to_string(leaf_values.size()));
  }
  for (const Poly& p : leaf_values) {
    if (p.cap() != cap) {
      throw ContractViolation("evaluate_ring: leaf value cap " +
                              std::to_string(p.cap()) + " != " +
                              std::to_string(cap));
    }
  }
}

std::vector<SyntaxViolation> validate_syntax(std::span<const Node> nodes,
                                             std::size_t num_vars) {
  std::vector<SyntaxViolation> out;
  if (nodes.empty()) {
    out.push_back({SyntaxIssue::kEmpty, 0, "circuit has no nodes"});
    return out;
  }
  std::vector<std::size_t> out_degree(nodes.size(), 0);
  auto check_child = [&](NodeId self, NodeId child) {
    if (child >= nodes.size()) {
      out.push_back({SyntaxIssue::kChildOutOfRange, self,
                     "node " + std::to_string(self) + ": child " +
                         std::to_string(child) + " does not exist"});
    } else if (child >= self) {
      out.push_back({SyntaxIssue::kNotTopological, self,
                     "node " + std::to_string(self) + ": child " +
                         std::to_string(child) +
                         " is not topologically ordered"});
    } else {
      ++out_degree[child];
    }
  };
  for (NodeId id = 0; id < nodes.size(); ++id) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, SumNode>) {
            if (n.children.empty()) {
              out.push_back({SyntaxIssue::kEmptyInternalNode, id,
                             "node " + std::to_string(id) +
                                 ": sum node without children"});
            }
            for (const auto& e : n.children) check_child(id, e.child);
          } else if constexpr (std::is_same_v<T, ProductNode>) {
            if (n.children.empty()) {
              out.push_back({SyntaxIssue::kEmptyInternalNode, id,
                             "node " + std::to_string(id) +
                                 ": product node without children"});
            }
            for (NodeId c : n.children) check_child(id, c);
          } else if constexpr (std::is_same_v<T, VarLeaf>) {
            if (n.var >= num_vars) {
              out.push_back({SyntaxIssue::kVarOutOfRange, id,
                             "node " + std::to_string(id) + ": variable " +
                                 std::to_string(n.var) + " out of range"});
            }
          }
        },
        nodes[id]);
  }
  std::vector<NodeId> roots;
  for (NodeId id = 0; id < nodes.size(); ++id) {
    if (out_degree[id] == 0) roots.push_back(id);
  }
  if (roots.size() > 1) {
    std::ostringstream msg;
    msg << "multiple roots:";
    for (NodeId r : roots) msg << ' ' << r;
    out.push_back({SyntaxIssue::kMultipleRoots, roots.front(), msg.str()});
  }
  return out;
}

NodeCircuit::NodeCircuit(std::vector<Node> nodes, std::size_t num_vars)
    : nodes_(std::move(nodes)), num_vars_(num_vars) {
  const auto issues = validate_syntax(nodes_, num_vars_);
  if (!issues.empty()) {
    std::string msg = "invalid circuit:";
    for (const auto& v : issues) msg += " [" + v.message + "]";
    throw ContractViolation(msg);
  }
  for (const Node& n : nodes_) {
    if (const auto* s = std::get_if<SumNode>(&n)) edges_ += s->children.size();
    if (const auto* p = std::get_if<ProductNode>(&n)) {
      edges_ += p->children.size();
    }
  }
}

Poly NodeCircuit::evaluate_ring(std::span<const Poly> leaf_values,
                                std::size_t cap) const {
  check_leaf_values(leaf_values, cap);
  std::vector<Poly> value(nodes_.size());
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    value[id] = std::visit(
        [&](const auto& n) -> Poly {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, SumNode>) {
            Poly acc(cap);
            for (const auto& e : n.children) {
              acc.add_scaled(value[e.child], e.weight);
            }
            return acc;
          } else if constexpr (std::is_same_v<T, ProductNode>) {
            Poly acc = value[n.children.front()];
            for (std::size_t k = 1; k < n.children.size() && !acc.is_zero();
                 ++k) {
              acc = mul(acc, value[n.children[k]]);
            }
            return acc;
          } else if constexpr (std::is_same_v<T, VarLeaf>) {
            return leaf_values[n.var];
          } else {
            return Poly::constant(n.value, cap);
          }
        },
        nodes_[id]);
  }
  return std::move(value.back());
}

double NodeCircuit::evaluate_numeric(std::span<const double> z) const {
  if (z.size() != num_vars_) {
    throw ContractViolation("evaluate_numeric: expected " +
                            std::to_string(num_vars_) + " values, got " +
                            std::to_string(z.size()));
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
          } else if constexpr (std::is_same_v<T, VarLeaf>) {
            return z[n.var];
          } else {
            return n.value;
          }
        },
        nodes_[id]);
  }
  return value.back();
}

std::shared_ptr<const NodeCircuit> CircuitBuilder::build(
    std::size_t num_vars) && {
  return std::make_shared<const NodeCircuit>(std::move(nodes_), num_vars);
}

double marginal(const Circuit& c, const MarginalQuery& q) {
  const std::size_t n = c.num_vars();
  // 0 = free, 1 = one, 2 = zero
  std::vector<int> role(n, 0);
  for (std::size_t i : q.ones) {
    if (i >= n) {
      throw ContractViolation("marginal: variable " + std::to_string(i) +
                              " out of range");
    }
    if (role[i] != 0) {
      throw ContractViolation("marginal: variable " + std::to_string(i) +
                              " listed twice");
    }
    role[i] = 1;
  }
  for (std::size_t i : q.zeros) {
    if (i >= n) {
      throw ContractViolation("marginal: variable " + std::to_string(i) +
                              " out of range");
    }
    if (role[i] != 0) {
      throw ContractViolation("marginal: variable " + std::to_string(i) +
                              " is in both sets or listed twice");
    }
    role[i] = 2;
  }
  // Only coef_|A| is needed, and truncation commutes with every ring
  // operation, so the ring can be cut at degree |A|.
  const std::size_t cap = q.ones.size();
  const Poly t = Poly::monomial(1.0, 1, cap);
  const Poly zero(cap);
  const Poly one = Poly::constant(1.0, cap);
  std::vector<Poly> leaves;
  leaves.reserve(n);
  for (int r : role) leaves.push_back(r == 1 ? t : (r == 2 ? zero : one));
  return c.evaluate_ring(leaves, cap).coef(cap);
}

double likelihood(const Circuit& c, std::span<const std::uint8_t> x) {
  if (x.size() != c.num_vars()) {
    throw ContractViolation("likelihood: expected " +
                            std::to_string(c.num_vars()) + " values, got " +
                            std::to_string(x.size()));
  }
  MarginalQuery q;
  for (std::size_t i = 0; i < x.size(); ++i) {
    (x[i] ? q.ones : q.zeros).push_back(i);
  }
  return marginal(c, q);
}

double log_likelihood(const Circuit& c, std::span<const std::uint8_t> x) {
  return std::log(likelihood(c, x));
}

std::vector<std::uint8_t> assignment_from_index(std::size_t r, std::size_t n) {
  std::vector<std::uint8_t> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = (r >> (n - 1 - i)) & 1U;
  return x;
}

std::vector<double> expand_joint(const Circuit& c, std::size_t limit) {
  const std::size_t n = c.num_vars();
  if (n > limit) {
    throw RefusalError("expand_joint: " + std::to_string(n) +
                       " variables exceeds the enumeration limit " +
                       std::to_string(limit));
  }
  std::vector<double> table(std::size_t{1} << n);
  for (std::size_t r = 0; r < table.size(); ++r) {
    table[r] = likelihood(c, assignment_from_index(r, n));
  }
  return table;
}

SemanticsReport validate_semantics(const Circuit& c, std::size_t limit,
                                   double tol) {
  const auto table = expand_joint(c, limit);
  SemanticsReport rep;
  rep.min_entry = *std::min_element(table.begin(), table.end());
  for (double v : table) rep.total += v;
  rep.nonnegative = rep.min_entry >= -tol;
  rep.normalized = std::abs(rep.total - 1.0) <= tol;
  rep.max_violation =
      std::max({0.0, -rep.min_entry, std::abs(rep.total - 1.0)});
  return rep;
}

}  // namespace pgc
