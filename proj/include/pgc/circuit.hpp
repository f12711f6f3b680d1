#ifndef PGC_CIRCUIT_HPP
#define PGC_CIRCUIT_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pgc/poly.hpp"

namespace pgc {

/// A generating polynomial over variables z_0..z_{n-1}, exposed through its
/// evaluation contract. Implementations either store an explicit node DAG
/// (NodeCircuit) or compute the polynomial through some other algorithm,
/// e.g. a determinant over R[t]; every query in this header works on both.
///
/// Circuits are immutable after construction and safe to query from
/// several threads.
class Circuit {
 public:
  virtual ~Circuit() = default;

  virtual std::size_t num_vars() const = 0;

  /// Evaluates the polynomial with z_i replaced by leaf_values[i]. All leaf
  /// values must have the given cap.
  virtual Poly evaluate_ring(std::span<const Poly> leaf_values,
                             std::size_t cap) const = 0;

  virtual double evaluate_numeric(std::span<const double> z) const;

  /// Edge count for node circuits; ring-operation count of the evaluation
  /// algorithm for closure-backed circuits.
  virtual std::size_t size() const = 0;

 protected:
  void check_leaf_values(std::span<const Poly> leaf_values,
                         std::size_t cap) const;
};

using CircuitPtr = std::shared_ptr<const Circuit>;
using NodeId = std::size_t;

struct WeightedEdge {
  NodeId child;
  double weight;
};

struct SumNode {
  std::vector<WeightedEdge> children;
};
struct ProductNode {
  std::vector<NodeId> children;
};
struct VarLeaf {
  std::size_t var;
};
struct ConstLeaf {
  double value;
};

using Node = std::variant<SumNode, ProductNode, VarLeaf, ConstLeaf>;

enum class SyntaxIssue {
  kEmpty,
  kChildOutOfRange,
  kNotTopological,
  kVarOutOfRange,
  kMultipleRoots,
  kEmptyInternalNode,
};

struct SyntaxViolation {
  SyntaxIssue issue;
  NodeId node;
  std::string message;
};

/// Checks the raw node list of a would-be circuit whose root is the last
/// node. Never throws; an empty result means the syntax is valid.
std::vector<SyntaxViolation> validate_syntax(std::span<const Node> nodes,
                                             std::size_t num_vars);

/// Explicit DAG of sum, product, variable and constant nodes in topological
/// order; the last node is the root. Weights and constants may be negative.
class NodeCircuit final : public Circuit {
 public:
  /// Throws ContractViolation listing the syntax violations, if any.
  NodeCircuit(std::vector<Node> nodes, std::size_t num_vars);

  std::size_t num_vars() const override { return num_vars_; }
  Poly evaluate_ring(std::span<const Poly> leaf_values,
                     std::size_t cap) const override;
  double evaluate_numeric(std::span<const double> z) const override;
  std::size_t size() const override { return edges_; }

  std::span<const Node> nodes() const { return nodes_; }
  NodeId root() const { return nodes_.size() - 1; }

 private:
  std::vector<Node> nodes_;
  std::size_t num_vars_;
  std::size_t edges_ = 0;
};

/// Incremental construction helper; ids are returned in insertion order so
/// children always precede parents.
class CircuitBuilder {
 public:
  NodeId var(std::size_t i) { return push(VarLeaf{i}); }
  NodeId constant(double v) { return push(ConstLeaf{v}); }
  NodeId sum(std::vector<WeightedEdge> children) {
    return push(SumNode{std::move(children)});
  }
  NodeId product(std::vector<NodeId> children) {
    return push(ProductNode{std::move(children)});
  }

  std::size_t node_count() const { return nodes_.size(); }

  /// The last pushed node becomes the root.
  std::shared_ptr<const NodeCircuit> build(std::size_t num_vars) &&;

 private:
  NodeId push(Node n) {
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }
  std::vector<Node> nodes_;
};

/// Pr(X_i = 1 for i in ones, X_i = 0 for i in zeros); other variables free.
struct MarginalQuery {
  std::vector<std::size_t> ones;
  std::vector<std::size_t> zeros;
};

/// Marginal probability by evaluation over R[t]: z_i -> t on `ones`,
/// 0 on `zeros`, 1 elsewhere, then the coefficient of t^|ones|.
double marginal(const Circuit& c, const MarginalQuery& q);

double likelihood(const Circuit& c, std::span<const std::uint8_t> x);
double log_likelihood(const Circuit& c, std::span<const std::uint8_t> x);

/// Decodes row index r of a joint table: x_i is bit (n-1-i) of r, so the
/// first variable is the most significant (the order of a truth table).
std::vector<std::uint8_t> assignment_from_index(std::size_t r, std::size_t n);

inline constexpr std::size_t kDefaultEnumerationLimit = 20;

/// Probability of every assignment, in truth-table order. Refuses when
/// num_vars() exceeds the limit.
std::vector<double> expand_joint(const Circuit& c,
                                 std::size_t limit = kDefaultEnumerationLimit);

inline constexpr double kSemanticTolerance = 1e-9;

struct SemanticsReport {
  bool nonnegative = false;
  bool normalized = false;
  double max_violation = 0.0;  // max(-min entry, |sum - 1|), floored at 0
  double total = 0.0;
  double min_entry = 0.0;

  bool ok() const { return nonnegative && normalized; }
};

SemanticsReport validate_semantics(const Circuit& c,
                                   std::size_t limit = kDefaultEnumerationLimit,
                                   double tol = kSemanticTolerance);

}  // namespace pgc

#endif  // PGC_CIRCUIT_HPP
