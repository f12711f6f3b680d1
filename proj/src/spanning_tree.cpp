#include "pgc/spanning_tree.hpp"

#include <numeric>

#include "pgc/errors.hpp"

namespace pgc {
namespace {

class LaplacianMinorCircuit final : public Circuit {
 public:
  LaplacianMinorCircuit(WeightedGraph g, std::size_t removed,
                        DetBackend backend)
      : g_(std::move(g)), removed_(removed), backend_(backend) {}

  std::size_t num_vars() const override { return g_.edges.size(); }

  Poly evaluate_ring(std::span<const Poly> leaf_values,
                     std::size_t cap) const override {
    check_leaf_values(leaf_values, cap);
    const std::size_t n = g_.num_vertices - 1;
    PolyMatrix m(n, cap);
    auto index = [&](std::size_t v) -> std::ptrdiff_t {
      if (v == removed_) return -1;
      return static_cast<std::ptrdiff_t>(v < removed_ ? v : v - 1);
    };
    for (std::size_t e = 0; e < g_.edges.size(); ++e) {
      const auto& edge = g_.edges[e];
      const auto a = index(edge.u);
      const auto b = index(edge.v);
      const Poly& z = leaf_values[e];
      if (a >= 0) m(a, a).add_scaled(z, edge.weight);
      if (b >= 0) m(b, b).add_scaled(z, edge.weight);
      if (a >= 0 && b >= 0) {
        m(a, b).add_scaled(z, -edge.weight);
        m(b, a).add_scaled(z, -edge.weight);
      }
    }
    return det_ring(m, backend_);
  }

  std::size_t size() const override {
    const std::size_t n = g_.num_vertices - 1;
    const std::size_t bird = n == 0 ? 0 : (n - 1) * n * n * (n + 1) / 2;
    return bird + 4 * g_.edges.size();
  }

 private:
  WeightedGraph g_;
  std::size_t removed_;
  DetBackend backend_;
};

}  // namespace

bool is_connected(const WeightedGraph& g) {
  if (g.num_vertices == 0) return false;
  std::vector<std::size_t> parent(g.num_vertices);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = g.num_vertices;
  for (const auto& e : g.edges) {
    const std::size_t a = find(e.u);
    const std::size_t b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

CircuitPtr spanning_tree_gp(const WeightedGraph& g, std::size_t removed_vertex,
                            DetBackend backend) {
  if (removed_vertex >= g.num_vertices) {
    throw ContractViolation("spanning_tree_gp: removed vertex out of range");
  }
  for (const auto& e : g.edges) {
    if (e.u >= g.num_vertices || e.v >= g.num_vertices) {
      throw ContractViolation("spanning_tree_gp: edge endpoint out of range");
    }
    if (e.u == e.v) throw RefusalError("spanning_tree_gp: self-loop");
    if (!(e.weight >= 0.0)) {
      throw RefusalError("spanning_tree_gp: negative edge weight");
    }
  }
  if (!is_connected(g)) {
    throw RefusalError("spanning_tree_gp: graph is disconnected");
  }
  return std::make_shared<LaplacianMinorCircuit>(g, removed_vertex, backend);
}

WeightedGraph complete_graph(std::size_t n) {
  WeightedGraph g{n, {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) g.edges.push_back({i, j, 1.0});
  }
  return g;
}

}  // namespace pgc
