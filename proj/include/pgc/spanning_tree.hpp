#ifndef PGC_SPANNING_TREE_HPP
#define PGC_SPANNING_TREE_HPP

#include <cstddef>
#include <vector>

#include "pgc/circuit.hpp"
#include "pgc/determinant.hpp"

namespace pgc {

struct WeightedEdgeSpec {
  std::size_t u;
  std::size_t v;
  double weight;
};

/// Undirected graph whose edges become the random variables, in edge order.
struct WeightedGraph {
  std::size_t num_vertices = 0;
  std::vector<WeightedEdgeSpec> edges;
};

bool is_connected(const WeightedGraph& g);

/// Unnormalized generating polynomial of the spanning-tree distribution:
/// the determinant of the weighted Laplacian sum_e w_e z_e A_e with row and
/// column `removed_vertex` deleted. The coefficient of z^T is the product of
/// edge weights when T is a spanning tree and zero otherwise; evaluating at
/// all-ones gives the normalizer. Refuses disconnected graphs, self-loops
/// and negative weights.
CircuitPtr spanning_tree_gp(const WeightedGraph& g, std::size_t removed_vertex,
                            DetBackend backend = DetBackend::kBird);

/// Complete graph on n vertices with unit weights.
WeightedGraph complete_graph(std::size_t n);

}  // namespace pgc

#endif  // PGC_SPANNING_TREE_HPP
