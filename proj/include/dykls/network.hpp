#pragma once

#include <utility>
#include <vector>

#include "dykls/errors.hpp"
#include "dykls/types.hpp"

namespace dykls {

/// A point of the product space X = X_1 x ... x X_|V|.
struct ProductPoint {
  std::vector<Vec> blocks;

  ProductPoint() = default;
  explicit ProductPoint(std::vector<Vec> b) : blocks(std::move(b)) {}

  static ProductPoint zeros(int num_blocks, Eigen::Index m);
  static ProductPoint replicate(const Vec& x, int num_blocks);

  int size() const { return static_cast<int>(blocks.size()); }
  Eigen::Index dim() const { return blocks.empty() ? 0 : blocks[0].size(); }

  Vec& operator[](int i) { return blocks[static_cast<std::size_t>(i)]; }
  const Vec& operator[](int i) const {
    return blocks[static_cast<std::size_t>(i)];
  }

  double squaredNorm() const;
  double norm() const;
};

ProductPoint operator-(const ProductPoint& a, const ProductPoint& b);

/// Undirected connected graph; edges stored as (i,j) with i < j.
class Graph {
 public:
  Graph(int num_nodes, std::vector<std::pair<int, int>> edges);

  /// Star with center 0 and leaves 1..n-1.
  static Graph star(int num_nodes);

  int num_nodes() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::pair<int, int>& edge(int e) const {
    return edges_[static_cast<std::size_t>(e)];
  }

  /// Index of edge {i,j}, or -1 when absent.
  int edge_index(int i, int j) const;

  /// Deterministic BFS spanning tree rooted at node 0.
  std::vector<std::pair<int, int>> spanning_tree() const;

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
};

/// Element of H_e^perp for e = (i,j), i < j: block i holds +u, block j -u,
/// every other block zero.
struct EdgeDual {
  int i;
  int j;
  Vec u;
};

/// P_{H_e^perp}(w) restricted to the blocks of e: u = (w_i - w_j)/2.
EdgeDual project_edge_complement(const ProductPoint& w,
                                 std::pair<int, int> e);

struct ConsensusParts {
  Vec mean;              // the D-component is (mean,...,mean)
  ProductPoint residual; // in D-perp: block sums cancel
};
ConsensusParts consensus_parts(const ProductPoint& v);

struct Decomposition {
  std::vector<EdgeDual> duals;
  double c_reg;  // realized max_e |z_e| / |v|
};

/// Leaf elimination on a spanning tree: writes v in D-perp as a sum of edge
/// duals, one per tree edge. Throws NotInDPerp when block sums do not cancel
/// within 1e-8 |v|.
Decomposition decompose_residual(
    const ProductPoint& v, const std::vector<std::pair<int, int>>& tree_edges);

}  // namespace dykls
