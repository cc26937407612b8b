#pragma once

#include <vector>

#include "dykls/functions.hpp"
#include "dykls/network.hpp"

namespace dykls {

/// Treatment class of a node in the dual sweep.
///   V1/V3: proximable, V2: projectable set, V4: subdifferentiable with a
///   refreshed tangent surrogate, V5: level-set indicator handled through
///   halfspace cuts.
enum class NodeClass { V1, V2, V3, V4, V5 };

struct NodeSpec {
  ConvexFn f;
  NodeClass cls;
};

/// One element of a sweep block: a node or a consensus edge.
struct BlockItem {
  bool is_edge;
  int index;  // node id, or edge id into Graph::edges()

  static BlockItem node(int i) { return {false, i}; }
  static BlockItem edge(int e) { return {true, e}; }
};

struct Schedule {
  int w_bar = 0;
  std::vector<std::vector<BlockItem>> blocks;
};

struct Problem {
  Graph graph;
  std::vector<NodeSpec> nodes;
  ProductPoint xbar;
  Schedule schedule;
  std::vector<std::pair<int, int>> tree;  // spanning tree used by resets

  int num_nodes() const { return graph.num_nodes(); }
  Eigen::Index dim() const { return xbar.dim(); }
};

/// Star sweep order: edge (0,j) then nodes {0,j}, for j = 1..n-1.
Schedule star_schedule(const Graph& graph);

/// Checks block nonemptiness, node coverage and that the scheduled edges
/// connect V.
void validate_schedule(const Problem& prob);

/// Dual iterate of the sweep. Node duals are stored as their own block only
/// (off-blocks vanish structurally); edge duals as the +u coefficient of the
/// lower endpoint. v_H is kept incrementally consistent with the edge duals,
/// and conj caches f*_{i,n,w}(z_i) for the dual-value fast path.
struct SolverState {
  std::vector<Vec> z_node;
  std::vector<Vec> z_edge;
  std::vector<AffineMinorant> cut;  // V4/V5 surrogates, empty slope otherwise
  std::vector<Vec> v_H;
  std::vector<Vec> x_block;  // [x]_i at node i's last processed block
  std::vector<double> conj;
  int n = 1;
  int w = 0;

  Vec v_A(int i) const { return v_H[static_cast<std::size_t>(i)] +
                                z_node[static_cast<std::size_t>(i)]; }
};

SolverState init_state(const Problem& prob);

/// Rewrites the edge duals as a spanning-tree decomposition of the current
/// v_H; the dual value is unchanged up to roundoff.
void reset_edge_duals(SolverState& state, const Problem& prob);

/// Per-element dispatch of one block; elements not in the block keep their
/// duals.
void process_block(SolverState& state, const Problem& prob,
                   const std::vector<BlockItem>& block);

/// Cut step of one V5 node: project the prox center onto the carried cut
/// intersected with a fresh tangent cut of g, then aggregate.
void levelset_node_update(SolverState& state, const Problem& prob, int i);

/// One full sweep: reset, all blocks, roll counters.
void sweep(SolverState& state, const Problem& prob);

/// F^{n,w} from the cached per-node conjugates; edge terms vanish.
double dual_value_cached(const SolverState& state, const Problem& prob);

/// F^{n,w} recomputed from scratch through the conjugate machinery and the
/// frozen surrogates. Throws InconsistentDual when a V4/V5 dual is not
/// colinear with its surrogate beyond 1e-6.
double dual_value(const SolverState& state, const Problem& prob);

/// Primal objective 1/2|x-xbar|^2 + sum f_i(x_i) at a product point.
double primal_value(const ProductPoint& x, const Problem& prob);

/// Current x = xbar - v_A as a product point.
ProductPoint current_x(const SolverState& state, const Problem& prob);

}  // namespace dykls
