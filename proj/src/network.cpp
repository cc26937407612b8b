#include "dykls/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

namespace dykls {

ProductPoint ProductPoint::zeros(int num_blocks, Eigen::Index m) {
  ProductPoint p;
  p.blocks.assign(static_cast<std::size_t>(num_blocks), Vec::Zero(m));
  return p;
}

ProductPoint ProductPoint::replicate(const Vec& x, int num_blocks) {
  ProductPoint p;
  p.blocks.assign(static_cast<std::size_t>(num_blocks), x);
  return p;
}

double ProductPoint::squaredNorm() const {
  double s = 0.0;
  for (const auto& b : blocks) s += b.squaredNorm();
  return s;
}

double ProductPoint::norm() const { return std::sqrt(squaredNorm()); }

ProductPoint operator-(const ProductPoint& a, const ProductPoint& b) {
  ProductPoint out = a;
  for (int i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

Graph::Graph(int num_nodes, std::vector<std::pair<int, int>> edges)
    : n_(num_nodes), edges_(std::move(edges)) {
  if (n_ <= 0) throw std::invalid_argument("graph: need at least one node");
  std::set<std::pair<int, int>> seen;
  for (auto& e : edges_) {
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first == e.second) throw std::invalid_argument("graph: self-loop");
    if (e.first < 0 || e.second >= n_)
      throw std::invalid_argument("graph: edge endpoint out of range");
    if (!seen.insert(e).second)
      throw std::invalid_argument("graph: duplicate edge");
  }
  // Connectivity via BFS from node 0.
  std::vector<char> vis(static_cast<std::size_t>(n_), 0);
  std::queue<int> q;
  q.push(0);
  vis[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto& e : edges_) {
      const int other = e.first == u ? e.second : (e.second == u ? e.first : -1);
      if (other >= 0 && !vis[static_cast<std::size_t>(other)]) {
        vis[static_cast<std::size_t>(other)] = 1;
        ++count;
        q.push(other);
      }
    }
  }
  if (count != n_) throw std::invalid_argument("graph: not connected");
}

Graph Graph::star(int num_nodes) {
  std::vector<std::pair<int, int>> edges;
  for (int j = 1; j < num_nodes; ++j) edges.emplace_back(0, j);
  return Graph(num_nodes, std::move(edges));
}

int Graph::edge_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  for (int e = 0; e < num_edges(); ++e)
    if (edges_[static_cast<std::size_t>(e)] == std::make_pair(i, j)) return e;
  return -1;
}

std::vector<std::pair<int, int>> Graph::spanning_tree() const {
  std::vector<std::pair<int, int>> tree;
  std::vector<char> vis(static_cast<std::size_t>(n_), 0);
  std::queue<int> q;
  q.push(0);
  vis[0] = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto& e : edges_) {
      const int other = e.first == u ? e.second : (e.second == u ? e.first : -1);
      if (other >= 0 && !vis[static_cast<std::size_t>(other)]) {
        vis[static_cast<std::size_t>(other)] = 1;
        tree.push_back(e);
        q.push(other);
      }
    }
  }
  return tree;
}

EdgeDual project_edge_complement(const ProductPoint& w,
                                 std::pair<int, int> e) {
  if (e.first > e.second) std::swap(e.first, e.second);
  Vec u = 0.5 * (w[e.first] - w[e.second]);
  return {e.first, e.second, std::move(u)};
}

ConsensusParts consensus_parts(const ProductPoint& v) {
  Vec mean = Vec::Zero(v.dim());
  for (const auto& b : v.blocks) mean += b;
  mean /= static_cast<double>(v.size());
  ProductPoint residual = v;
  for (auto& b : residual.blocks) b -= mean;
  return {std::move(mean), std::move(residual)};
}

Decomposition decompose_residual(
    const ProductPoint& v,
    const std::vector<std::pair<int, int>>& tree_edges) {
  const int n = v.size();
  if (static_cast<int>(tree_edges.size()) != n - 1)
    throw std::invalid_argument("decompose_residual: not a spanning tree");

  Vec sum = Vec::Zero(v.dim());
  for (const auto& b : v.blocks) sum += b;
  const double vnorm = v.norm();
  if (sum.norm() > 1e-8 * std::max(vnorm, 1e-300))
    throw NotInDPerp("decompose_residual: block sums do not cancel");

  std::vector<Vec> work(v.blocks.begin(), v.blocks.end());
  std::vector<char> removed(static_cast<std::size_t>(n), 0);
  std::vector<char> edge_done(tree_edges.size(), 0);
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (const auto& e : tree_edges) {
    ++degree[static_cast<std::size_t>(e.first)];
    ++degree[static_cast<std::size_t>(e.second)];
  }

  std::vector<EdgeDual> duals(tree_edges.size());
  // Eliminate leaves in ascending node order until one root remains.
  for (int elim = 0; elim + 1 < n; ++elim) {
    int leaf = -1;
    for (int i = 0; i < n; ++i) {
      if (!removed[static_cast<std::size_t>(i)] &&
          degree[static_cast<std::size_t>(i)] == 1) {
        leaf = i;
        break;
      }
    }
    if (leaf < 0)
      throw std::invalid_argument("decompose_residual: not a spanning tree");
    for (std::size_t k = 0; k < tree_edges.size(); ++k) {
      if (edge_done[k]) continue;
      const int lo = std::min(tree_edges[k].first, tree_edges[k].second);
      const int hi = std::max(tree_edges[k].first, tree_edges[k].second);
      if (lo != leaf && hi != leaf) continue;
      const int parent = lo == leaf ? hi : lo;
      // Orientation (lo,hi): block lo carries +u, block hi carries -u; the
      // leaf block must end up equal to its current residual.
      Vec u = (leaf == hi) ? Vec(-work[static_cast<std::size_t>(leaf)])
                           : work[static_cast<std::size_t>(leaf)];
      duals[k] = {lo, hi, std::move(u)};
      work[static_cast<std::size_t>(parent)] +=
          work[static_cast<std::size_t>(leaf)];
      removed[static_cast<std::size_t>(leaf)] = 1;
      edge_done[k] = 1;
      --degree[static_cast<std::size_t>(parent)];
      --degree[static_cast<std::size_t>(leaf)];
      break;
    }
  }

  double max_dual = 0.0;
  for (const auto& d : duals)
    max_dual = std::max(max_dual, std::sqrt(2.0) * d.u.norm());
  const double c_reg = vnorm > 0.0 ? max_dual / vnorm : 0.0;
  return {std::move(duals), c_reg};
}

}  // namespace dykls
