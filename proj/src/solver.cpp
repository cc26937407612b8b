#include "dykls/solver.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace dykls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_cut_class(NodeClass c) {
  return c == NodeClass::V4 || c == NodeClass::V5;
}

const LevelSetIndicator& level_set_of(const NodeSpec& node) {
  return std::get<LevelSetIndicator>(node.f);
}

}  // namespace

Schedule star_schedule(const Graph& graph) {
  Schedule s;
  for (int j = 1; j < graph.num_nodes(); ++j) {
    s.blocks.push_back({BlockItem::edge(graph.edge_index(0, j))});
    s.blocks.push_back({BlockItem::node(0), BlockItem::node(j)});
  }
  s.w_bar = static_cast<int>(s.blocks.size());
  return s;
}

void validate_schedule(const Problem& prob) {
  const Schedule& s = prob.schedule;
  if (s.w_bar != static_cast<int>(s.blocks.size()) || s.w_bar == 0)
    throw std::invalid_argument("schedule: w_bar mismatch or empty");
  std::set<int> nodes;
  std::vector<std::pair<int, int>> used_edges;
  for (const auto& block : s.blocks) {
    if (block.empty()) throw std::invalid_argument("schedule: empty block");
    for (const auto& item : block) {
      if (item.is_edge) {
        if (item.index < 0 || item.index >= prob.graph.num_edges())
          throw std::invalid_argument("schedule: edge index out of range");
        used_edges.push_back(prob.graph.edge(item.index));
      } else {
        if (item.index < 0 || item.index >= prob.num_nodes())
          throw std::invalid_argument("schedule: node index out of range");
        nodes.insert(item.index);
      }
    }
  }
  if (static_cast<int>(nodes.size()) != prob.num_nodes())
    throw std::invalid_argument("schedule: does not cover all nodes");
  // The scheduled edges must connect V (Definition: their hyperplane
  // intersection equals the diagonal).
  std::vector<int> parent(static_cast<std::size_t>(prob.num_nodes()));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[static_cast<std::size_t>(a)] != a)
      a = parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
    return a;
  };
  int comps = prob.num_nodes();
  for (const auto& [i, j] : used_edges) {
    const int ri = find(i), rj = find(j);
    if (ri != rj) {
      parent[static_cast<std::size_t>(ri)] = rj;
      --comps;
    }
  }
  if (comps != 1)
    throw std::invalid_argument("schedule: scheduled edges do not connect V");
}

SolverState init_state(const Problem& prob) {
  const int n = prob.num_nodes();
  const Eigen::Index m = prob.dim();
  SolverState st;
  st.z_node.assign(static_cast<std::size_t>(n), Vec::Zero(m));
  st.z_edge.assign(static_cast<std::size_t>(prob.graph.num_edges()),
                   Vec::Zero(m));
  st.cut.assign(static_cast<std::size_t>(n), AffineMinorant{});
  st.v_H.assign(static_cast<std::size_t>(n), Vec::Zero(m));
  st.x_block.assign(prob.xbar.blocks.begin(), prob.xbar.blocks.end());
  st.conj.assign(static_cast<std::size_t>(n), 0.0);

  for (int i = 0; i < n; ++i) {
    const NodeSpec& node = prob.nodes[static_cast<std::size_t>(i)];
    const Vec& xb = prob.xbar[i];
    switch (node.cls) {
      case NodeClass::V1:
      case NodeClass::V2:
      case NodeClass::V3:
        st.conj[static_cast<std::size_t>(i)] =
            conjugate_value(node.f, Vec::Zero(m));
        break;
      case NodeClass::V4: {
        AffineMinorant cut = linearize(node.f, xb);
        st.conj[static_cast<std::size_t>(i)] =
            cut.s.isZero(0.0) ? -cut.beta : kInf;
        st.cut[static_cast<std::size_t>(i)] = std::move(cut);
        break;
      }
      case NodeClass::V5: {
        st.cut[static_cast<std::size_t>(i)] =
            linearize(level_set_of(node).g(), xb);
        st.conj[static_cast<std::size_t>(i)] = 0.0;  // support fn at z = 0
        break;
      }
    }
  }
  return st;
}

void reset_edge_duals(SolverState& state, const Problem& prob) {
  ProductPoint vh{state.v_H};
  const Decomposition dec = decompose_residual(vh, prob.tree);

  for (auto& z : state.z_edge) z.setZero();
  for (const auto& d : dec.duals) {
    const int e = prob.graph.edge_index(d.i, d.j);
    state.z_edge[static_cast<std::size_t>(e)] = d.u;
  }
  // Rebuild v_H exactly from the new duals; kills accumulated drift.
  for (auto& b : state.v_H) b.setZero();
  for (int e = 0; e < prob.graph.num_edges(); ++e) {
    const auto& [i, j] = prob.graph.edge(e);
    state.v_H[static_cast<std::size_t>(i)] +=
        state.z_edge[static_cast<std::size_t>(e)];
    state.v_H[static_cast<std::size_t>(j)] -=
        state.z_edge[static_cast<std::size_t>(e)];
  }
}

void levelset_node_update(SolverState& state, const Problem& prob, int i) {
  const auto ui = static_cast<std::size_t>(i);
  const LevelSetIndicator& ls = level_set_of(prob.nodes[ui]);
  const Vec p = prob.xbar[i] - state.v_H[ui];
  const Vec x_tilde = p - state.z_node[ui];

  const AffineMinorant fresh = linearize(ls.g(), x_tilde);
  const AffineMinorant& prev = state.cut[ui];
  const double r1 = prev.value(p);
  const double r2 = fresh.value(p);

  // Inconsistent cut pair: opposite parallel normals whose level sets miss.
  {
    const double g11 = prev.s.squaredNorm();
    const double g22 = fresh.s.squaredNorm();
    const double g12 = prev.s.dot(fresh.s);
    if (g11 > 0.0 && g22 > 0.0 &&
        g11 * g22 - g12 * g12 <= 1e-14 * g11 * g22 && g12 < 0.0) {
      const double t = std::sqrt(g11 / g22);
      if (-prev.beta - t * fresh.beta <
          -1e-12 * (1.0 + std::abs(prev.beta) + t * std::abs(fresh.beta)))
        throw InfeasibleIntersection("level-set node: inconsistent cut pair");
    }
  }

  const auto [l1, l2] = two_cut_multipliers(prev.s, r1, fresh.s, r2);
  if (l1 == 0.0 && l2 == 0.0) {
    // p feasible for both cuts: constant surrogate whose level set is the
    // whole space.
    state.cut[ui] = AffineMinorant{Vec::Zero(p.size()), std::min(r1, 0.0)};
    state.z_node[ui] = Vec::Zero(p.size());
    state.conj[ui] = 0.0;
    state.x_block[ui] = p;
    return;
  }
  // The aggregate is the conic combination of the two cuts, so level-set
  // containment is inherited exactly; its slope is the new dual z+ and the
  // re-projection of p returns the same primal-dual pair.
  AffineMinorant agg{l1 * prev.s + l2 * fresh.s,
                     l1 * prev.beta + l2 * fresh.beta};
  state.z_node[ui] = agg.s;
  state.x_block[ui] = p - agg.s;
  state.conj[ui] = -agg.beta;
  state.cut[ui] = std::move(agg);
}

void process_block(SolverState& state, const Problem& prob,
                   const std::vector<BlockItem>& block) {
  for (const auto& item : block) {
    if (item.is_edge) {
      const auto ue = static_cast<std::size_t>(item.index);
      const auto& [i, j] = prob.graph.edge(item.index);
      const auto bi = static_cast<std::size_t>(i);
      const auto bj = static_cast<std::size_t>(j);
      // Blocks of xbar - sum_{beta != e} z_beta at i and j.
      const Vec wi =
          prob.xbar[i] - state.v_H[bi] - state.z_node[bi] + state.z_edge[ue];
      const Vec wj =
          prob.xbar[j] - state.v_H[bj] - state.z_node[bj] - state.z_edge[ue];
      Vec u_new = 0.5 * (wi - wj);
      state.v_H[bi] += u_new - state.z_edge[ue];
      state.v_H[bj] -= u_new - state.z_edge[ue];
      state.z_edge[ue] = std::move(u_new);
      continue;
    }

    const int i = item.index;
    const auto ui = static_cast<std::size_t>(i);
    const NodeSpec& node = prob.nodes[ui];
    switch (node.cls) {
      case NodeClass::V1:
      case NodeClass::V2:
      case NodeClass::V3: {
        const Vec p = prob.xbar[i] - state.v_H[ui];
        ProxPair pair = prox(node.f, p);
        // Fenchel equality at the prox pair gives the conjugate for free.
        state.conj[ui] = pair.z.dot(pair.x) - eval(node.f, pair.x);
        state.z_node[ui] = std::move(pair.z);
        state.x_block[ui] = std::move(pair.x);
        break;
      }
      case NodeClass::V4: {
        // Dual block step with the surrogate max{carried cut, fresh tangent}:
        // its conjugate is linear on the segment of slopes, so the step is a
        // one-dimensional QP over convex combinations. A raw tangent
        // overwrite (z <- grad f) is an unstable fixed-point iteration once
        // the gradient map is expansive.
        const Vec p = prob.xbar[i] - state.v_H[ui];
        const Vec x_tilde = p - state.z_node[ui];
        const AffineMinorant fresh = linearize(node.f, x_tilde);
        const AffineMinorant& prev = state.cut[ui];
        const Vec d = prev.s - fresh.s;
        const double dd = d.squaredNorm();
        double mu;
        if (dd > 0.0) {
          mu = ((p - fresh.s).dot(d) + (prev.beta - fresh.beta)) / dd;
          mu = std::clamp(mu, 0.0, 1.0);
        } else {
          mu = prev.beta >= fresh.beta ? 1.0 : 0.0;
        }
        AffineMinorant agg{mu * prev.s + (1.0 - mu) * fresh.s,
                           mu * prev.beta + (1.0 - mu) * fresh.beta};
        state.z_node[ui] = agg.s;
        state.x_block[ui] = p - agg.s;
        state.conj[ui] = -agg.beta;
        state.cut[ui] = std::move(agg);
        break;
      }
      case NodeClass::V5:
        levelset_node_update(state, prob, i);
        break;
    }
  }
}

void sweep(SolverState& state, const Problem& prob) {
  reset_edge_duals(state, prob);
  for (int w = 1; w <= prob.schedule.w_bar; ++w) {
    state.w = w;
    process_block(state, prob,
                  prob.schedule.blocks[static_cast<std::size_t>(w - 1)]);
  }
  ++state.n;
  state.w = 0;
}

double dual_value_cached(const SolverState& state, const Problem& prob) {
  double quad = 0.0;
  double conj_sum = 0.0;
  for (int i = 0; i < prob.num_nodes(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Vec d = prob.xbar[i] - state.v_H[ui] - state.z_node[ui];
    quad += 0.5 * prob.xbar[i].squaredNorm() - 0.5 * d.squaredNorm();
    conj_sum += state.conj[ui];
  }
  return quad - conj_sum;
}

double dual_value(const SolverState& state, const Problem& prob) {
  double quad = 0.0;
  double conj_sum = 0.0;
  for (int i = 0; i < prob.num_nodes(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const NodeSpec& node = prob.nodes[ui];
    const Vec& z = state.z_node[ui];
    const Vec d = prob.xbar[i] - state.v_H[ui] - z;
    quad += 0.5 * prob.xbar[i].squaredNorm() - 0.5 * d.squaredNorm();

    if (!is_cut_class(node.cls)) {
      conj_sum += conjugate_value(node.f, z);
      continue;
    }
    const AffineMinorant& cut = state.cut[ui];
    const double s_norm = cut.s.norm();
    if (node.cls == NodeClass::V4) {
      if ((z - cut.s).norm() <= 1e-6 * (1.0 + s_norm)) {
        conj_sum += -cut.beta;
      } else if (z.norm() <= 1e-12 * (1.0 + s_norm)) {
        conj_sum += kInf;  // pristine zero dual against a fresh tangent
      } else {
        throw InconsistentDual("V4 dual not colinear with its surrogate");
      }
      continue;
    }
    // V5: support function of {cut <= 0} at z = t * slope.
    if (s_norm == 0.0) {
      if (z.norm() > 1e-6)
        throw InconsistentDual("V5 dual nonzero against a degenerate cut");
      conj_sum += 0.0;
      continue;
    }
    const double t = z.dot(cut.s) / (s_norm * s_norm);
    if (t < -1e-10 || (z - t * cut.s).norm() > 1e-6 * (1.0 + z.norm()))
      throw InconsistentDual("V5 dual not colinear with its cut");
    conj_sum += std::max(t, 0.0) * (-cut.beta);
  }
  return quad - conj_sum;
}

double primal_value(const ProductPoint& x, const Problem& prob) {
  double val = 0.0;
  for (int i = 0; i < prob.num_nodes(); ++i) {
    val += 0.5 * (x[i] - prob.xbar[i]).squaredNorm() +
           eval(prob.nodes[static_cast<std::size_t>(i)].f, x[i]);
  }
  return val;
}

ProductPoint current_x(const SolverState& state, const Problem& prob) {
  ProductPoint x = prob.xbar;
  for (int i = 0; i < prob.num_nodes(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    x[i] -= state.v_H[ui] + state.z_node[ui];
  }
  return x;
}

}  // namespace dykls
