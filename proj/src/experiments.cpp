#include "dykls/experiments.hpp"

#include <cmath>

#include <json.hpp>

#include "dykls/rng.hpp"

namespace dykls {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kMaxRedraws = 100;

Mat rank_one_plus_ridge(Rng& rng, int m) {
  const Vec v = rng.uniform_vec(m);
  const double r = rng.uniform();
  return v * v.transpose() + r * Mat::Identity(m, m);
}

Vec draw_split(Rng& rng, int m) {
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    const Vec u = rng.uniform_vec(m);
    Vec delta = 0.5 * (u - 0.5 * Vec::Ones(m));
    if (delta.norm() >= 1e-3) return delta;
  }
  throw GenerationRetryExhausted("split vector redraws exhausted");
}

GenClass class_for(int preset, int node) {
  const bool ls_node = node == 1 || node == 2;
  switch (preset) {
    case 1: return GenClass::FS;
    case 2: return ls_node ? GenClass::LSS : GenClass::FS;
    case 3: return ls_node ? GenClass::LSNS : GenClass::FS;
    case 4: return ls_node ? GenClass::LSNS : GenClass::FNS;
    default: throw std::invalid_argument("preset must be 1..4");
  }
}

ConvexFn node_function(const NodeInstance& node) {
  switch (node.cls) {
    case GenClass::FS:
      return Quadratic(node.A, node.b, node.c);
    case GenClass::FNS:
      return MaxQuadratic(Quadratic(node.A, node.b, node.c),
                          Quadratic(node.A, *node.b2, *node.c2));
    case GenClass::LSS:
      return LevelSetIndicator(Quadratic(node.A, node.b, node.c));
    case GenClass::LSNS:
      return LevelSetIndicator(
          MaxQuadratic(Quadratic(node.A, node.b, node.c),
                       Quadratic(*node.A2, *node.b2, *node.c2)));
  }
  throw std::logic_error("unreachable");
}

ordered_json vec_to_json(const Vec& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

ordered_json mat_to_json(const Mat& A) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    rows.push_back(vec_to_json(A.row(i).transpose()));
  return rows;
}

Vec vec_from_json(const ordered_json& arr) {
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

Mat mat_from_json(const ordered_json& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  Mat A(r, r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0);
  for (Eigen::Index i = 0; i < r; ++i)
    A.row(i) = vec_from_json(rows[static_cast<std::size_t>(i)]).transpose();
  return A;
}

}  // namespace

std::string treatment_name(Treatment t) {
  return t == Treatment::Prox ? "prox" : "subgrad";
}

Treatment treatment_from_name(const std::string& s) {
  if (s == "prox") return Treatment::Prox;
  if (s == "subgrad") return Treatment::Subgrad;
  throw std::invalid_argument("unknown treatment: " + s);
}

std::string gen_class_name(GenClass c) {
  switch (c) {
    case GenClass::FS: return "F-S";
    case GenClass::FNS: return "F-NS";
    case GenClass::LSS: return "LS-S";
    case GenClass::LSNS: return "LS-NS";
  }
  return "?";
}

GenClass gen_class_from_name(const std::string& s) {
  if (s == "F-S") return GenClass::FS;
  if (s == "F-NS") return GenClass::FNS;
  if (s == "LS-S") return GenClass::LSS;
  if (s == "LS-NS") return GenClass::LSNS;
  throw std::invalid_argument("unknown generator class: " + s);
}

InstanceSpec generate_instance(int preset, Treatment treatment,
                               std::uint64_t seed, int m, int num_nodes) {
  if (preset < 1 || preset > 4)
    throw std::invalid_argument("preset must be 1..4");
  if (num_nodes < 3)
    throw std::invalid_argument("need at least 3 nodes for the presets");

  Rng rng(seed);
  const Vec ones = Vec::Ones(m);

  InstanceSpec inst;
  inst.m = m;
  inst.preset = preset;
  inst.seed = seed;
  inst.graph = Graph::star(num_nodes);

  // Certificate subgradients first, then xbar from the KKT identity
  // sum_i v_i + |V| (1 - xbar) = 0.
  for (int i = 0; i < num_nodes; ++i) inst.v.push_back(rng.uniform_vec(m));
  Vec v_sum = Vec::Zero(m);
  for (const auto& vi : inst.v) v_sum += vi;
  const Vec xbar_block = ones + v_sum / static_cast<double>(num_nodes);
  inst.xbar = ProductPoint::replicate(xbar_block, num_nodes);

  for (int i = 0; i < num_nodes; ++i) {
    NodeInstance node;
    node.cls = class_for(preset, i);
    const Vec& vi = inst.v[static_cast<std::size_t>(i)];
    switch (node.cls) {
      case GenClass::FS: {
        node.treatment = treatment;
        node.A = rank_one_plus_ridge(rng, m);
        node.b = vi - node.A * ones;
        node.c = 0.0;
        break;
      }
      case GenClass::FNS: {
        node.treatment = treatment;
        node.A = rank_one_plus_ridge(rng, m);
        const Vec delta = draw_split(rng, m);
        node.b = vi + delta - node.A * ones;
        node.b2 = vi - delta - node.A * ones;
        node.c = 0.0;
        node.c2 = (node.b - *node.b2).dot(ones);  // branches agree at 1
        break;
      }
      case GenClass::LSS: {
        node.A = rank_one_plus_ridge(rng, m);
        node.b = vi - node.A * ones;
        node.c = -(0.5 * ones.dot(node.A * ones) + node.b.dot(ones));
        break;
      }
      case GenClass::LSNS: {
        node.A = rank_one_plus_ridge(rng, m);
        node.A2 = rank_one_plus_ridge(rng, m);
        const Vec delta = draw_split(rng, m);
        node.b = vi + delta - node.A * ones;
        node.b2 = vi - delta - *node.A2 * ones;
        node.c = -(0.5 * ones.dot(node.A * ones) + node.b.dot(ones));
        node.c2 = -(0.5 * ones.dot(*node.A2 * ones) + node.b2->dot(ones));
        break;
      }
    }
    inst.nodes.push_back(std::move(node));
  }
  return inst;
}

ValidationReport validate_instance(const InstanceSpec& inst) {
  ValidationReport rep;
  auto fail = [&](const std::string& msg) {
    rep.ok = false;
    rep.failures.push_back(msg);
  };
  const Vec ones = Vec::Ones(inst.m);
  const int nv = inst.graph.num_nodes();

  for (int i = 1; i < nv; ++i)
    if ((inst.xbar[i] - inst.xbar[0]).norm() > 1e-12)
      fail("xbar blocks differ");

  Vec kkt = Vec::Zero(inst.m);
  for (const auto& vi : inst.v) kkt += vi;
  kkt += static_cast<double>(nv) * (ones - inst.xbar[0]);
  if (kkt.norm() > 1e-10) fail("KKT residual exceeds 1e-10");

  for (int i = 0; i < nv; ++i) {
    const NodeInstance& node = inst.nodes[static_cast<std::size_t>(i)];
    const Vec& vi = inst.v[static_cast<std::size_t>(i)];
    const std::string tag = "node " + std::to_string(i) + ": ";
    try {
      const ConvexFn f = node_function(node);
      switch (node.cls) {
        case GenClass::FS: {
          const auto& q = std::get<Quadratic>(f);
          if ((q.gradient(ones) - vi).norm() > 1e-9)
            fail(tag + "grad f(1) != v");
          break;
        }
        case GenClass::FNS: {
          const auto& mq = std::get<MaxQuadratic>(f);
          const Vec g1 = mq.q1().gradient(ones);
          const Vec g2 = mq.q2().gradient(ones);
          if ((0.5 * (g1 + g2) - vi).norm() > 1e-9)
            fail(tag + "mean branch gradient != v");
          if (std::abs(mq.q1().value(ones) - mq.q2().value(ones)) > 1e-9)
            fail(tag + "branches disagree at 1");
          if ((g1 - vi).norm() < 1e-4 || (g2 - vi).norm() < 1e-4)
            fail(tag + "v coincides with a branch gradient");
          break;
        }
        case GenClass::LSS:
        case GenClass::LSNS: {
          const auto& ls = std::get<LevelSetIndicator>(f);
          if (std::abs(ls.g_value(ones)) > 1e-10) fail(tag + "g(1) != 0");
          if (!(ls.min_g() < -1e-6)) fail(tag + "min g not below -1e-6");
          if (node.cls == GenClass::LSS) {
            if ((ls.g_subgradient(ones) - vi).norm() > 1e-9)
              fail(tag + "grad g(1) != v");
          } else {
            const auto& mq = std::get<MaxQuadratic>(ls.g());
            const Vec g1 = mq.q1().gradient(ones);
            const Vec g2 = mq.q2().gradient(ones);
            if ((0.5 * (g1 + g2) - vi).norm() > 1e-9)
              fail(tag + "mean branch gradient != v");
            if (std::abs(mq.q2().value(ones)) > 1e-10)
              fail(tag + "branch 2 not zero at 1");
            if ((g1 - vi).norm() < 1e-4 || (g2 - vi).norm() < 1e-4)
              fail(tag + "v coincides with a branch gradient");
          }
          break;
        }
      }
    } catch (const std::exception& e) {
      fail(tag + e.what());
    }
  }
  return rep;
}

void ensure_valid(const InstanceSpec& inst) {
  ValidationReport rep = validate_instance(inst);
  if (!rep.ok) throw ValidationFailed(rep.failures);
}

namespace {

// x(t) = (I + tA)^{-1}(p - tb) descends the constraint monotonically in t.
Vec project_smooth_levelset(const Quadratic& g, const Vec& p) {
  if (g.value(p) <= 0.0) return p;
  const Eigen::Index m = p.size();
  const Mat I = Mat::Identity(m, m);
  auto x_at = [&](double t) -> Vec {
    Eigen::LLT<Mat> llt(I + t * g.A());
    if (llt.info() != Eigen::Success)
      throw SolveError("oracle projection: factorization failed");
    return llt.solve(p - t * g.b());
  };
  double hi = 1.0;
  int guard = 0;
  while (g.value(x_at(hi)) > 0.0) {
    hi *= 2.0;
    if (++guard > 200) throw BisectionFailed("oracle projection: no bracket");
  }
  double lo = 0.0;
  Vec x = x_at(hi);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    x = x_at(mid);
    const double val = g.value(x);
    if (std::abs(val) <= 1e-12) return x;
    if (val > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return x_at(hi);  // feasible side
}

}  // namespace

Vec oracle_project_levelset(const Quadratic& g, const Vec& p) {
  return project_smooth_levelset(g, p);
}

Vec oracle_project_levelset(const MaxQuadratic& g, const Vec& p) {
  if (g.value(p) <= 0.0) return p;
  const Quadratic& q1 = g.q1();
  const Quadratic& q2 = g.q2();

  // Single active branch: the projection onto one branch set that is
  // feasible for the other is the projection onto the intersection.
  {
    const Vec x1 = project_smooth_levelset(q1, p);
    if (q2.value(x1) <= 1e-10) return x1;
    const Vec x2 = project_smooth_levelset(q2, p);
    if (q1.value(x2) <= 1e-10) return x2;
  }

  // Both branches active: multipliers t1 = T mu, t2 = T (1-mu). The inner
  // bisection drives the mu-weighted constraint to zero along T; the outer
  // bisection balances the branches. Failure of the single-branch cases
  // brackets psi: psi(1) = -g2(P_{g1<=0}(p)) < 0 < psi(0).
  const Eigen::Index m = p.size();
  const Mat I = Mat::Identity(m, m);
  auto inner = [&](double mu) -> Vec {
    const Mat A_mu = mu * q1.A() + (1.0 - mu) * q2.A();
    const Vec b_mu = mu * q1.b() + (1.0 - mu) * q2.b();
    auto x_at = [&](double t) -> Vec {
      Eigen::LLT<Mat> llt(I + t * A_mu);
      if (llt.info() != Eigen::Success)
        throw SolveError("oracle projection: factorization failed");
      return llt.solve(p - t * b_mu);
    };
    auto weighted = [&](const Vec& x) {
      return mu * q1.value(x) + (1.0 - mu) * q2.value(x);
    };
    if (weighted(p) <= 0.0) return p;
    double hi = 1.0;
    int guard = 0;
    while (weighted(x_at(hi)) > 0.0) {
      hi *= 2.0;
      if (++guard > 200)
        throw BisectionFailed("oracle projection: inner bracket");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double val = weighted(x_at(mid));
      if (std::abs(val) <= 1e-13) {
        hi = mid;
        break;
      }
      if (val > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return x_at(hi);
  };

  double lo = 0.0, hi = 1.0;
  Vec x = inner(0.5);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    x = inner(mid);
    const double psi = q1.value(x) - q2.value(x);
    if (std::abs(psi) <= 1e-12) break;
    if (psi > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return x;
}

Vec oracle_project_levelset(const LevelFn& g, const Vec& p) {
  if (const auto* q = std::get_if<Quadratic>(&g))
    return oracle_project_levelset(*q, p);
  return oracle_project_levelset(std::get<MaxQuadratic>(g), p);
}

Problem build_problem(const InstanceSpec& inst) {
  Problem prob{inst.graph, {}, inst.xbar, {}, inst.graph.spanning_tree()};
  for (const auto& node : inst.nodes) {
    NodeClass cls;
    if (node.cls == GenClass::LSS || node.cls == GenClass::LSNS)
      cls = NodeClass::V5;
    else
      cls = node.treatment == Treatment::Prox ? NodeClass::V1 : NodeClass::V4;
    prob.nodes.push_back({node_function(node), cls});
  }
  prob.schedule = star_schedule(prob.graph);
  validate_schedule(prob);
  return prob;
}

Reference build_reference(const InstanceSpec& inst) {
  const Vec ones = Vec::Ones(inst.m);
  const int nv = inst.graph.num_nodes();
  Reference ref;
  ref.x_star = ProductPoint::replicate(ones, nv);
  for (int i = 0; i < nv; ++i) {
    const NodeInstance& node = inst.nodes[static_cast<std::size_t>(i)];
    double f_at_opt = 0.0;
    if (node.cls == GenClass::FS || node.cls == GenClass::FNS) {
      const ConvexFn f = node_function(node);
      f_at_opt = eval(f, ones);
    }
    ref.opt_primal +=
        0.5 * (ones - inst.xbar[i]).squaredNorm() + f_at_opt;
    ref.fstar_at_v.push_back(
        inst.v[static_cast<std::size_t>(i)].dot(ones) - f_at_opt);
  }
  ref.ref_sum = 0.5 * ref.x_star.squaredNorm();
  for (double fs : ref.fstar_at_v) ref.ref_sum += fs;
  return ref;
}

std::string instance_to_json(const InstanceSpec& inst) {
  ordered_json j;
  j["format"] = "dykls-instance";
  j["version"] = 1;
  j["m"] = inst.m;
  j["preset"] = inst.preset;
  j["seed"] = inst.seed;
  j["nodes"] = ordered_json::array();
  for (const auto& node : inst.nodes) {
    ordered_json nj;
    nj["class"] = gen_class_name(node.cls);
    nj["treatment"] = (node.cls == GenClass::LSS || node.cls == GenClass::LSNS)
                          ? "levelset"
                          : treatment_name(node.treatment);
    nj["A"] = mat_to_json(node.A);
    nj["b"] = vec_to_json(node.b);
    nj["c"] = node.c;
    if (node.A2) nj["A2"] = mat_to_json(*node.A2);
    if (node.b2) nj["b2"] = vec_to_json(*node.b2);
    if (node.c2) nj["c2"] = *node.c2;
    j["nodes"].push_back(std::move(nj));
  }
  j["xbar"] = ordered_json::array();
  for (const auto& b : inst.xbar.blocks) j["xbar"].push_back(vec_to_json(b));
  j["v"] = ordered_json::array();
  for (const auto& vi : inst.v) j["v"].push_back(vec_to_json(vi));
  return j.dump(1) + "\n";
}

InstanceSpec instance_from_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  if (j.at("format") != "dykls-instance" || j.at("version") != 1)
    throw std::invalid_argument("unrecognized instance file format");
  InstanceSpec inst;
  inst.m = j.at("m").get<int>();
  inst.preset = j.at("preset").get<int>();
  inst.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& nj : j.at("nodes")) {
    NodeInstance node;
    node.cls = gen_class_from_name(nj.at("class").get<std::string>());
    const std::string treat = nj.at("treatment").get<std::string>();
    if (treat != "levelset") node.treatment = treatment_from_name(treat);
    node.A = mat_from_json(nj.at("A"));
    node.b = vec_from_json(nj.at("b"));
    node.c = nj.at("c").get<double>();
    if (nj.contains("A2")) node.A2 = mat_from_json(nj.at("A2"));
    if (nj.contains("b2")) node.b2 = vec_from_json(nj.at("b2"));
    if (nj.contains("c2")) node.c2 = nj.at("c2").get<double>();
    inst.nodes.push_back(std::move(node));
  }
  const int nv = static_cast<int>(inst.nodes.size());
  inst.graph = Graph::star(nv);
  std::vector<Vec> xbar_blocks;
  for (const auto& bj : j.at("xbar")) xbar_blocks.push_back(vec_from_json(bj));
  inst.xbar = ProductPoint(std::move(xbar_blocks));
  for (const auto& vj : j.at("v")) inst.v.push_back(vec_from_json(vj));
  return inst;
}

OneSetInstance generate_oneset_lss(std::uint64_t seed, int m) {
  Rng rng(seed);
  const Vec ones = Vec::Ones(m);
  const Vec v = rng.uniform_vec(m);
  const Mat A = rank_one_plus_ridge(rng, m);
  const Vec b = v - A * ones;
  const double c = -(0.5 * ones.dot(A * ones) + b.dot(ones));
  return {Quadratic(A, b, c), ones + v, ones};
}

}  // namespace dykls
