#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dykls/diagnostics.hpp"
#include "dykls/experiments.hpp"
#include "dykls/geometry.hpp"
#include "dykls/oneset.hpp"
#include "dykls/runner.hpp"

namespace py = pybind11;
using namespace dykls;

namespace {

py::dict result_to_dict(const RunResult& res) {
  std::vector<int> n, w;
  std::vector<double> F, h, gap, err;
  std::vector<std::int64_t> wall;
  for (const auto& r : res.records) {
    n.push_back(r.n);
    w.push_back(r.w);
    F.push_back(r.F);
    h.push_back(r.h);
    gap.push_back(r.gap);
    err.push_back(r.err);
    wall.push_back(r.wall_ns);
  }
  py::dict d;
  d["n"] = n;
  d["w"] = w;
  d["F"] = F;
  d["h"] = h;
  d["gap"] = gap;
  d["err"] = err;
  d["wall_ns"] = wall;
  d["ascent_ok"] = res.ascent_ok;
  d["gap_ge_err_ok"] = res.gap_ge_err_ok;
  d["h_ok"] = res.h_ok;
  d["sweeps_done"] = res.sweeps_done;
  d["final_err"] = res.final_err;
  d["final_gap"] = res.final_gap;
  d["final_F"] = res.final_F;
  return d;
}

py::dict oneset_to_dict(const OneSetResult& res, double dbar2) {
  std::vector<int> k;
  std::vector<double> d2, g, v;
  for (const auto& t : res.trace) {
    k.push_back(t.k);
    d2.push_back(t.d2);
    g.push_back(t.g);
    v.push_back(dbar2 - t.d2);
  }
  py::dict d;
  d["k"] = k;
  d["d2"] = d2;
  d["g"] = g;
  d["v"] = v;
  d["x"] = res.x;
  d["converged"] = res.converged;
  d["iters"] = res.iters;
  d["dbar2"] = dbar2;
  return d;
}

RunOptions make_options(int sweeps, int sample_every, double stop_err,
                        double stop_gap) {
  RunOptions opts;
  opts.sweeps = sweeps;
  opts.sample_every = sample_every;
  opts.stop_err = stop_err;
  opts.stop_gap = stop_gap;
  return opts;
}

py::dict fit_to_dict(const RateReport& rep) {
  auto one = [](const RateFit& f) {
    py::dict d;
    d["slope"] = f.slope;
    d["intercept"] = f.intercept;
    d["r2"] = f.r2;
    return d;
  };
  py::dict d;
  d["geometric"] = one(rep.geometric);
  d["inv_linear"] = one(rep.inv_linear);
  d["inv_sqrt"] = one(rep.inv_sqrt);
  d["power"] = one(rep.power);
  d["best"] = rate_model_name(rep.best);
  d["tail_points"] = rep.tail_points;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dual block-coordinate solvers for best approximation onto level "
            "sets of convex functions";

  m.def(
      "generate_instance",
      [](int preset, const std::string& treatment, std::uint64_t seed, int mm,
         int nodes) {
        return instance_to_json(generate_instance(
            preset, treatment_from_name(treatment), seed, mm, nodes));
      },
      py::arg("preset"), py::arg("treatment"), py::arg("seed"),
      py::arg("m") = 10, py::arg("nodes") = 5,
      "Generate an experiment instance; returns its canonical JSON text.");

  m.def(
      "validate_instance",
      [](const std::string& text) {
        const ValidationReport rep =
            validate_instance(instance_from_json(text));
        py::dict d;
        d["ok"] = rep.ok;
        d["failures"] = rep.failures;
        return d;
      },
      py::arg("instance_json"));

  m.def(
      "run",
      [](const std::string& text, int sweeps, int sample_every,
         double stop_err, double stop_gap) {
        InstanceSpec inst = instance_from_json(text);
        ensure_valid(inst);
        return result_to_dict(run_solver(
            inst, make_options(sweeps, sample_every, stop_err, stop_gap)));
      },
      py::arg("instance_json"), py::arg("sweeps") = 2000,
      py::arg("sample_every") = 1, py::arg("stop_err") = -1.0,
      py::arg("stop_gap") = -1.0,
      "Run the distributed sweep solver on a serialized instance.");

  m.def(
      "run_preset",
      [](int preset, const std::string& treatment, std::uint64_t seed,
         int sweeps, int sample_every, double stop_err, double stop_gap,
         int mm, int nodes) {
        return result_to_dict(run_solver(
            generate_instance(preset, treatment_from_name(treatment), seed,
                              mm, nodes),
            make_options(sweeps, sample_every, stop_err, stop_gap)));
      },
      py::arg("preset"), py::arg("treatment"), py::arg("seed"),
      py::arg("sweeps") = 2000, py::arg("sample_every") = 1,
      py::arg("stop_err") = -1.0, py::arg("stop_gap") = -1.0,
      py::arg("m") = 10, py::arg("nodes") = 5);

  m.def(
      "oneset_ball",
      [](int mm, double dist, int max_iter, double tol) {
        const Quadratic g(2.0 * Mat::Identity(mm, mm), Vec::Zero(mm), -1.0);
        Vec xbar = Vec::Zero(mm);
        xbar[0] = dist;
        const Vec proj = oracle_project_levelset(g, xbar);
        return oneset_to_dict(oneset_run(LevelFn(g), xbar, max_iter, tol),
                              (xbar - proj).squaredNorm());
      },
      py::arg("m") = 10, py::arg("dist") = 2.0, py::arg("max_iter") = 2000,
      py::arg("tol") = 1e-10);

  m.def(
      "oneset_lss",
      [](std::uint64_t seed, int mm, int max_iter, double tol) {
        const OneSetInstance inst = generate_oneset_lss(seed, mm);
        const Vec proj = oracle_project_levelset(inst.g, inst.xbar);
        return oneset_to_dict(
            oneset_run(LevelFn(inst.g), inst.xbar, max_iter, tol),
            (inst.xbar - proj).squaredNorm());
      },
      py::arg("seed"), py::arg("m") = 10, py::arg("max_iter") = 2000,
      py::arg("tol") = 1e-10);

  m.def(
      "project_halfspace",
      [](const Vec& x, const Vec& a, double b) {
        return project_halfspace(x, Halfspace(a, b));
      },
      py::arg("x"), py::arg("a"), py::arg("b"),
      "Projection onto {y : <a,y> <= b}.");

  m.def(
      "distance_to_halfspace",
      [](const Vec& x, const Vec& a, double b) {
        return distance_to_halfspace(x, Halfspace(a, b));
      },
      py::arg("x"), py::arg("a"), py::arg("b"));

  m.def(
      "project_two_halfspaces",
      [](const Vec& xbar, const Vec& a1, double b1, const Vec& a2,
         double b2) {
        return project_two_halfspaces(xbar, Halfspace(a1, b1),
                                      Halfspace(a2, b2));
      },
      py::arg("xbar"), py::arg("a1"), py::arg("b1"), py::arg("a2"),
      py::arg("b2"));

  m.def(
      "supporting_halfspace",
      [](const Vec& xbar, const Vec& x) {
        const Halfspace h = supporting_halfspace(xbar, x);
        return py::make_tuple(h.normal(), h.offset());
      },
      py::arg("xbar"), py::arg("x"),
      "Halfspace (a, b) with P_{a,b}(xbar) = x.");

  m.def(
      "rate_fit",
      [](const std::vector<double>& ks, const std::vector<double>& ys) {
        if (ks.size() != ys.size())
          throw std::invalid_argument("rate_fit: length mismatch");
        std::vector<std::pair<double, double>> series;
        for (std::size_t i = 0; i < ks.size(); ++i)
          series.emplace_back(ks[i], ys[i]);
        return fit_to_dict(rate_fit(series));
      },
      py::arg("k"), py::arg("y"));

  m.def("envelope_lemma25", &envelope_lemma25, py::arg("a1"),
        py::arg("theta"), py::arg("k"));

  py::register_exception<InfeasibleIntersection>(m, "InfeasibleIntersection");
  py::register_exception<DegenerateSeries>(m, "DegenerateSeries");
  py::register_exception<ValidationFailed>(m, "ValidationFailedError");
}
