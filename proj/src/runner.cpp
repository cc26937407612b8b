#include "dykls/runner.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace dykls {

namespace {

constexpr double kAscentSlack = 1e-8;

std::int64_t elapsed_ns(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

double duality_gap(const SolverState& state, const Problem& prob,
                   const Reference& ref) {
  double val = 0.0;
  for (int i = 0; i < prob.num_nodes(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Vec x_i = prob.xbar[i] - state.v_H[ui] - state.z_node[ui];
    val += 0.5 * x_i.squaredNorm() + state.conj[ui];
  }
  return val - ref.ref_sum;
}

double h_value(const SolverState& state, const Problem& prob,
               const Reference& ref) {
  return ref.opt_primal - dual_value_cached(state, prob);
}

double primal_error(const SolverState& state, const Problem& prob,
                    const Reference& ref) {
  double err = 0.0;
  for (int i = 0; i < prob.num_nodes(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Vec x_i = prob.xbar[i] - state.v_H[ui] - state.z_node[ui];
    err += 0.5 * (x_i - ref.x_star[i]).squaredNorm();
  }
  return err;
}

RunResult run_solver(const InstanceSpec& inst, const RunOptions& opts) {
  const Problem prob = build_problem(inst);
  const Reference ref = build_reference(inst);
  SolverState state = init_state(prob);
  const auto t0 = std::chrono::steady_clock::now();

  RunResult result;
  auto violation = [&](bool& flag, const std::string& what) {
    if (flag && result.first_violation.empty()) {
      std::ostringstream os;
      os << what << " at n=" << state.n << " w=" << state.w;
      result.first_violation = os.str();
    }
    flag = false;
  };

  double F = dual_value_cached(state, prob);
  double h = ref.opt_primal - F;
  double h_prev = h;

  auto record = [&]() {
    TraceRecord rec{state.n, state.w, F, h,
                    duality_gap(state, prob, ref),
                    primal_error(state, prob, ref), elapsed_ns(t0)};
    if (rec.gap - rec.err < -kAscentSlack)
      violation(result.gap_ge_err_ok, "gap < err");
    result.records.push_back(rec);
    return rec;
  };
  record();

  for (int n = 1; n <= opts.sweeps; ++n) {
    reset_edge_duals(state, prob);
    F = dual_value_cached(state, prob);
    h = ref.opt_primal - F;
    if (h < -kAscentSlack) violation(result.h_ok, "h negative");
    if (h > h_prev + kAscentSlack && std::isfinite(h_prev))
      violation(result.h_ok, "h increased");
    h_prev = h;

    const bool dense = n <= opts.dense_sweeps;
    for (int w = 1; w <= prob.schedule.w_bar; ++w) {
      state.w = w;
      process_block(state, prob,
                    prob.schedule.blocks[static_cast<std::size_t>(w - 1)]);
      const double F_new = dual_value_cached(state, prob);
      if (F_new < F - kAscentSlack)
        violation(result.ascent_ok, "dual ascent violated");
      F = F_new;
      double vA2 = 0.0;
      for (int i = 0; i < prob.num_nodes(); ++i)
        vA2 += state.v_A(i).squaredNorm();
      result.max_vA_norm = std::max(result.max_vA_norm, std::sqrt(vA2));
      if (dense || (w == prob.schedule.w_bar && n % opts.sample_every == 0))
        record();
    }
    state.n = n + 1;
    state.w = 0;
    result.sweeps_done = n;

    const double err_now = primal_error(state, prob, ref);
    const double gap_now = duality_gap(state, prob, ref);
    if (opts.log_every > 0 && n % opts.log_every == 0)
      std::cerr << "sweep " << n << "  F=" << F << "  gap=" << gap_now
                << "  err=" << err_now << "\n";
    if ((opts.stop_err > 0.0 && err_now <= opts.stop_err) ||
        (opts.stop_gap > 0.0 && gap_now <= opts.stop_gap)) {
      break;
    }
  }
  // The final state is always recorded, sampled or not.
  if (result.sweeps_done >= 1 &&
      (result.records.back().n != result.sweeps_done ||
       result.records.back().w != prob.schedule.w_bar)) {
    state.n = result.sweeps_done;
    state.w = prob.schedule.w_bar;
    record();
  }

  const TraceRecord& last = result.records.back();
  result.final_err = last.err;
  result.final_gap = last.gap;
  result.final_F = last.F;
  return result;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& recs) {
  out << "n,w,F,h,gap,err,wall_ns\n";
  char buf[256];
  for (const auto& r : recs) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%.17g,%" PRId64
                  "\n",
                  r.n, r.w, r.F, r.h, r.gap, r.err,
                  static_cast<std::int64_t>(r.wall_ns));
    out << buf;
  }
}

void write_trace_csv_file(const std::string& path,
                          const std::vector<TraceRecord>& recs) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_trace_csv(out, recs);
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::vector<TraceRecord> recs;
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line))
    throw std::runtime_error("empty CSV: missing header");
  ++lineno;
  if (line != "n,w,F,h,gap,err,wall_ns")
    throw std::runtime_error("unexpected CSV header: " + line);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    TraceRecord r;
    std::istringstream ss(line);
    std::string field;
    try {
      auto next = [&]() -> std::string {
        if (!std::getline(ss, field, ',')) throw std::runtime_error("short row");
        return field;
      };
      r.n = std::stoi(next());
      r.w = std::stoi(next());
      r.F = std::stod(next());
      r.h = std::stod(next());
      r.gap = std::stod(next());
      r.err = std::stod(next());
      r.wall_ns = std::stoll(next());
    } catch (const std::exception& e) {
      throw std::runtime_error("CSV parse error at line " +
                               std::to_string(lineno) + ": " + e.what());
    }
    recs.push_back(r);
  }
  return recs;
}

std::vector<TraceRecord> read_trace_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_trace_csv(in);
}

std::vector<std::pair<double, double>> sweep_series(
    const std::vector<TraceRecord>& recs, const std::string& field) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const bool last_of_sweep =
        i + 1 == recs.size() || recs[i + 1].n != recs[i].n;
    if (!last_of_sweep) continue;
    double y;
    if (field == "gap")
      y = recs[i].gap;
    else if (field == "err")
      y = recs[i].err;
    else if (field == "h")
      y = recs[i].h;
    else if (field == "F")
      y = recs[i].F;
    else
      throw std::invalid_argument("unknown trace field: " + field);
    out.emplace_back(static_cast<double>(recs[i].n), y);
  }
  return out;
}

}  // namespace dykls
