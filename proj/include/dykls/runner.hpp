#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dykls/diagnostics.hpp"
#include "dykls/experiments.hpp"
#include "dykls/solver.hpp"

namespace dykls {

struct RunOptions {
  int sweeps = 2000;
  /// Record every block while n <= 100, then the last block of every
  /// sample_every-th sweep.
  int sample_every = 1;
  int dense_sweeps = 100;
  /// Stop early when the per-sweep error or gap falls to the target
  /// (negative disables).
  double stop_err = -1.0;
  double stop_gap = -1.0;
  int log_every = 0;  // stderr progress; 0 silent
};

struct RunResult {
  std::vector<TraceRecord> records;
  bool ascent_ok = true;
  bool gap_ge_err_ok = true;
  bool h_ok = true;
  std::string first_violation;
  int sweeps_done = 0;
  double final_err = 0.0;
  double final_gap = 0.0;
  double final_F = 0.0;
  double max_vA_norm = 0.0;
};

/// The displayed duality gap:
///   1/2|x|^2 + sum_i f*_{i,n,w}(z_i) - [1/2|x*|^2 + sum_i f_i*(z_i*)].
double duality_gap(const SolverState& state, const Problem& prob,
                   const Reference& ref);

/// h = F(z*) - F^{n,0}, nonnegative by optimality.
double h_value(const SolverState& state, const Problem& prob,
               const Reference& ref);

/// Squared primal error 1/2|x - x*|^2 in the product norm.
double primal_error(const SolverState& state, const Problem& prob,
                    const Reference& ref);

/// Full sweep loop with per-block ascent checks and trace recording.
RunResult run_solver(const InstanceSpec& inst, const RunOptions& opts);

/// CSV with header n,w,F,h,gap,err,wall_ns at 17 significant digits.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& recs);
void write_trace_csv_file(const std::string& path,
                          const std::vector<TraceRecord>& recs);
std::vector<TraceRecord> read_trace_csv(std::istream& in);
std::vector<TraceRecord> read_trace_csv_file(const std::string& path);

/// Per-sweep series extracted from a trace: the last record of each sweep for
/// gap/err, the per-sweep h. Keys are sweep indices as doubles.
std::vector<std::pair<double, double>> sweep_series(
    const std::vector<TraceRecord>& recs, const std::string& field);

}  // namespace dykls
