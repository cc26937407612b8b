#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "dykls/experiments.hpp"
#include "dykls/oneset.hpp"
#include "dykls/runner.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using namespace dykls;

namespace {

// Exit codes for in-run invariant violations; 0 means all held.
constexpr int kExitAscent = 10;
constexpr int kExitGapErr = 11;
constexpr int kExitH = 12;

int log_every_from_env() {
  const char* v = std::getenv("DYKSTRA_LOG");
  if (v == nullptr) return 0;
  const int n = std::atoi(v);
  return n > 0 ? n : 0;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

std::vector<std::string> parse_str_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

struct Cell {
  int preset;
  Treatment treatment;
  std::uint64_t seed;
};

int run_command(const std::string& instance_path, const std::string& presets,
                const std::string& treatments, const std::string& seeds,
                int sweeps, int sample_every, double stop_err, double stop_gap,
                const std::string& out, int jobs, int m, int nodes) {
  RunOptions opts;
  opts.sweeps = sweeps;
  opts.sample_every = sample_every;
  opts.stop_err = stop_err;
  opts.stop_gap = stop_gap;
  opts.log_every = log_every_from_env();

  std::vector<std::pair<InstanceSpec, std::string>> work;  // instance, csv path
  if (!instance_path.empty()) {
    std::ifstream in(instance_path, std::ios::binary);
    if (!in) {
      std::cerr << "cannot open instance file: " << instance_path << "\n";
      return 1;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    InstanceSpec inst = instance_from_json(buf.str());
    ensure_valid(inst);
    work.emplace_back(std::move(inst), out);
  } else {
    std::vector<Cell> cells;
    for (int p : parse_int_list(presets))
      for (const auto& t : parse_str_list(treatments))
        for (int s : parse_int_list(seeds))
          cells.push_back({p, treatment_from_name(t),
                           static_cast<std::uint64_t>(s)});
    const bool multi = cells.size() > 1;
    if (multi && !out.empty()) fs::create_directories(out);
    for (const auto& c : cells) {
      std::string path = out;
      if (multi && !out.empty()) {
        std::ostringstream name;
        name << "preset" << c.preset << "_" << treatment_name(c.treatment)
             << "_seed" << c.seed << ".csv";
        path = (fs::path(out) / name.str()).string();
      }
      work.emplace_back(generate_instance(c.preset, c.treatment, c.seed, m,
                                          nodes),
                        path);
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<int> exit_code{0};
  std::mutex io_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= work.size()) return;
      const auto& [inst, path] = work[idx];
      try {
        const RunResult res = run_solver(inst, opts);
        if (path.empty()) {
          std::lock_guard<std::mutex> lock(io_mutex);
          write_trace_csv(std::cout, res.records);
        } else {
          write_trace_csv_file(path, res.records);
        }
        int code = 0;
        if (!res.ascent_ok) code = kExitAscent;
        else if (!res.gap_ge_err_ok) code = kExitGapErr;
        else if (!res.h_ok) code = kExitH;
        if (code != 0) {
          std::lock_guard<std::mutex> lock(io_mutex);
          std::cerr << "invariant violation (" << res.first_violation
                    << ") preset " << inst.preset << " seed " << inst.seed
                    << "\n";
          int expected = 0;
          exit_code.compare_exchange_strong(expected, code);
        }
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "run preset=" << inst.preset << " seed=" << inst.seed
                  << " sweeps=" << res.sweeps_done
                  << " final_gap=" << res.final_gap
                  << " final_err=" << res.final_err << "\n";
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "run failed (" << path << "): " << e.what() << "\n";
        int expected = 0;
        exit_code.compare_exchange_strong(expected, 1);
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(work.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return exit_code.load();
}

int rates_command(const std::string& csv, const std::string& series_list) {
  std::vector<TraceRecord> recs;
  {
    std::ifstream in(csv, std::ios::binary);
    if (!in) {
      std::cerr << "cannot open: " << csv << "\n";
      return 1;
    }
    if (in.peek() == std::ifstream::traits_type::eof())
      throw DegenerateSeries("empty CSV");
    recs = read_trace_csv(in);
  }
  if (recs.empty()) throw DegenerateSeries("CSV has no data rows");
  for (const auto& name : parse_str_list(series_list)) {
    const auto series = positive_prefix(sweep_series(recs, name));
    std::cout << "series " << name << ": sweeps=" << series.size() << "\n";
    try {
      const RateReport rep = rate_fit(series);
      auto line = [&](const char* label, const RateFit& f) {
        std::printf("  %-10s slope=% .6g  r2=%.6f\n", label, f.slope, f.r2);
      };
      line("geometric", rep.geometric);
      line("O(1/k)", rep.inv_linear);
      line("O(1/k^2)", rep.inv_sqrt);
      line("power", rep.power);
      std::cout << "  best: " << rate_model_name(rep.best)
                << " (tail " << rep.tail_points << " points)\n";
    } catch (const DegenerateSeries& e) {
      std::cout << "  degenerate series: " << e.what() << "\n";
    }
  }
  return 0;
}

int oneset_command(bool lss, std::uint64_t seed, int m, double dist,
                   int max_iter, double tol, const std::string& out) {
  LevelFn g = LevelFn(Quadratic(2.0 * Mat::Identity(m, m), Vec::Zero(m),
                                -1.0));  // unit ball
  Vec xbar = Vec::Zero(m);
  xbar[0] = dist;
  if (lss) {
    OneSetInstance inst = generate_oneset_lss(seed, m);
    g = LevelFn(std::move(inst.g));
    xbar = std::move(inst.xbar);
  }
  const Vec proj = oracle_project_levelset(g, xbar);
  const double dbar2 = (xbar - proj).squaredNorm();
  const OneSetResult res = oneset_run(g, xbar, max_iter, tol);

  std::ostringstream os;
  os << "k,d2,g,v\n";
  char buf[160];
  for (const auto& t : res.trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", t.k, t.d2, t.g,
                  dbar2 - t.d2);
    os << buf;
  }
  if (out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) {
      std::cerr << "cannot open for writing: " << out << "\n";
      return 1;
    }
    f << os.str();
  }
  std::cerr << (res.converged ? "converged" : "max_iter reached")
            << " after " << res.iters << " iterations, d2=" << dbar2 << "\n";
  return res.converged || max_iter == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual block-coordinate solvers for best approximation onto "
               "level sets, with consensus-graph sweeps"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance file");
  int g_preset = 1, g_m = 10, g_nodes = 5;
  std::string g_treatment = "prox", g_out;
  std::uint64_t g_seed = 0;
  gen->add_option("--preset", g_preset)->check(CLI::Range(1, 4))->required();
  gen->add_option("--treatment", g_treatment)
      ->check(CLI::IsMember({"prox", "subgrad"}));
  gen->add_option("--seed", g_seed)->required();
  gen->add_option("--out", g_out)->required();
  gen->add_option("--m", g_m)->check(CLI::PositiveNumber);
  gen->add_option("--nodes", g_nodes)->check(CLI::Range(3, 1000));

  // run
  auto* run = app.add_subcommand("run", "run the distributed sweep solver");
  std::string r_instance, r_presets = "1", r_treatments = "prox",
              r_seeds = "0", r_out;
  int r_sweeps = 2000, r_sample = 1, r_jobs = 1, r_m = 10, r_nodes = 5;
  double r_stop_err = -1.0, r_stop_gap = -1.0;
  run->add_option("--instance", r_instance);
  run->add_option("--preset", r_presets);
  run->add_option("--treatment", r_treatments);
  run->add_option("--seed", r_seeds);
  run->add_option("--sweeps", r_sweeps)->check(CLI::PositiveNumber);
  run->add_option("--sample-every", r_sample)->check(CLI::PositiveNumber);
  run->add_option("--stop-err", r_stop_err);
  run->add_option("--stop-gap", r_stop_gap);
  run->add_option("--out", r_out);
  run->add_option("--jobs", r_jobs)->check(CLI::PositiveNumber);
  run->add_option("--m", r_m)->check(CLI::PositiveNumber);
  run->add_option("--nodes", r_nodes)->check(CLI::Range(3, 1000));

  // oneset
  auto* one = app.add_subcommand("oneset", "single-set outer approximation");
  bool o_lss = false;
  std::uint64_t o_seed = 0;
  int o_m = 10, o_maxiter = 2000;
  double o_dist = 2.0, o_tol = 1e-10;
  one->add_flag("--lss", o_lss, "generated smooth level set; default is the unit ball");
  one->add_option("--seed", o_seed);
  one->add_option("--m", o_m)->check(CLI::PositiveNumber);
  one->add_option("--dist", o_dist);
  one->add_option("--max-iter", o_maxiter)->check(CLI::NonNegativeNumber);
  one->add_option("--tol", o_tol);
  std::string o_out;
  one->add_option("--out", o_out);

  // rates
  auto* rates = app.add_subcommand("rates", "fit rate models to a trace CSV");
  std::string f_csv, f_series = "gap,err,h";
  rates->add_option("--csv", f_csv)->required();
  rates->add_option("--series", f_series);

  // plot
  auto* plot = app.add_subcommand("plot", "render a trace CSV as static SVG");
  std::string p_csv, p_out;
  plot->add_option("--csv", p_csv)->required();
  plot->add_option("--out", p_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const InstanceSpec inst = generate_instance(
          g_preset, treatment_from_name(g_treatment), g_seed, g_m, g_nodes);
      const ValidationReport rep = validate_instance(inst);
      std::ofstream out(g_out, std::ios::binary);
      if (!out) {
        std::cerr << "cannot open for writing: " << g_out << "\n";
        return 1;
      }
      out << instance_to_json(inst);
      if (rep.ok) {
        std::cerr << "instance valid: preset " << g_preset << ", "
                  << g_treatment << ", seed " << g_seed << "\n";
        return 0;
      }
      for (const auto& fmsg : rep.failures) std::cerr << "check failed: " << fmsg << "\n";
      return 4;
    }
    if (run->parsed())
      return run_command(r_instance, r_presets, r_treatments, r_seeds,
                         r_sweeps, r_sample, r_stop_err, r_stop_gap, r_out,
                         r_jobs, r_m, r_nodes);
    if (one->parsed())
      return oneset_command(o_lss, o_seed, o_m, o_dist, o_maxiter, o_tol,
                            o_out);
    if (rates->parsed()) return rates_command(f_csv, f_series);
    if (plot->parsed()) {
      write_plot_svg(p_out, read_trace_csv_file(p_csv));
      return 0;
    }
  } catch (const DegenerateSeries& e) {
    std::cerr << "degenerate series: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
