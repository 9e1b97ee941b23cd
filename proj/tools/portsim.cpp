// portsim: command-line front end for the port ticketing microsimulation.
//
// Exit codes: 0 success, 1 validation/check failure, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "portsim/engine.hpp"
#include "portsim/experiments.hpp"
#include "portsim/invariants.hpp"
#include "portsim/metrics.hpp"
#include "portsim/report.hpp"
#include "portsim/scenario.hpp"
#include "portsim/stochastic.hpp"

namespace fs = std::filesystem;
using namespace portsim;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ScenarioSpec load_scenario(const std::string& preset_name, const std::string& scenario_file) {
  if (preset_name.empty() == scenario_file.empty())
    throw UsageError("exactly one of --preset or --scenario is required");
  ScenarioSpec spec;
  if (!preset_name.empty()) {
    try {
      spec = preset(preset_name);
    } catch (const ScenarioError& e) {
      throw UsageError(e.what());
    }
  } else {
    std::ifstream in(scenario_file, std::ios::binary);
    if (!in) throw UsageError("cannot read scenario file '" + scenario_file + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      spec = parse_scenario(buf.str());
    } catch (const ParseError& e) {
      throw ValidationFailure(scenario_file + ": " + e.what());
    }
  }
  if (const auto violations = validate(spec); !violations.empty()) {
    std::string msg = "scenario '" + spec.label + "' is invalid:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ValidationFailure(msg);
  }
  return spec;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("PORTSIM_SEED");
  if (!env || !*env) return 1;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("PORTSIM_SEED is not an unsigned integer: '") + env + "'");
  }
}

std::vector<std::uint64_t> seeds_from(const std::string& text) {
  try {
    return parse_seed_list(text);
  } catch (const ExperimentError& e) {
    throw UsageError(e.what());
  }
}

fs::path prepare_out(const std::string& dir) {
  fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw UsageError("cannot create output directory '" + dir + "': " + ec.message());
  return out;
}

report::PlotSeries bin_series(std::string name, const BinSeries& bins) {
  report::PlotSeries s{std::move(name), {}, {}};
  for (const BinRow& b : bins.bins) {
    s.x.push_back(b.bin_start_s);
    s.y.push_back(b.mean_trip_s);
  }
  return s;
}

struct RunArgs {
  std::string preset_name, scenario_file, out, queue, bin_key = "arrival";
  std::optional<std::uint64_t> seed;
  double bin_width = 400.0;
  bool plot = false;
};

int cmd_run(const RunArgs& a) {
  const ScenarioSpec spec = load_scenario(a.preset_name, a.scenario_file);
  const std::uint64_t seed = a.seed ? *a.seed : default_seed();
  const fs::path out = prepare_out(a.out);

  const RunResult result = run(spec, seed);
  std::vector<QueueSample> queue;
  if (!a.queue.empty()) {
    try {
      queue = queue_series(result, a.queue);
    } catch (const MetricsError& e) {
      throw UsageError(e.what());
    }
  }
  const RunSummary summary = summarize_run(result);
  const BinSeries bins =
      bin_means(result.trips, a.bin_width, a.bin_key == "exit" ? BinKey::Exit : BinKey::ScheduledArrival);

  report::write_file_atomic(out / "trips.csv", report::trips_csv(result.trips));
  report::write_file_atomic(out / "bins.csv", report::bins_csv(bins));
  report::write_file_atomic(out / "summary.csv", report::summary_csv(std::span(&summary, 1)));
  if (!a.queue.empty()) report::write_file_atomic(out / "queue.csv", report::queue_csv(queue));
  if (a.plot) {
    const std::vector<report::PlotSeries> series{bin_series(spec.label, bins)};
    report::write_file_atomic(out / "bins.svg",
                              report::polyline_svg("Mean trip time per bin", "time (s)", "mean trip (s)", series));
    if (!a.queue.empty()) {
      report::PlotSeries q{a.queue, {}, {}};
      for (const QueueSample& s : queue) {
        q.x.push_back(s.time_s);
        q.y.push_back(s.occupancy_pce);
      }
      const std::vector<report::PlotSeries> qs{q};
      report::write_file_atomic(out / "queue.svg", report::polyline_svg("Occupancy", "time (s)", "PCE", qs));
    }
  }

  std::cout << spec.label << " seed " << seed << ": " << summary.n_vehicles << " vehicles, mean trip "
            << report::format_number(summary.mean_trip_s) << " s, p95 " << report::format_number(summary.p95_trip_s)
            << " s, " << result.event_count << " events\n";
  return kOk;
}

struct SweepArgs {
  std::string preset_name, scenario_file, out, seeds = "1..20";
  std::vector<double> fractions{0.0, 0.1, 0.2, 0.3};
  bool plot = false;
  bool serial = false;
};

int cmd_sweep(SweepArgs a) {
  if (a.preset_name.empty() && a.scenario_file.empty()) a.preset_name = "opt1_p10";
  bool has_zero = false;
  for (double f : a.fractions) has_zero = has_zero || f == 0.0;
  if (!has_zero) throw UsageError("--fractions must include 0 (the baseline row)");
  const ScenarioSpec base = load_scenario(a.preset_name, a.scenario_file);
  const auto seeds = seeds_from(a.seeds);
  const fs::path out = prepare_out(a.out);

  SweepResult sweep;
  try {
    sweep = sweep_adoption(base, a.fractions, seeds, a.serial ? Execution::Serial : Execution::Parallel);
  } catch (const ExperimentError& e) {
    throw ValidationFailure(e.what());
  }

  std::vector<RunSummary> all;
  for (const SweepRow& r : sweep.rows) all.insert(all.end(), r.runs.summaries.begin(), r.runs.summaries.end());
  report::write_file_atomic(out / "sweep.csv", report::sweep_csv(sweep));
  report::write_file_atomic(out / "sweep_bins.csv", report::sweep_bins_csv(sweep));
  report::write_file_atomic(out / "summary.csv", report::summary_csv(all));
  if (a.plot) {
    std::vector<report::PlotSeries> series;
    for (const SweepRow& r : sweep.rows) series.push_back(bin_series(report::format_number(r.fraction), r.runs.bins));
    report::write_file_atomic(out / "sweep.svg", report::polyline_svg("Mean trip time by adoption fraction",
                                                                      "time (s)", "mean trip (s)", series));
  }

  for (const SweepRow& r : sweep.rows)
    std::cout << r.scenario << ": mean " << report::format_number(r.runs.stats.mean_of_means_s) << " s, sd "
              << report::format_number(r.runs.stats.sd_of_means_s) << " s, advantage "
              << report::format_number(r.advantage_s) << " s\n";
  return kOk;
}

struct ValidateArgs {
  std::string check;
  double rho = 0.7;
  std::size_t n = 200000;
  std::string seeds;
};

int cmd_validate(const ValidateArgs& a) {
  if (a.check == "mg1") {
    const ServiceTimeSpec service;
    if (!(a.rho > 0 && a.rho < 1)) throw UsageError("--rho must be in (0, 1)");
    const auto seeds = seeds_from(a.seeds.empty() ? "1..5" : a.seeds);
    const double rate = a.rho / truncated_normal_mean(service);
    const Mg1Report r = validate_mg1(rate, service, a.n, seeds);
    const bool pass = r.relative_error <= 0.10;
    std::cout << "M/G/1 rho=" << report::format_number(r.rho) << " E[S]=" << report::format_number(r.mean_service_s)
              << " E[S^2]=" << report::format_number(r.second_moment_s2) << "\n"
              << "  analytic Wq  " << report::format_number(r.analytic_wq_s) << " s\n"
              << "  simulated Wq " << report::format_number(r.simulated_wq_s) << " s over " << r.measured_vehicles
              << " vehicles\n"
              << "  relative error " << report::format_number(r.relative_error) << (pass ? "  PASS" : "  FAIL")
              << "\n";
    return pass ? kOk : kFailure;
  }
  if (a.check == "invariants") {
    const auto seeds = seeds_from(a.seeds.empty() ? "1..20" : a.seeds);
    const InvariantSuiteReport r = check_presets(seeds);
    for (const auto& v : r.violations) std::cerr << v << "\n";
    std::cout << "invariants: " << r.runs << " runs, " << r.violations.size() << " violations"
              << (r.ok() ? "  PASS" : "  FAIL") << "\n";
    return r.ok() ? kOk : kFailure;
  }
  throw UsageError("unknown check '" + a.check + "' (expected mg1 or invariants)");
}

int cmd_figures(const std::string& seeds_text, const std::string& dir, bool plot, bool serial) {
  const auto seeds = seeds_from(seeds_text);
  const fs::path out = prepare_out(dir);
  const Figures fig = reproduce_figures(seeds, serial ? Execution::Serial : Execution::Parallel);
  report::write_file_atomic(out / "fig2.csv", report::fig2_csv(fig.fig2));
  report::write_file_atomic(out / "fig3.csv", report::fig3_csv(fig.fig3));
  report::write_file_atomic(out / "fig4.csv", report::fig4_csv(fig.fig4));
  if (plot) {
    std::vector<report::PlotSeries> series;
    for (const Fig2Row& r : fig.fig2) {
      const std::string name = report::format_number(r.fraction);
      if (series.empty() || series.back().name != name) series.push_back({name, {}, {}});
      series.back().x.push_back(r.bin_start_s);
      series.back().y.push_back(r.mean_trip_s);
    }
    report::write_file_atomic(out / "fig2.svg", report::polyline_svg("Mean trip time, 400 s bins", "time (s)",
                                                                     "mean trip (s)", series));
  }
  for (const Fig4Row& r : fig.fig4)
    std::cout << r.scenario << ": mean " << report::format_number(r.stats.mean_of_means_s) << " s, sd "
              << report::format_number(r.stats.sd_of_means_s) << " s, advantage "
              << report::format_number(r.advantage_s) << " s\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Port ticketing complex microsimulation"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario with one seed");
  run_cmd->add_option("--preset", run_args.preset_name, "Catalog scenario name");
  run_cmd->add_option("--scenario", run_args.scenario_file, "Scenario document")->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", run_args.seed, "Random seed (default: $PORTSIM_SEED or 1)");
  run_cmd->add_option("--out", run_args.out, "Output directory")->required();
  run_cmd->add_option("--queue", run_args.queue, "Element whose occupancy series goes to queue.csv");
  run_cmd->add_option("--bin-width", run_args.bin_width, "Bin width in seconds")->check(CLI::PositiveNumber);
  run_cmd->add_option("--bin-key", run_args.bin_key, "Bin trips by arrival or exit time")
      ->check(CLI::IsMember({"arrival", "exit"}));
  run_cmd->add_flag("--plot", run_args.plot, "Also write SVG charts");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Adoption-fraction sweep over several seeds");
  sweep_cmd->add_option("--preset", sweep_args.preset_name, "Base scenario (default opt1_p10)");
  sweep_cmd->add_option("--scenario", sweep_args.scenario_file, "Base scenario document")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--fractions", sweep_args.fractions, "Comma-separated fractions, must include 0")
      ->delimiter(',');
  sweep_cmd->add_option("--seeds", sweep_args.seeds, "Seeds, e.g. 1..20 or 1,5,9");
  sweep_cmd->add_option("--out", sweep_args.out, "Output directory")->required();
  sweep_cmd->add_flag("--plot", sweep_args.plot, "Also write sweep.svg");
  sweep_cmd->add_flag("--serial", sweep_args.serial, "Run replications on one thread");

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "Analytic and invariant checks");
  validate_cmd->add_option("--check", validate_args.check, "mg1 | invariants")->required();
  validate_cmd->add_option("--rho", validate_args.rho, "Utilization for the M/G/1 check");
  validate_cmd->add_option("--n", validate_args.n, "Vehicles per seed for the M/G/1 check");
  validate_cmd->add_option("--seeds", validate_args.seeds, "Seeds (mg1 default 1..5, invariants default 1..20)");

  std::string fig_seeds = "1..20", fig_out;
  bool fig_plot = false, fig_serial = false;
  auto* fig_cmd = app.add_subcommand("figures", "Tables mirroring the adoption and kiosk-count comparisons");
  fig_cmd->add_option("--seeds", fig_seeds, "Seeds, e.g. 1..20");
  fig_cmd->add_option("--out", fig_out, "Output directory")->required();
  fig_cmd->add_flag("--plot", fig_plot, "Also write fig2.svg");
  fig_cmd->add_flag("--serial", fig_serial, "Run replications on one thread");

  std::string show_preset;
  auto* show_cmd = app.add_subcommand("show", "Print a preset as a scenario document");
  show_cmd->add_option("--preset", show_preset, "Catalog scenario name")->required();

  auto* presets_cmd = app.add_subcommand("presets", "List catalog scenario names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_args);
    if (*sweep_cmd) return cmd_sweep(sweep_args);
    if (*validate_cmd) return cmd_validate(validate_args);
    if (*fig_cmd) return cmd_figures(fig_seeds, fig_out, fig_plot, fig_serial);
    if (*show_cmd) {
      try {
        std::cout << serialize_scenario(preset(show_preset));
      } catch (const ScenarioError& e) {
        throw UsageError(e.what());
      }
      return kOk;
    }
    if (*presets_cmd) {
      for (const auto& name : preset_names()) std::cout << name << "\n";
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
