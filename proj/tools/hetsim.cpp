// Command-line front end: run one algorithm on a scenario, emit the built-in
// fixture files, or run the paired proposed-vs-baselines comparison.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hetsim/baselines.hpp"
#include "hetsim/config_io.hpp"
#include "hetsim/sim.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hetsim::Error("cannot write " + path.string());
  out << content;
}

hetsim::RunParams make_params(const hetsim::ScenarioConfig& cfg, std::uint64_t seed,
                              long subframes, int threads, bool trace) {
  hetsim::RunParams params;
  const int L = cfg.network.superframe_len;
  if (subframes > 0) {
    if (subframes < L)
      throw hetsim::ConfigError("horizon shorter than one super-frame (need >= " +
                                std::to_string(L) + " subframes)");
    params.superframes = static_cast<int>(subframes / L);
  }
  params.seed = seed;
  params.threads = threads;
  params.collect_trace = trace;
  params.profile_refresh = cfg.profile_refresh;
  return params;
}

void write_run_outputs(const fs::path& dir, const hetsim::Scenario& scenario,
                       const hetsim::MetricsReport& report, bool trace) {
  fs::create_directories(dir);
  const std::string tag = report.algorithm;
  write_file(dir / ("metrics_" + tag + ".jsonl"), hetsim::metrics_to_jsonl(report));
  write_file(dir / ("rates_" + tag + ".tsv"), hetsim::rates_to_tsv(report, scenario));
  if (trace) write_file(dir / ("trace_" + tag + ".tsv"), hetsim::trace_to_tsv(report.trace));
}

std::string compare_table(const std::vector<hetsim::MetricsReport>& reports) {
  std::ostringstream out;
  out << "algorithm\tutility\tavg_cell_capacity_mbps\tmacro_i_user_kbps\tpico_i_user_kbps"
         "\tworst10_kbps\toverall_mean_kbps\n";
  for (const auto& r : reports)
    out << r.algorithm << '\t' << r.utility << '\t' << r.avg_cell_capacity_mbps << '\t'
        << r.macro_i_mean_kbps << '\t' << r.pico_i_mean_kbps << '\t' << r.worst10_mean_kbps
        << '\t' << r.overall_mean_kbps << '\n';
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-timescale radio resource management simulator for two-tier networks"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Simulate one algorithm on a scenario");
  std::string run_config;
  std::string run_algorithm = "proposed";
  std::string run_out = "hetsim-out";
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  long run_subframes = 0;
  int run_threads = 1;
  bool run_trace = false;
  run->add_option("--config", run_config, "Scenario config JSON")->required();
  run->add_option("--algorithm", run_algorithm, "proposed|baseline1|baseline2");
  run->add_option("--seed", run_seed, "Override the config seed")->each([&](const std::string&) {
    run_seed_set = true;
  });
  run->add_option("--subframes", run_subframes, "Horizon in subframes (default 50 super-frames)");
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--threads", run_threads, "Concurrent subband evaluations");
  run->add_flag("--trace", run_trace, "Dump the per-subframe decision trace");

  // fixtures
  auto* fixtures = app.add_subcommand("fixtures", "Write the built-in example fixtures");
  std::string fixtures_out = "hetsim-out";
  fixtures->add_option("--out", fixtures_out, "Output directory");

  // compare
  auto* compare = app.add_subcommand("compare", "Run proposed and baselines with a common seed");
  std::string cmp_config;
  std::string cmp_out = "hetsim-out";
  std::uint64_t cmp_seed = 0;
  bool cmp_seed_set = false;
  long cmp_subframes = 0;
  int cmp_threads = 1;
  compare->add_option("--config", cmp_config, "Scenario config JSON (default: built-in scenario)");
  compare->add_option("--seed", cmp_seed, "Common seed")->each([&](const std::string&) {
    cmp_seed_set = true;
  });
  compare->add_option("--subframes", cmp_subframes, "Horizon in subframes");
  compare->add_option("--out", cmp_out, "Output directory");
  compare->add_option("--threads", cmp_threads, "Concurrent subband evaluations");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      hetsim::ScenarioConfig cfg = hetsim::load_scenario_config(run_config);
      if (run_seed_set) cfg.network.seed = run_seed;
      hetsim::Scenario scenario = hetsim::make_scenario(cfg.network);
      scenario.utility = cfg.utility;
      const hetsim::RunParams params =
          make_params(cfg, cfg.network.seed, run_subframes, run_threads, run_trace);
      const hetsim::MetricsReport report =
          hetsim::run_simulation(scenario, hetsim::algorithm_from_name(run_algorithm), params);
      write_run_outputs(run_out, scenario, report, run_trace);
      std::cout << "wrote " << run_out << "/metrics_" << report.algorithm << ".jsonl (utility "
                << report.utility << ", worst-10% " << report.worst10_mean_kbps << " kbps)\n";
    } else if (fixtures->parsed()) {
      fs::create_directories(fixtures_out);
      write_file(fs::path(fixtures_out) / "two_tier.topo", hetsim::fixture_two_tier_text());
      write_file(fs::path(fixtures_out) / "co_tier.topo", hetsim::fixture_co_tier_text());
      write_file(fs::path(fixtures_out) / "scenario.json",
                 hetsim::scenario_config_to_json(hetsim::default_scenario_config()));
      std::cout << "wrote two_tier.topo, co_tier.topo, scenario.json under " << fixtures_out
                << "\n";
    } else if (compare->parsed()) {
      hetsim::ScenarioConfig cfg = cmp_config.empty()
                                       ? hetsim::default_scenario_config()
                                       : hetsim::load_scenario_config(cmp_config);
      if (cmp_seed_set) cfg.network.seed = cmp_seed;
      hetsim::Scenario scenario = hetsim::make_scenario(cfg.network);
      scenario.utility = cfg.utility;
      const hetsim::RunParams params =
          make_params(cfg, cfg.network.seed, cmp_subframes, cmp_threads, false);
      std::vector<hetsim::MetricsReport> reports;
      for (auto algorithm : {hetsim::Algorithm::proposed, hetsim::Algorithm::baseline1,
                             hetsim::Algorithm::baseline2}) {
        reports.push_back(hetsim::run_simulation(scenario, algorithm, params));
        write_run_outputs(cmp_out, scenario, reports.back(), false);
      }
      write_file(fs::path(cmp_out) / "compare.tsv", compare_table(reports));
      std::cout << compare_table(reports);
    }
  } catch (const hetsim::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
