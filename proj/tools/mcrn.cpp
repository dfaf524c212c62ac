#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "mcrn/config.hpp"
#include "mcrn/experiments.hpp"
#include "mcrn/svg.hpp"
#include "mcrn/validation.hpp"

namespace fs = std::filesystem;
using namespace mcrn;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::optional<int> threads;
  std::string out;
  bool plot = false;
};

struct MissingConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExperimentConfig resolve(const Options& o) {
  ExperimentConfig cfg = ExperimentConfig::paper_defaults();
  if (!o.config.empty()) {
    if (!fs::exists(o.config)) throw MissingConfig("config file not found: " + o.config);
    cfg = load_config(o.config);
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.replicates) cfg.n_replicates = *o.replicates;
  if (o.threads) cfg.threads = *o.threads;
  if (!o.out.empty()) cfg.output_dir = o.out;
  cfg.validate();
  return cfg;
}

std::ofstream open_output(const ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  const fs::path p = cfg.output_dir / name;
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  std::cout << "wrote " << p.string() << '\n';
  return out;
}

void plot_curves(const ExperimentConfig& cfg, const std::vector<CurveRow>& rows, const std::string& name,
                 const std::string& title, const std::string& x_label) {
  std::map<std::string, Series> ber, map;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (!ber.count(r.scenario)) {
      order.push_back(r.scenario);
      ber[r.scenario].label = r.scenario;
      map[r.scenario].label = r.scenario + " MAP";
      map[r.scenario].dashed = true;
    }
    ber[r.scenario].x.push_back(r.index);
    ber[r.scenario].y.push_back(r.mean_ber);
    map[r.scenario].x.push_back(r.index);
    map[r.scenario].y.push_back(r.map_ber);
  }
  std::vector<Series> series;
  for (const auto& s : order) series.push_back(ber[s]);
  for (const auto& s : order) series.push_back(map[s]);
  auto out = open_output(cfg, name);
  write_svg_chart(out, series, {title, x_label, "BER", true});
}

int cmd_map_reference(const ExperimentConfig& cfg) {
  const auto rows = map_reference(cfg);
  fmt::print("{:<12} {:>4} {:>10} {:>8} {:>8} {:>4} {:>12}\n", "scenario", "N_r", "c_noise", "p0", "p1", "nu", "map_ber");
  for (const auto& r : rows) {
    fmt::print("{:<12} {:>4} {:>10.3g} {:>8.5f} {:>8.5f} {:>4} {:>12.6g}\n", r.scenario, r.n_receptors, r.c_noise, r.p0,
               r.p1, r.nu, r.map_ber);
  }
  auto out = open_output(cfg, "map_reference.csv");
  write_map_reference_csv(out, rows);
  return 0;
}

int cmd_train_bm(const ExperimentConfig& cfg, bool plot) {
  const Fig2Result res = fig2_experiment(cfg);
  {
    auto out = open_output(cfg, "fig2.csv");
    write_curve_csv(out, res.rows, "step");
  }
  const fs::path dir = cfg.output_dir / "bms";
  fs::create_directories(dir);
  for (std::size_t s = 0; s < res.final_bms.size(); ++s) {
    for (std::size_t r = 0; r < res.final_bms[s].size(); ++r) {
      std::ofstream f(dir / fmt::format("{}_r{:02}.fvbm", cfg.scenarios[s].name, r));
      write_fvbm(f, res.final_bms[s][r]);
    }
  }
  std::cout << "wrote " << dir.string() << '\n';
  if (plot) plot_curves(cfg, res.rows, "fig2.svg", "BM training", "training step");
  return 0;
}

int cmd_run_ber(const ExperimentConfig& cfg) {
  const auto rows = run_ber_experiment(cfg);
  for (const auto& r : rows) {
    fmt::print("{:<12} {:<11} ber={:.6g}{} symbols={} errors={} map={:.6g}\n", r.scenario, r.detector, r.result.ber,
               r.result.upper_bound ? " (upper bound)" : "", r.result.symbols, r.result.errors, r.map_ber);
  }
  auto out = open_output(cfg, "run_ber.csv");
  write_run_ber_csv(out, rows);
  return 0;
}

int cmd_online_learn(const ExperimentConfig& cfg, bool plot) {
  const Fig3Result res = fig3_experiment(cfg);
  {
    auto out = open_output(cfg, "fig3.csv");
    write_curve_csv(out, res.rows, "pilot");
  }
  {
    auto out = open_output(cfg, "nw_trajectory.csv");
    write_nw_trajectory_csv(out, cfg.scenarios, res.mean_n_w_on);
  }
  for (std::size_t s = 0; s < cfg.scenarios.size(); ++s) {
    fmt::print("{:<12} nu={:<3} final mean n_w_on={:.3f} final mean ber={:.6g} map={:.6g}\n", cfg.scenarios[s].name,
               res.nu[s], res.mean_n_w_on[s].back(), res.mean_ber[s].back(), res.map_ber[s]);
  }
  if (plot) plot_curves(cfg, res.rows, "fig3.svg", "Online learning", "pilot symbols");
  return 0;
}

int cmd_time_variant(const ExperimentConfig& cfg, bool plot) {
  const auto rows = fig4_experiment(cfg);
  {
    auto out = open_output(cfg, "fig4.csv");
    write_fig4_csv(out, rows);
  }
  if (plot) {
    Series mean{"mean n_w_on", {}, {}, false}, lo{"min", {}, {}, true}, hi{"max", {}, {}, true},
        nu{"optimal nu", {}, {}, true};
    for (const auto& r : rows) {
      for (Series* s : {&mean, &lo, &hi, &nu}) s->x.push_back(r.pilot);
      mean.y.push_back(r.mean_nw);
      lo.y.push_back(r.min_nw);
      hi.y.push_back(r.max_nw);
      nu.y.push_back(r.opt_nu);
    }
    auto out = open_output(cfg, "fig4.svg");
    write_svg_chart(out, {mean, lo, hi, nu}, {"Time-variant noise", "pilot symbols", "n_w_on", false});
  }
  return 0;
}

int cmd_validate(const ExperimentConfig& cfg) {
  bool ok = true;
  for (const auto& c : run_core_invariants(cfg.seed, cfg.threads)) {
    fmt::print("{} {}: {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Molecular communication detectors built from chemical reaction networks"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON experiment config");
    sub->add_option("--seed", opt.seed, "Master RNG seed");
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--replicates", opt.replicates, "Replicates per scenario")->check(CLI::PositiveNumber);
    sub->add_option("--threads", opt.threads, "Worker threads (0 = hardware concurrency)");
    sub->add_flag("--plot", opt.plot, "Also write SVG charts");
  };
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"map-reference", "Print the optimal threshold and analytic MAP BER per scenario"},
      {"train-bm", "Train Boltzmann machines and record BER per training step"},
      {"run-ber", "Monte-Carlo BER of the configured detector"},
      {"online-learn", "Pilot-driven learning of the low-complexity detector"},
      {"time-variant", "Track the noise-switching schedule with online learning"},
      {"validate", "Run the invariant suite"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help));
  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = resolve(opt);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "map-reference") return cmd_map_reference(cfg);
    if (cmd == "train-bm") return cmd_train_bm(cfg, opt.plot);
    if (cmd == "run-ber") return cmd_run_ber(cfg);
    if (cmd == "online-learn") return cmd_online_learn(cfg, opt.plot);
    if (cmd == "time-variant") return cmd_time_variant(cfg, opt.plot);
    return cmd_validate(cfg);
  } catch (const MissingConfig& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error at " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
