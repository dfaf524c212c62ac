#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <map>
#include <sstream>

#include "doctest.h"
#include "mcrn/experiments.hpp"

using namespace mcrn;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg = ExperimentConfig::paper_defaults();
  cfg.scenarios.resize(2);
  cfg.n_replicates = 4;
  cfg.training.n_steps = 100;
  cfg.training.n_data_samples = 2000;
  cfg.training.n_gibbs_samples = 2000;
  cfg.eval_every = 25;
  cfg.max_errors = 50;
  cfg.symbol_cap = 200000;
  cfg.online.n_pilots = 200;
  return cfg;
}

std::string header(const std::string& csv) { return csv.substr(0, csv.find('\n')); }

}  // namespace

TEST_CASE("BER harness edge cases") {
  const ChannelParams clean{0.0, 1.5e20, 2e-19, 20, 50};
  Rng rng(1);
  const auto perfect = run_ber([](const ReceptorObservation& y, Rng&) { return symbol_from_bit(y.n_bound() > 0); },
                               clean, 100, 10000, rng);
  CHECK(perfect.ber == 0.0);
  CHECK(perfect.upper_bound);
  CHECK(perfect.symbols == 10000);

  const auto wrong = run_ber([](const ReceptorObservation& y, Rng&) { return symbol_from_bit(y.n_bound() == 0); },
                             clean, 100, 10000, rng);
  CHECK(wrong.ber == 1.0);
  CHECK(wrong.symbols == 100);
  CHECK_FALSE(wrong.upper_bound);
}

TEST_CASE("Monte-Carlo BER of the oracle threshold") {
  const auto sc = ExperimentConfig::paper_defaults().scenarios[0];
  const auto model = LikelihoodModel::from_channel(sc.channel);
  const Detector det = make_detector({DetectorKind::Threshold}, {}, sc.channel);
  Rng rng = Rng::derive(3, {1});
  const auto res = run_ber(det, sc.channel, 1L << 40, 200000, rng);
  const double exact = analytic_ber(model, optimal_threshold(model));
  CHECK(std::abs(res.ber - exact) <= 3 * std::sqrt(exact * (1 - exact) / res.symbols));
}

TEST_CASE("detector factory") {
  const auto sc = ExperimentConfig::paper_defaults().scenarios[0];
  const Detector thr = make_detector({DetectorKind::Threshold}, {}, sc.channel);
  const Detector bm = make_detector({DetectorKind::MapBm}, {}, sc.channel);
  const Detector lc = make_detector({DetectorKind::LcCrn, 1.0, 0, 1.0, 1.0, 0.5}, {}, sc.channel);
  Rng rng(2), scratch(3);
  for (int k = 0; k < 2000; ++k) {
    ReceptorObservation y;
    y.resample(30, 0.4, rng);
    REQUIRE(thr(y, scratch) == bm(y, scratch));
  }
  for (int n : {0, 5, 24, 30}) {
    CHECK(lc(ReceptorObservation::with_bound(30, n), scratch) == detect({13}, n));
  }
  CHECK_THROWS_AS(make_detector({DetectorKind::LcCrn, 1.0, 0, 1.0, 1.0, 3.0}, {}, sc.channel), std::invalid_argument);
  const Detector taylor = make_detector({DetectorKind::TaylorCrn}, {}, sc.channel);
  CHECK(taylor(ReceptorObservation::with_bound(30, 30), scratch) == Symbol::One);
  CHECK(taylor(ReceptorObservation::with_bound(30, 0), scratch) == Symbol::Zero);
}

TEST_CASE("map reference table") {
  const auto rows = map_reference(ExperimentConfig::paper_defaults());
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].nu == 13);
  CHECK(rows[1].nu == 10);
  CHECK(rows[2].nu == 21);
  CHECK(rows[3].nu == 16);
  std::ostringstream out;
  write_map_reference_csv(out, rows);
  CHECK(header(out.str()) == "scenario,n_receptors,c_noise,p0,p1,nu,map_ber");
}

TEST_CASE("evaluated training steps") {
  const auto s = evaluation_steps(100, 10);
  CHECK(s.front() == 0);
  CHECK(s.back() == 100);
  CHECK(std::find(s.begin(), s.end(), 99) != s.end());
  CHECK(std::find(s.begin(), s.end(), 50) != s.end());
  CHECK(s.size() == 12);
  CHECK(evaluation_steps(3, 1).size() == 4);
}

TEST_CASE("BM training experiment") {
  const auto cfg = small_config();
  const auto res = fig2_experiment(cfg);
  CHECK(res.final_bms.size() == 2);
  CHECK(res.final_bms[0].size() == 4);
  std::map<std::pair<std::string, int>, CurveRow> by;
  for (const auto& r : res.rows) {
    CHECK(r.mean_ber >= 0.0);
    CHECK(r.mean_ber <= 1.0);
    by[{r.scenario, r.index}] = r;
  }
  for (const auto& sc : cfg.scenarios) {
    CHECK(by[{sc.name, 0}].mean_ber >= by[{sc.name, 99}].mean_ber);
    for (int step : res.steps) CHECK(by[{sc.name, step}].map_ber == by[{sc.name, 0}].map_ber);
  }
  std::ostringstream out;
  write_curve_csv(out, res.rows, "step");
  CHECK(header(out.str()) == "scenario,step,mean_ber,map_ber");
}

TEST_CASE("online learning experiment") {
  const auto cfg = small_config();
  const auto res = fig3_experiment(cfg);
  REQUIRE(res.nu.size() == 2);
  CHECK(res.nu[0] == 13);
  CHECK(res.mean_ber[0][0] == doctest::Approx(0.499381).epsilon(1e-5));
  for (std::size_t s = 0; s < 2; ++s) {
    for (double v : res.mean_n_w_on[s]) {
      CHECK(v >= 0.0);
      CHECK(v <= 30.0);
    }
    for (double b : res.mean_ber[s]) {
      CHECK(b >= 0.0);
      CHECK(b <= 1.0);
    }
  }
  std::ostringstream out;
  write_curve_csv(out, res.rows, "pilot");
  CHECK(header(out.str()) == "scenario,pilot,mean_ber,map_ber");
}

TEST_CASE("time-variant experiment") {
  auto cfg = small_config();
  cfg.time_variant.schedule.phases = {{60, 1e19}, {60, 2.5e19}, {60, 1e19}};
  const auto rows = fig4_experiment(cfg);
  REQUIRE(rows.size() == 181);
  CHECK(rows[30].opt_nu == 10);
  CHECK(rows[90].opt_nu == 12);
  CHECK(rows[150].opt_nu == 10);
  for (const auto& r : rows) {
    CHECK(r.min_nw <= r.mean_nw);
    CHECK(r.mean_nw <= r.max_nw);
  }
  std::ostringstream out;
  write_fig4_csv(out, rows);
  CHECK(header(out.str()) == "pilot,mean_nw,min_nw,max_nw,opt_nu");
}

TEST_CASE("results do not depend on the thread count") {
  auto cfg = small_config();
  cfg.training.n_steps = 5;
  cfg.online.n_pilots = 30;
  cfg.time_variant.schedule.phases = {{10, 1e19}, {10, 2.5e19}};
  auto render = [&](int threads) {
    cfg.threads = threads;
    std::ostringstream out;
    write_curve_csv(out, fig2_experiment(cfg).rows, "step");
    write_curve_csv(out, fig3_experiment(cfg).rows, "pilot");
    write_fig4_csv(out, fig4_experiment(cfg));
    write_run_ber_csv(out, run_ber_experiment(cfg));
    return out.str();
  };
  const std::string one = render(1);
  CHECK(one == render(1));
  CHECK(one == render(4));
}
