#include "mcrn/validation.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "mcrn/config.hpp"
#include "mcrn/detectors.hpp"
#include "mcrn/experiments.hpp"

namespace mcrn {

double gibbs_tv_distance(const Fvbm& bm, int n_samples, Rng& rng) {
  const auto exact = enumerate_pmf(bm);
  const SampleMatrix samples = gibbs_sample(bm, n_samples, rng);
  std::vector<double> freq(exact.size(), 0.0);
  for (Eigen::Index s = 0; s < samples.rows(); ++s) {
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < samples.cols(); ++i) {
      if (samples(s, i) > 0.5) idx |= std::size_t{1} << i;
    }
    freq[idx] += 1.0 / n_samples;
  }
  double tv = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k) tv += std::abs(freq[k] - exact[k]);
  return 0.5 * tv;
}

FlipNetwork make_flip_network(double on_rate, double off_rate) {
  FlipNetwork net;
  net.on = net.crn.add_species("X_ON");
  net.off = net.crn.add_species("X_OFF");
  net.crn.add_reaction({{{net.off, 1}}, {{net.on, 1}}, on_rate, "X_OFF -> X_ON"});
  net.crn.add_reaction({{{net.on, 1}}, {{net.off, 1}}, off_rate, "X_ON -> X_OFF"});
  net.initial.counts = {0, 1};
  return net;
}

double time_fraction_on(const FlipNetwork& net, double t_end, Rng& rng) {
  CrnState s = net.initial;
  double on_time = 0.0;
  while (true) {
    auto ev = next_event(net.crn, s, rng);
    const double stop = ev ? std::min(s.time + ev->dt, t_end) : t_end;
    if (s.counts[net.on] > 0) on_time += stop - s.time;
    if (!ev || s.time + ev->dt > t_end) break;
    s.time += ev->dt;
    apply_reaction(net.crn, s, ev->reaction);
  }
  return on_time / t_end;
}

namespace {

CheckResult check_xhat_conservation(Rng& rng) {
  long steps = 0;
  const auto run = [&](const DetectorCrn& d) -> bool {
    CrnState s = d.initial;
    double last = s.time;
    for (int k = 0; k < 2000; ++k) {
      if (!ssa_step(d.crn, s, rng)) return s.counts[d.x_on] + s.counts[d.x_off] == 1;
      ++steps;
      if (s.counts[d.x_on] + s.counts[d.x_off] != 1 || !(s.time > last)) return false;
      for (auto c : s.counts)
        if (c < 0) return false;
      last = s.time;
    }
    return true;
  };
  const TaylorCrnParams taylor = TaylorCrnParams::from_bm(construct_map_bm(30, 13, 1.0));
  for (int n = 0; n <= 30; n += 3) {
    if (!run(build_taylor_crn(taylor, ReceptorObservation::with_bound(30, n)))) {
      return {"xhat-conservation", false, fmt::format("taylor network violated at n_bound={}", n)};
    }
  }
  for (int n = 0; n <= 30; n += 3) {
    for (int w : {0, 7, 13, 30}) {
      if (!run(build_lc_crn(n, {w, 30, 1.0, 1.0}))) {
        return {"xhat-conservation", false, fmt::format("lc network violated at n_bound={}, n_w_on={}", n, w)};
      }
    }
  }
  return {"xhat-conservation", true, fmt::format("{} events checked", steps)};
}

CheckResult check_reservoir_conservation(Rng& rng) {
  LcDetectorState st{0, 30, 1.0, 1.0};
  for (int k = 0; k < 20000; ++k) {
    st = lc_update(st, sample_symbol(rng), {sample_symbol(rng), false});
    if (st.n_w_on < 0 || st.n_w_on > st.n_w_total || st.n_w_on + st.n_w_off() != st.n_w_total) {
      return {"reservoir-conservation", false, "discrete update left the reservoir"};
    }
  }
  for (int k = 0; k < 500; ++k) {
    const LcDetectorState before{static_cast<int>(rng.next_u64() % 31), 30, 1.0, 1.0};
    const LearningCrn net = build_learning_crn(before, {sample_symbol(rng), false}, sample_symbol(rng));
    CrnState s = net.initial;
    while (ssa_step(net.crn, s, rng)) {
      if (s.counts[net.w_on] + s.counts[net.w_off] != before.n_w_total) {
        return {"reservoir-conservation", false, "learning network changed the reservoir size"};
      }
    }
  }
  return {"reservoir-conservation", true, "20000 updates, 500 learning networks"};
}

CheckResult check_nonnegative_counts(Rng& rng) {
  Crn crn;
  const SpeciesId a = crn.add_species("A");
  const SpeciesId b = crn.add_species("B");
  const SpeciesId c = crn.add_species("C");
  crn.add_reaction({{{a, 1}, {b, 1}}, {{c, 1}}, 0.5, "A + B -> C"});
  crn.add_reaction({{{a, 2}}, {{b, 1}}, 0.2, "2A -> B"});
  crn.add_reaction({{{c, 1}}, {{a, 1}, {b, 1}}, 1.0, "C -> A + B"});
  crn.add_reaction({{{b, 3}}, {{a, 1}}, 0.1, "3B -> A"});
  long steps = 0;
  for (int rep = 0; rep < 50; ++rep) {
    CrnState s{{static_cast<std::int64_t>(rng.next_u64() % 6), static_cast<std::int64_t>(rng.next_u64() % 6), 0}, 0.0};
    for (int k = 0; k < 2000 && ssa_step(crn, s, rng); ++k, ++steps) {
      for (auto v : s.counts)
        if (v < 0) return {"nonnegative-counts", false, "negative count reached"};
    }
  }
  return {"nonnegative-counts", true, fmt::format("{} events checked", steps)};
}

CheckResult check_gibbs(Rng& rng) {
  double worst = 0.0;
  std::vector<Fvbm> machines;
  Fvbm pair(2);
  pair.set_weight(0, 1, 1.0);
  machines.push_back(pair);
  for (int n = 2; n <= 4; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      Fvbm bm(n);
      for (int i = 0; i < n; ++i) {
        bm.set_bias(i, rng.normal(0.0, 1.0));
        for (int j = i + 1; j < n; ++j) bm.set_weight(i, j, rng.normal(0.0, 1.0));
      }
      machines.push_back(bm);
    }
  }
  for (const auto& bm : machines) worst = std::max(worst, gibbs_tv_distance(bm, 100000, rng));
  return {"gibbs-vs-enumeration", worst <= 0.02, fmt::format("max TV {:.4f} over {} machines", worst, machines.size())};
}

CheckResult check_two_state(Rng& rng) {
  double worst = 0.0;
  for (auto [a, b] : {std::pair{1.0, 3.0}, std::pair{2.0, 2.0}, std::pair{5.0, 0.5}}) {
    const FlipNetwork net = make_flip_network(a, b);
    const double frac = time_fraction_on(net, 1e5 / (a + b), rng);
    worst = std::max(worst, std::abs(frac - a / (a + b)));
  }
  return {"two-state-stationary", worst <= 0.01, fmt::format("max deviation {:.4f}", worst)};
}

std::string fingerprint(const ExperimentConfig& cfg) {
  std::ostringstream out;
  write_curve_csv(out, fig2_experiment(cfg).rows, "step");
  const Fig3Result f3 = fig3_experiment(cfg);
  write_curve_csv(out, f3.rows, "pilot");
  write_nw_trajectory_csv(out, cfg.scenarios, f3.mean_n_w_on);
  write_fig4_csv(out, fig4_experiment(cfg));
  write_run_ber_csv(out, run_ber_experiment(cfg));
  return out.str();
}

CheckResult check_determinism(std::uint64_t seed, int threads) {
  ExperimentConfig cfg = ExperimentConfig::ci_profile();
  cfg.seed = seed;
  cfg.scenarios.resize(2);
  cfg.n_replicates = 3;
  cfg.training.n_steps = 4;
  cfg.training.n_data_samples = 400;
  cfg.training.n_gibbs_samples = 400;
  cfg.max_errors = 20;
  cfg.symbol_cap = 20000;
  cfg.online.n_pilots = 40;
  cfg.time_variant.schedule.phases = {{20, 1.0e19}, {20, 2.5e19}};
  cfg.threads = 1;
  const std::string sequential = fingerprint(cfg);
  const std::string again = fingerprint(cfg);
  cfg.threads = std::max(threads, 3);
  const std::string pooled = fingerprint(cfg);
  const bool ok = sequential == again && sequential == pooled;
  return {"determinism", ok,
          ok ? fmt::format("{} bytes identical across reruns and thread counts", sequential.size())
             : "outputs differ between runs"};
}

}  // namespace

std::vector<CheckResult> run_core_invariants(std::uint64_t seed, int threads) {
  std::vector<CheckResult> out;
  Rng rng = Rng::derive(seed, {0xC0DE});
  out.push_back(check_xhat_conservation(rng));
  out.push_back(check_reservoir_conservation(rng));
  out.push_back(check_nonnegative_counts(rng));
  out.push_back(check_gibbs(rng));
  out.push_back(check_two_state(rng));
  out.push_back(check_determinism(seed, threads));
  return out;
}

}  // namespace mcrn
