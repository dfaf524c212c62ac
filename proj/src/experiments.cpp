#include "mcrn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "mcrn/detectors.hpp"
#include "mcrn/parallel.hpp"

namespace mcrn {

namespace {

// Stream tags keep the random streams of different experiments disjoint.
enum StreamTag : std::uint64_t { kRunBer = 1, kTrain = 2, kEvaluate = 3, kOnline = 4, kTimeVariant = 5 };

std::string fmt_double(double v) { return fmt::format("{:.10g}", v); }

}  // namespace

BerResult run_ber(const Detector& detector, const ChannelParams& channel, long max_errors, long symbol_cap,
                  Rng& rng) {
  return run_ber_with(detector, channel, max_errors, symbol_cap, rng);
}

Detector make_detector(const DetectorSpec& spec, const SamplingPolicy& sampling, const ChannelParams& channel) {
  const LikelihoodModel model = LikelihoodModel::from_channel(channel);
  const ThresholdDetector oracle = optimal_threshold(model);
  switch (spec.kind) {
    case DetectorKind::Threshold:
      return [oracle](const ReceptorObservation& y, Rng&) { return detect(oracle, y.n_bound()); };
    case DetectorKind::MapBm: {
      Fvbm bm = construct_map_bm(channel.n_receptors, oracle.nu, spec.w_xy);
      const int m = spec.m_samples;
      return [bm, m](const ReceptorObservation& y, Rng& rng) {
        return m > 0 ? bm_detect(bm, y, m, rng) : bm_decide(bm, y);
      };
    }
    case DetectorKind::TaylorCrn: {
      const TaylorCrnParams params =
          TaylorCrnParams::from_bm(construct_map_bm(channel.n_receptors, oracle.nu, spec.w_xy), spec.k_scale);
      return [params, sampling](const ReceptorObservation& y, Rng& rng) {
        const DetectorCrn d = build_taylor_crn(params, y);
        return crn_detect(d, sampling.resolve(d), rng);
      };
    }
    case DetectorKind::LcCrn: {
      const double ratio = spec.k_off / spec.k_on;
      const int n_w_on = static_cast<int>(std::floor(oracle.nu / ratio));
      if (oracle.nu < 1 || !(ratio * n_w_on > oracle.nu - 1)) {
        throw std::invalid_argument("lc-crn: no weight count realizes the oracle threshold for this rate ratio");
      }
      const LcDetectorState st{n_w_on, std::max(n_w_on, min_reservoir(channel.n_receptors, spec.k_on, spec.k_off)),
                               spec.k_on, spec.k_off};
      return [st, sampling](const ReceptorObservation& y, Rng& rng) {
        const DetectorCrn d = build_lc_crn(y.n_bound(), st);
        return crn_detect(d, sampling.resolve(d), rng);
      };
    }
  }
  throw std::logic_error("unhandled detector kind");
}

std::vector<MapReferenceRow> map_reference(const ExperimentConfig& cfg) {
  std::vector<MapReferenceRow> rows;
  for (const auto& s : cfg.scenarios) {
    const LikelihoodModel m = LikelihoodModel::from_channel(s.channel);
    const ThresholdDetector d = optimal_threshold(m);
    rows.push_back({s.name, m.n_receptors, s.channel.c_noise, m.p0, m.p1, d.nu, analytic_ber(m, d)});
  }
  return rows;
}

std::vector<RunBerRow> run_ber_experiment(const ExperimentConfig& cfg) {
  return parallel_map(cfg.scenarios.size(), cfg.threads, [&](std::size_t s) {
    const auto& sc = cfg.scenarios[s];
    const LikelihoodModel m = LikelihoodModel::from_channel(sc.channel);
    const Detector det = make_detector(cfg.detector, cfg.sampling, sc.channel);
    Rng rng = Rng::derive(cfg.seed, {kRunBer, s});
    return RunBerRow{sc.name, to_string(cfg.detector.kind),
                     run_ber(det, sc.channel, cfg.max_errors, cfg.symbol_cap, rng),
                     analytic_ber(m, optimal_threshold(m))};
  });
}

std::vector<int> evaluation_steps(int n_steps, int eval_every) {
  std::vector<int> steps;
  for (int l = 0; l <= n_steps; ++l) {
    if (l % eval_every == 0 || l == n_steps - 1 || l == n_steps) steps.push_back(l);
  }
  return steps;
}

Fig2Result fig2_experiment(const ExperimentConfig& cfg) {
  const std::size_t n_sc = cfg.scenarios.size();
  const std::size_t n_rep = static_cast<std::size_t>(cfg.n_replicates);
  Fig2Result out;
  out.steps = evaluation_steps(cfg.training.n_steps, cfg.eval_every);

  struct ReplicateRun {
    Fvbm final_bm{1};
    std::vector<double> ber;
  };
  auto runs = parallel_map(n_sc * n_rep, cfg.threads, [&](std::size_t task) {
    const std::size_t s = task / n_rep;
    const std::size_t r = task % n_rep;
    const ChannelParams& ch = cfg.scenarios[s].channel;
    Rng train_rng = Rng::derive(cfg.seed, {kTrain, s, r});
    TrainingResult trained = train_bm(ch, cfg.training, train_rng);
    ReplicateRun run{trained.final_bm, {}};
    for (int step : out.steps) {
      const Fvbm& bm = trained.snapshots[static_cast<std::size_t>(step)];
      Rng eval_rng = Rng::derive(cfg.seed, {kEvaluate, s, r, static_cast<std::uint64_t>(step)});
      run.ber.push_back(run_ber_with([&bm](const ReceptorObservation& y, Rng&) { return bm_decide(bm, y); }, ch,
                                     cfg.max_errors, cfg.symbol_cap, eval_rng)
                            .ber);
    }
    return run;
  });

  out.final_bms.resize(n_sc);
  out.ber.resize(n_sc);
  for (std::size_t s = 0; s < n_sc; ++s) {
    const LikelihoodModel m = LikelihoodModel::from_channel(cfg.scenarios[s].channel);
    const double map_ber = analytic_ber(m, optimal_threshold(m));
    for (std::size_t r = 0; r < n_rep; ++r) {
      out.final_bms[s].push_back(runs[s * n_rep + r].final_bm);
      out.ber[s].push_back(runs[s * n_rep + r].ber);
    }
    for (std::size_t k = 0; k < out.steps.size(); ++k) {
      double sum = 0.0;
      for (std::size_t r = 0; r < n_rep; ++r) sum += out.ber[s][r][k];
      out.rows.push_back({cfg.scenarios[s].name, out.steps[k], sum / static_cast<double>(n_rep), map_ber});
    }
  }
  return out;
}

Fig3Result fig3_experiment(const ExperimentConfig& cfg) {
  const std::size_t n_sc = cfg.scenarios.size();
  const std::size_t n_rep = static_cast<std::size_t>(cfg.n_replicates);
  const std::size_t n_points = static_cast<std::size_t>(cfg.online.n_pilots) + 1;

  auto traces = parallel_map(n_sc * n_rep, cfg.threads, [&](std::size_t task) {
    const std::size_t s = task / n_rep;
    const std::size_t r = task % n_rep;
    const ChannelParams& ch = cfg.scenarios[s].channel;
    Rng rng = Rng::derive(cfg.seed, {kOnline, s, r});
    return online_train(ch, cfg.online.initial_state(ch.n_receptors), cfg.online.n_pilots, cfg.online.options, rng);
  });

  Fig3Result out;
  for (std::size_t s = 0; s < n_sc; ++s) {
    const LikelihoodModel m = LikelihoodModel::from_channel(cfg.scenarios[s].channel);
    const ThresholdDetector nu = optimal_threshold(m);
    const double map_ber = analytic_ber(m, nu);
    std::vector<double> mean_nw(n_points, 0.0), mean_ber(n_points, 0.0);
    for (std::size_t r = 0; r < n_rep; ++r) {
      const auto& tr = traces[s * n_rep + r];
      for (std::size_t l = 0; l < n_points; ++l) {
        mean_nw[l] += tr.n_w_on[l];
        mean_ber[l] += tr.ber[l];
      }
    }
    for (std::size_t l = 0; l < n_points; ++l) {
      mean_nw[l] /= static_cast<double>(n_rep);
      mean_ber[l] /= static_cast<double>(n_rep);
      out.rows.push_back({cfg.scenarios[s].name, static_cast<int>(l), mean_ber[l], map_ber});
    }
    out.mean_n_w_on.push_back(std::move(mean_nw));
    out.mean_ber.push_back(std::move(mean_ber));
    out.nu.push_back(nu.nu);
    out.map_ber.push_back(map_ber);
  }
  return out;
}

std::vector<Fig4Row> fig4_experiment(const ExperimentConfig& cfg) {
  const auto& tv = cfg.time_variant;
  tv.schedule.validate();
  const int total = tv.schedule.total_pilots();
  std::vector<ChannelParams> phase_channels;
  std::vector<int> phase_nu;
  for (const auto& phase : tv.schedule.phases) {
    ChannelParams ch = tv.channel;
    ch.c_noise = phase.c_noise;
    phase_channels.push_back(ch);
    phase_nu.push_back(optimal_threshold(LikelihoodModel::from_channel(ch)).nu);
  }

  const std::size_t n_rep = static_cast<std::size_t>(cfg.n_replicates);
  auto trajectories = parallel_map(n_rep, cfg.threads, [&](std::size_t r) {
    Rng rng = Rng::derive(cfg.seed, {kTimeVariant, r});
    OnlineLearner learner(cfg.online.initial_state(tv.channel.n_receptors), cfg.online.options);
    std::vector<int> nw{learner.state().n_w_on};
    nw.reserve(static_cast<std::size_t>(total) + 1);
    for (int l = 1; l <= total; ++l) {
      learner.step(phase_channels[tv.schedule.phase_of_pilot(l)], rng);
      nw.push_back(learner.state().n_w_on);
    }
    return nw;
  });

  std::vector<Fig4Row> rows;
  for (int l = 0; l <= total; ++l) {
    Fig4Row row{l, 0.0, std::numeric_limits<int>::max(), std::numeric_limits<int>::min(),
                phase_nu[tv.schedule.phase_of_pilot(l)]};
    for (const auto& nw : trajectories) {
      const int v = nw[static_cast<std::size_t>(l)];
      row.mean_nw += v;
      row.min_nw = std::min(row.min_nw, v);
      row.max_nw = std::max(row.max_nw, v);
    }
    row.mean_nw /= static_cast<double>(n_rep);
    rows.push_back(row);
  }
  return rows;
}

void write_map_reference_csv(std::ostream& out, const std::vector<MapReferenceRow>& rows) {
  out << "scenario,n_receptors,c_noise,p0,p1,nu,map_ber\n";
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.n_receptors << ',' << fmt_double(r.c_noise) << ',' << fmt_double(r.p0) << ','
        << fmt_double(r.p1) << ',' << r.nu << ',' << fmt_double(r.map_ber) << '\n';
  }
}

void write_run_ber_csv(std::ostream& out, const std::vector<RunBerRow>& rows) {
  out << "scenario,detector,ber,symbols,errors,upper_bound,map_ber\n";
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.detector << ',' << fmt_double(r.result.ber) << ',' << r.result.symbols << ','
        << r.result.errors << ',' << (r.result.upper_bound ? 1 : 0) << ',' << fmt_double(r.map_ber) << '\n';
  }
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows, const std::string& index_name) {
  out << "scenario," << index_name << ",mean_ber,map_ber\n";
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.index << ',' << fmt_double(r.mean_ber) << ',' << fmt_double(r.map_ber) << '\n';
  }
}

void write_fig4_csv(std::ostream& out, const std::vector<Fig4Row>& rows) {
  out << "pilot,mean_nw,min_nw,max_nw,opt_nu\n";
  for (const auto& r : rows) {
    out << r.pilot << ',' << fmt_double(r.mean_nw) << ',' << r.min_nw << ',' << r.max_nw << ',' << r.opt_nu << '\n';
  }
}

void write_nw_trajectory_csv(std::ostream& out, const std::vector<Scenario>& scenarios,
                             const std::vector<std::vector<double>>& mean_nw) {
  out << "scenario,pilot,mean_nw\n";
  for (std::size_t s = 0; s < scenarios.size() && s < mean_nw.size(); ++s) {
    for (std::size_t l = 0; l < mean_nw[s].size(); ++l) {
      out << scenarios[s].name << ',' << l << ',' << fmt_double(mean_nw[s][l]) << '\n';
    }
  }
}

}  // namespace mcrn
