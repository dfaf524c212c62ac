#include <cmath>
#include <stdexcept>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "mcrn/bm.hpp"
#include "mcrn/reference.hpp"
#include "mcrn/validation.hpp"

using namespace mcrn;

namespace {

const ChannelParams high30{2.5e19, 1.5e20, 2e-19, 20, 30};

Eigen::VectorXd state(std::initializer_list<double> v) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) z(i++) = x;
  return z;
}

// exact conditional from the two-state energy difference
double energy_conditional(const Fvbm& bm, int i, Eigen::VectorXd z) {
  auto energy = [&](const Eigen::VectorXd& s) { return 0.5 * s.dot(bm.weights() * s) + s.dot(bm.biases()); };
  z(i) = 1;
  const double e1 = energy(z);
  z(i) = 0;
  const double e0 = energy(z);
  return 1.0 / (1.0 + std::exp(e0 - e1));
}

}  // namespace

TEST_CASE("machine layout and invariants") {
  Fvbm full(4);
  CHECK(full.n_nodes() == 4);
  CHECK(full.mask()(1, 2));
  CHECK_FALSE(full.mask()(2, 2));
  full.set_weight(1, 2, 0.7);
  CHECK(full.weight(2, 1) == 0.7);
  CHECK_THROWS_AS(full.set_weight(1, 1, 0.3), std::invalid_argument);

  const Fvbm star = Fvbm::star(3);
  CHECK(star.n_receptors() == 3);
  CHECK(star.mask()(0, 2));
  CHECK_FALSE(star.mask()(1, 2));
  Fvbm s = star;
  CHECK_THROWS_AS(s.set_weight(1, 2, 0.1), std::invalid_argument);
  CHECK_NOTHROW(s.check_invariants());
}

TEST_CASE("conditional probability") {
  Fvbm bm(3);
  CHECK(conditional_prob(bm, 1, state({1, 0, 1})) == doctest::Approx(0.5));
  bm.set_bias(1, -0.8);
  CHECK(conditional_prob(bm, 1, state({1, 0, 1})) == doctest::Approx(sigmoid(-0.8)));
  bm.set_weight(0, 1, 0.4);
  bm.set_weight(1, 2, -1.3);
  bm.set_weight(0, 2, 2.0);
  for (auto z : {state({0, 0, 0}), state({1, 0, 1}), state({1, 1, 0}), state({0, 1, 1})}) {
    for (int i = 0; i < 3; ++i) CHECK(conditional_prob(bm, i, z) == doctest::Approx(energy_conditional(bm, i, z)));
  }
  const Fvbm map = construct_map_bm(30, 13, 1.0);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(31);
  for (int i = 1; i <= 13; ++i) y(i) = 1;
  CHECK(conditional_prob(map, 0, y) == doctest::Approx(0.62246).epsilon(1e-4));
}

TEST_CASE("sigmoid is stable at large arguments") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(std::isfinite(sigmoid(-800.0)));
}

TEST_CASE("gibbs sampler on independent nodes") {
  Fvbm bm(3);
  bm.set_bias(0, -1.0);
  bm.set_bias(1, 0.5);
  bm.set_bias(2, 2.0);
  Rng rng = Rng::derive(5, {1});
  const auto samples = gibbs_sample(bm, 100000, rng);
  for (int i = 0; i < 3; ++i) {
    const double p = sigmoid(bm.bias(i));
    const double mean = samples.col(i).mean();
    CHECK(std::abs(mean - p) <= 3 * std::sqrt(p * (1 - p) / 100000));
  }
}

TEST_CASE("gibbs sampler against enumeration") {
  Fvbm pair(2);
  pair.set_weight(0, 1, 1.0);
  const auto exact = enumerate_pmf(pair);
  const double z = 3.0 + std::exp(1.0);
  CHECK(exact[0] == doctest::Approx(1.0 / z));
  CHECK(exact[3] == doctest::Approx(std::exp(1.0) / z));
  Rng rng = Rng::derive(5, {2});
  CHECK(gibbs_tv_distance(pair, 100000, rng) <= 0.02);

  for (int n = 3; n <= 4; ++n) {
    Fvbm bm(n);
    for (int i = 0; i < n; ++i) {
      bm.set_bias(i, rng.normal(0, 1));
      for (int j = i + 1; j < n; ++j) bm.set_weight(i, j, rng.normal(0, 1));
    }
    CHECK(gibbs_tv_distance(bm, 100000, rng) <= 0.02);
  }
}

TEST_CASE("clamped nodes hold their value") {
  Fvbm bm(3);
  bm.set_weight(0, 1, 2.0);
  bm.set_weight(1, 2, -2.0);
  Rng rng(9);
  const auto s = gibbs_sample(bm, 2000, rng, {{1, 1}, {2, 0}});
  CHECK((s.col(1).array() == 1.0).all());
  CHECK((s.col(2).array() == 0.0).all());
  CHECK(s.rows() == 2000);
}

TEST_CASE("moment estimates") {
  CHECK_THROWS_AS(estimate_moments(SampleMatrix(0, 3)), std::domain_error);
  const auto ones = estimate_moments(SampleMatrix::Ones(10, 3));
  CHECK((ones.first.array() == 1.0).all());
  CHECK((ones.second.array() == 1.0).all());
  const auto zeros = estimate_moments(SampleMatrix::Zero(10, 3));
  CHECK((zeros.first.array() == 0.0).all());
  CHECK((zeros.second.array() == 0.0).all());

  Rng rng(4);
  SampleMatrix mixed(50, 4);
  for (int r = 0; r < 50; ++r)
    for (int c = 0; c < 4; ++c) mixed(r, c) = rng.bernoulli(0.4) ? 1 : 0;
  const auto m = estimate_moments(mixed);
  for (int i = 0; i < 4; ++i) CHECK(m.second(i, i) == doctest::Approx(m.first(i)));
  CHECK((m.second - m.second.transpose()).norm() == 0.0);
}

TEST_CASE("train step") {
  Rng rng(8);
  Fvbm bm = init_weights(4, rng);
  MomentEstimates a{Eigen::VectorXd::Constant(5, 0.3), Eigen::MatrixXd::Constant(5, 5, 0.2)};
  MomentEstimates b = a;
  const Fvbm same = train_step(bm, a, a, 0.7);
  CHECK(same.weights() == bm.weights());
  CHECK(same.biases() == bm.biases());
  const Fvbm frozen = train_step(bm, a, b, 0.0);
  CHECK(frozen.weights() == bm.weights());

  b.second(0, 2) = b.second(2, 0) = 0.5;  // model correlates more than data
  b.second(0, 3) = b.second(3, 0) = 0.1;
  b.first(1) = 0.1;
  const Fvbm next = train_step(bm, a, b, 0.5);
  CHECK(next.weight(0, 2) < bm.weight(0, 2));
  CHECK(next.weight(0, 3) > bm.weight(0, 3));
  CHECK(next.bias(1) > bm.bias(1));
  CHECK(next.weight(2, 3) == 0.0);  // masked
  CHECK_NOTHROW(next.check_invariants());
}

TEST_CASE("weight initialization") {
  Rng rng = Rng::derive(21, {1});
  const Fvbm bm = init_weights(6, rng);
  CHECK_NOTHROW(bm.check_invariants());
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 6; ++j) CHECK(bm.weight(i, j) == 0.0);
  CHECK(bm.biases().isZero());

  const int n_r = 9, reps = 10000;
  double sum = 0.0, sq = 0.0;
  long count = 0;
  for (int k = 0; k < reps; ++k) {
    const Fvbm w = init_weights(n_r, rng);
    for (int i = 1; i <= n_r; ++i) {
      sum += w.weight(0, i);
      sq += w.weight(0, i) * w.weight(0, i);
      ++count;
    }
  }
  const double var = sq / count - (sum / count) * (sum / count);
  CHECK(var == doctest::Approx(0.5 / (n_r + 1)).epsilon(0.1));
}

TEST_CASE("learning rate schedule") {
  const auto s = LearningRateSchedule::standard();
  CHECK(s.rate(0) == 1.0);
  CHECK(s.rate(19) == 1.0);
  CHECK(s.rate(20) == 0.5);
  CHECK(s.rate(49) == 0.5);
  CHECK(s.rate(50) == 0.1);
  CHECK(s.rate(99) == 0.1);
  CHECK_THROWS_AS(s.rate(100), std::out_of_range);
  CHECK(s.defined_steps() == 100);
}

TEST_CASE("MAP construction") {
  const Fvbm bm = construct_map_bm(30, 13, 1.0);
  CHECK(bm.bias(0) == doctest::Approx(-12.5));
  CHECK_THROWS_AS(construct_map_bm(30, 13, 0.0), std::domain_error);
  CHECK_THROWS_AS(construct_map_bm(30, 13, -1.0), std::domain_error);
  CHECK_THROWS_AS(construct_map_bm(30, 32, 1.0), std::domain_error);

  const Fvbm always = construct_map_bm(30, 0, 1.0);
  CHECK(always.bias(0) == doctest::Approx(0.5));
  for (int n = 0; n <= 30; ++n) CHECK(sigmoid(always.bias(0) + n) > 0.5);
}

TEST_CASE("MAP construction is MAP-equivalent for models built around each threshold") {
  const int n_r = 30;
  for (int nu = 1; nu <= n_r; ++nu) {
    // search a model whose optimal threshold is nu
    bool found = false;
    for (int a = 0; a < 400 && !found; ++a) {
      for (int b = a + 1; b < 400 && !found; ++b) {
        const LikelihoodModel m{n_r, a / 400.0, b / 400.0};
        if (optimal_threshold(m).nu != nu) continue;
        found = true;
        const Fvbm bm = construct_map_bm(n_r, nu, 0.7);
        std::vector<double> f(n_r + 1);
        for (int n = 0; n <= n_r; ++n) f[static_cast<std::size_t>(n)] = sigmoid(bm.bias(0) + n * bm.weight(0, 1));
        CHECK(has_map_property(f, m));
      }
    }
    CHECK(found);
  }
}

TEST_CASE("posterior of the MAP machine") {
  const Fvbm bm = construct_map_bm(30, 13, 1.0);
  CHECK(bm_posterior(bm, ReceptorObservation::with_bound(30, 13)) == doctest::Approx(0.62246).epsilon(1e-4));
  CHECK(bm_posterior(bm, ReceptorObservation::with_bound(30, 12)) == doctest::Approx(0.37754).epsilon(1e-4));
  CHECK(bm_posterior(Fvbm::star(30), ReceptorObservation::with_bound(30, 7)) == doctest::Approx(0.5));

  std::vector<std::uint8_t> s(30, 0);
  for (int i = 17; i < 30; ++i) s[static_cast<std::size_t>(i)] = 1;
  CHECK(bm_posterior(bm, ReceptorObservation(s)) == bm_posterior(bm, ReceptorObservation::with_bound(30, 13)));
  CHECK_THROWS_AS(bm_posterior(bm, ReceptorObservation::with_bound(10, 3)), std::invalid_argument);
}

TEST_CASE("sampled BM detection") {
  Rng rng = Rng::derive(31, {1});
  Fvbm sure = Fvbm::star(4);
  sure.set_bias(0, 800.0);
  Fvbm never = Fvbm::star(4);
  never.set_bias(0, -800.0);
  const auto y = ReceptorObservation::with_bound(4, 2);
  for (int k = 0; k < 20; ++k) {
    CHECK(bm_detect(sure, y, 5, rng) == Symbol::One);
    CHECK(bm_detect(never, y, 5, rng) == Symbol::Zero);
  }
  const Fvbm map = construct_map_bm(30, 13, 1.0);
  int wrong = 0;
  for (int k = 0; k < 200; ++k) wrong += bm_detect(map, ReceptorObservation::with_bound(30, 13), 10000, rng) != Symbol::One;
  CHECK(wrong <= 2);
}

TEST_CASE("channel training data") {
  Rng rng(2);
  const auto d = draw_channel_samples(high30, 20000, rng);
  CHECK(d.cols() == 31);
  const double px = d.col(0).mean();
  CHECK(std::abs(px - 0.5) < 0.02);
  double bound_given_one = 0.0;
  double ones = 0.0;
  for (Eigen::Index r = 0; r < d.rows(); ++r) {
    if (d(r, 0) > 0.5) {
      ones += 1;
      bound_given_one += d.row(r).tail(30).sum();
    }
  }
  CHECK(bound_given_one / ones / 30 == doctest::Approx(7.0 / 11.0).epsilon(0.02));
}

TEST_CASE("training") {
  TrainingConfig cfg;
  cfg.n_steps = 0;
  Rng a(17), b(17);
  const auto r0 = train_bm(high30, cfg, a);
  CHECK(r0.snapshots.size() == 1);
  draw_channel_samples(high30, cfg.n_data_samples, b);
  const Fvbm init = init_weights(30, b);
  CHECK(r0.final_bm.weights() == init.weights());

  cfg.n_steps = 60;
  cfg.n_data_samples = 4000;
  cfg.n_gibbs_samples = 4000;
  Rng rng = Rng::derive(17, {2});
  const auto r = train_bm({2.5e19, 1.5e20, 2e-19, 20, 10}, cfg, rng);
  CHECK(r.snapshots.size() == 61);
  for (const auto& s : r.snapshots) {
    s.check_invariants();
    for (int i = 1; i <= 10; ++i)
      for (int j = 1; j <= 10; ++j) REQUIRE(s.weight(i, j) == 0.0);
  }
  const LikelihoodModel m{10, 0.2, 7.0 / 11.0};
  const double map_ber = analytic_ber(m, optimal_threshold(m));
  // BER of the trained machine by enumerating receptor configurations
  auto exact_ber = [&](const Fvbm& bm) {
    double err = 0.0;
    for (unsigned mask = 0; mask < (1u << 10); ++mask) {
      std::vector<std::uint8_t> s(10);
      int n = 0;
      for (int i = 0; i < 10; ++i) n += s[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
      const Symbol d = bm_decide(bm, ReceptorObservation(s));
      const double p = d == Symbol::One ? std::pow(0.2, n) * std::pow(0.8, 10 - n)
                                        : std::pow(7.0 / 11.0, n) * std::pow(4.0 / 11.0, 10 - n);
      err += 0.5 * p;
    }
    return err;
  };
  CHECK(exact_ber(r.final_bm) <= 2.0 * map_ber);
  CHECK(exact_ber(r.snapshots[0]) >= exact_ber(r.final_bm));
}

TEST_CASE("text round trip") {
  Rng rng(12);
  Fvbm star = init_weights(5, rng);
  star.set_bias(0, -0.1234567890123);
  std::stringstream ss;
  write_fvbm(ss, star);
  const Fvbm back = read_fvbm(ss);
  CHECK(back.weights() == star.weights());
  CHECK(back.biases() == star.biases());
  CHECK(back.mask() == star.mask());

  Fvbm full(3);
  full.set_weight(1, 2, 0.25);
  std::stringstream fs;
  write_fvbm(fs, full);
  CHECK(read_fvbm(fs).mask() == full.mask());

  std::stringstream bad("fvbm 2\n0 0\n");
  CHECK_THROWS_AS(read_fvbm(bad), std::runtime_error);
  std::stringstream junk("hello");
  CHECK_THROWS_AS(read_fvbm(junk), std::runtime_error);
}
