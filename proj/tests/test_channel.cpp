#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "mcrn/channel.hpp"
#include "mcrn/reference.hpp"

using namespace mcrn;

namespace {

ChannelParams paper(double c_noise, int n = 30) { return {c_noise, 1.5e20, 2e-19, 20.0, n}; }

}  // namespace

TEST_CASE("concentration adds the shift only for symbol one") {
  CHECK(concentration(paper(2.5e19), Symbol::Zero) == doctest::Approx(2.5e19));
  CHECK(concentration(paper(2.5e19), Symbol::One) == doctest::Approx(1.75e20));
  CHECK(concentration(paper(1.0e19), Symbol::One) == doctest::Approx(1.6e20));
}

TEST_CASE("binding probability with the standard constants") {
  const auto ch = paper(2.5e19);
  CHECK(ch.k_minus / ch.k_plus == doctest::Approx(1e20));
  CHECK(binding_probability(ch, Symbol::Zero) == doctest::Approx(0.2));
  CHECK(binding_probability(ch, Symbol::One) == doctest::Approx(7.0 / 11.0));
  CHECK(binding_probability(paper(1e19), Symbol::Zero) == doctest::Approx(1.0 / 11.0));
  CHECK(binding_probability(paper(1e19), Symbol::One) == doctest::Approx(8.0 / 13.0));
}

TEST_CASE("binding probability saturates and is increasing") {
  double prev = -1.0;
  for (double c : {0.0, 1e18, 1e19, 1e20, 1e21, 1e24}) {
    const double p = binding_probability(paper(c), Symbol::Zero);
    CHECK(p >= 0.0);
    CHECK(p < 1.0);
    CHECK(p > prev);
    prev = p;
    CHECK(binding_probability(paper(c), Symbol::One) > p);
  }
  // both laws round to one here
  CHECK(binding_probability(paper(1e30), Symbol::Zero) > 1.0 - 1e-9);
  CHECK(binding_probability(paper(1e30), Symbol::One) >= binding_probability(paper(1e30), Symbol::Zero));
}

TEST_CASE("channel parameter validation") {
  CHECK_NOTHROW(paper(0.0).validate());
  CHECK_THROWS_AS((ChannelParams{-1.0, 1.5e20, 2e-19, 20, 30}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ChannelParams{1.0, 0.0, 2e-19, 20, 30}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ChannelParams{1.0, 1.5e20, 0.0, 20, 30}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ChannelParams{1.0, 1.5e20, 2e-19, 0.0, 30}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ChannelParams{1.0, 1.5e20, 2e-19, 20, 0}).validate(), std::invalid_argument);
}

TEST_CASE("observation bookkeeping") {
  const ReceptorObservation y(std::vector<std::uint8_t>{1, 0, 1, 1});
  CHECK(y.n_receptors() == 4);
  CHECK(y.n_bound() == 3);
  CHECK(y.bound(0));
  CHECK_FALSE(y.bound(1));
  const auto w = ReceptorObservation::with_bound(5, 2);
  CHECK(w.n_bound() == 2);
  CHECK(w.n_receptors() == 5);
}

TEST_CASE("sampling at the probability extremes") {
  Rng rng(3);
  ReceptorObservation y;
  y.resample(12, 0.0, rng);
  CHECK(y.n_bound() == 0);
  y.resample(12, 1.0, rng);
  CHECK(y.n_bound() == 12);
}

TEST_CASE("sampled bound counts follow the binomial law") {
  const auto ch = paper(2.5e19);
  Rng rng = Rng::derive(11, {1});
  const int draws = 100000;
  std::vector<int> hist(31, 0);
  double sum = 0.0;
  for (int k = 0; k < draws; ++k) {
    const int n = sample_observation(ch, Symbol::Zero, rng).n_bound();
    ++hist[static_cast<std::size_t>(n)];
    sum += n;
  }
  const double sigma = std::sqrt(30 * 0.2 * 0.8 / draws);
  CHECK(std::abs(sum / draws - 6.0) <= 3 * sigma);

  // merge cells until each expects at least 5 counts; a short tail joins the last cell
  std::vector<double> obs, expct;
  double o_acc = 0.0, e_acc = 0.0;
  for (int n = 0; n <= 30; ++n) {
    o_acc += hist[static_cast<std::size_t>(n)];
    e_acc += draws * binomial_pmf(30, 0.2, n);
    if (e_acc >= 5.0) {
      obs.push_back(o_acc);
      expct.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  obs.back() += o_acc;
  expct.back() += e_acc;
  double chi2 = 0.0;
  for (std::size_t k = 0; k < obs.size(); ++k) chi2 += (obs[k] - expct[k]) * (obs[k] - expct[k]) / expct[k];
  const boost::math::chi_squared dist(static_cast<double>(obs.size() - 1));
  CHECK(chi2 < boost::math::quantile(dist, 0.99));
}

TEST_CASE("joint pmf") {
  ChannelParams tiny{0.25e20, 1.5e20, 2e-19, 20, 2};
  const ReceptorObservation both(std::vector<std::uint8_t>{1, 1});
  CHECK(joint_pmf(tiny, both, Symbol::Zero) == doctest::Approx(0.02));

  for (int n_r : {1, 3, 6, 10}) {
    ChannelParams ch = paper(2.5e19, n_r);
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << n_r); ++mask) {
      std::vector<std::uint8_t> s(static_cast<std::size_t>(n_r));
      for (int i = 0; i < n_r; ++i) s[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
      const ReceptorObservation y(s);
      total += joint_pmf(ch, y, Symbol::Zero) + joint_pmf(ch, y, Symbol::One);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }

  // zero binding probability: c_noise = 0 under symbol zero
  ChannelParams silent = paper(0.0, 3);
  CHECK(joint_pmf(silent, ReceptorObservation(std::vector<std::uint8_t>{0, 1, 0}), Symbol::Zero) == 0.0);
  CHECK(joint_pmf(silent, ReceptorObservation(std::vector<std::uint8_t>{0, 0, 0}), Symbol::Zero) ==
        doctest::Approx(0.5));
}

TEST_CASE("diffusive pulse") {
  const DiffusionParams dp{1e3, 1e-10, 0.75e-6};
  CHECK_THROWS_AS(pulse_concentration(dp, 0.0), std::domain_error);
  CHECK_THROWS_AS(pulse_concentration(dp, -1.0), std::domain_error);
  CHECK(pulse_peak_time(dp) == doctest::Approx(9.375e-4));

  double best_t = 0.0, best_c = 0.0;
  for (int k = 1; k <= 200000; ++k) {
    const double t = k * 1e-8;
    const double c = pulse_concentration(dp, t);
    if (c > best_c) best_c = c, best_t = t;
  }
  CHECK(best_t == doctest::Approx(9.375e-4).epsilon(1e-4));
  CHECK(std::floor(std::log10(best_c)) == 20.0);
  CHECK(pulse_concentration(dp, 1e9) < 1e-3 * best_c);
  CHECK(pulse_concentration(dp, 1e30) == doctest::Approx(0.0));
}
