#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "striplab/errors.hpp"
#include "striplab/measure.hpp"
#include "striplab/random.hpp"

using namespace striplab;

namespace {

// standard normal density sampled on [-20, 20]
Measure gaussian_measure(double spacing = 40.0 / 1024, cplx amp = 1.0) {
  const auto n = static_cast<Eigen::Index>(std::llround(40.0 / spacing));
  VecC samples(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double s = -20.0 + spacing * static_cast<double>(k);
    samples[k] = amp * std::exp(-0.5 * s * s) / std::sqrt(2.0 * M_PI);
  }
  return Measure::from_density({-20.0, spacing, std::move(samples)}, 3.0);
}

}  // namespace

TEST_CASE("fourier transform of a point mass is a pure phase") {
  const Measure m = Measure::dirac(1.0);
  CHECK(std::abs(fourier(m, 0.7) - std::exp(cplx(0, -0.7))) < 1e-15);
  CHECK(std::abs(fourier(m, 0.0) - 1.0) < 1e-15);
  // pure atomic measures admit every horizontal line
  CHECK(std::abs(fourier(m, cplx(0.0, 5.0)) - std::exp(5.0)) < 1e-12);
}

TEST_CASE("fourier transform of a gaussian density matches the closed form and a quadrature oracle") {
  const Measure g = gaussian_measure();
  for (double t : {0.0, 0.3, -1.2, 4.0}) {
    const cplx via_impl = fourier(g, t);
    const cplx closed = std::exp(-0.5 * t * t);
    const cplx via_simpson = oracle::simpson(
        [&](double s) {
          return std::exp(cplx(0, -s * t)) * std::exp(-0.5 * s * s) / std::sqrt(2.0 * M_PI);
        },
        -20.0, 20.0, 4000);
    CHECK(std::abs(via_impl - closed) < 1e-10);
    CHECK(std::abs(via_impl - via_simpson) < 1e-10);
  }
}

TEST_CASE("fourier derivative matches a difference quotient") {
  Rng rng(11);
  const Measure m = random_measure(rng);
  const double h = 1e-5;
  for (double t : {0.4, -2.3}) {
    const cplx fd = (fourier(m, t + h) - fourier(m, t - h)) / (2.0 * h);
    CHECK(std::abs(fourier_derivative(m, t) - fd) < 1e-7);
  }
}

TEST_CASE("strip violation beyond the certified decay") {
  const Measure g = gaussian_measure();  // certified decay 3
  CHECK_NOTHROW(fourier(g, cplx(1.0, 2.9)));
  CHECK_THROWS_AS(fourier(g, cplx(1.0, 3.5)), StripViolation);
  CHECK_THROWS_AS(fourier_derivative(g, cplx(0.0, -3.5)), StripViolation);
}

TEST_CASE("convolution of atoms adds locations and multiplies weights") {
  const Measure a = Measure::dirac(1.0, cplx(2.0, 0.0));
  const Measure b = Measure::dirac(-0.25, cplx(0.0, 1.0));
  const Measure c = convolve(a, b);
  REQUIRE(c.atoms().size() == 1);
  CHECK(c.atoms()[0].location == doctest::Approx(0.75));
  CHECK(std::abs(c.atoms()[0].weight - cplx(0.0, 2.0)) < 1e-15);
}

TEST_CASE("point mass at zero is the convolution identity") {
  const Measure g = gaussian_measure();
  const Measure c = convolve(Measure::dirac(0.0), g);
  for (double t : {0.0, 1.1, -2.7})
    CHECK(std::abs(fourier(c, t) - fourier(g, t)) < 1e-12);
}

TEST_CASE("gaussian convolved with itself doubles the variance") {
  const Measure g = gaussian_measure();
  const Measure gg = convolve(g, g);
  for (double t : {0.0, 0.5, 1.5, 3.0}) {
    const double rel = std::abs(gg.has_density() ? fourier(gg, t) - std::exp(-t * t)
                                                 : cplx(infty));
    CHECK(rel < 1e-6);
  }
}

TEST_CASE("fourier turns convolution into multiplication across the random family") {
  Rng rng(2024);
  for (int pair = 0; pair < 50; ++pair) {
    const Measure mu = random_measure(rng);
    const Measure nu = random_measure(rng);
    const Measure cv = convolve(mu, nu);
    for (int i = 0; i <= 200; ++i) {
      const double t = -10.0 + 0.1 * i;
      const cplx lhs = fourier(cv, t);
      const cplx rhs = fourier(mu, t) * fourier(nu, t);
      CHECK(std::abs(lhs - rhs) <= 1e-6 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("weighted total variation is submultiplicative under convolution") {
  Rng rng(7);
  const double omega = 0.25;
  for (int pair = 0; pair < 10; ++pair) {
    const Measure mu = random_measure(rng);
    const Measure nu = random_measure(rng);
    const double lhs = total_variation_weighted(convolve(mu, nu), omega).value;
    const double rhs = total_variation_weighted(mu, omega).value *
                       total_variation_weighted(nu, omega).value;
    CHECK(lhs <= rhs * (1.0 + 1e-12));
  }
}

TEST_CASE("fourier transform is bounded by the plain total variation") {
  Rng rng(9);
  const Measure mu = random_measure(rng);
  const double tv = total_variation(mu);
  for (int i = 0; i <= 40; ++i)
    CHECK(std::abs(fourier(mu, -8.0 + 0.4 * i)) <= tv * (1.0 + 1e-12));
}

TEST_CASE("weighted total variation examples") {
  CHECK(total_variation_weighted(Measure::dirac(1.0), 2.0).value ==
        doctest::Approx(std::exp(2.0)).epsilon(1e-12));
  // against the trapezoid sum recomputed independently from the stored grid
  const Measure g = gaussian_measure();
  const DensityGrid& d = g.density();
  double expected = 0.0;
  for (Eigen::Index k = 0; k < d.samples.size(); ++k) {
    const double s = d.left + d.spacing * static_cast<double>(k);
    const double w = (k == 0 || k == d.samples.size() - 1) ? 0.5 : 1.0;
    expected += w * std::abs(d.samples[k]) * std::exp(std::abs(s));
  }
  expected *= d.spacing;
  const ExtReal got = total_variation_weighted(g, 1.0);
  REQUIRE_FALSE(got.is_infinite);
  CHECK(got.value == doctest::Approx(expected).epsilon(1e-12));
  // and the grid value converges second order to the closed form
  const double closed = std::exp(0.5) * (1.0 + std::erf(1.0 / std::sqrt(2.0)));
  const double err_h = std::abs(got.value - closed);
  const double err_h2 = std::abs(total_variation_weighted(gaussian_measure(40.0 / 2048), 1.0).value - closed);
  CHECK(err_h < 2e-3);
  CHECK(err_h < err_h2 * 10.0);
  CHECK(err_h2 < err_h / 3.0);
}

TEST_CASE("divergence heuristic flags weights beyond the density decay") {
  // two-sided exponential with rate 1, certified decay 1
  const double h = 1.0 / 64;
  const auto n = static_cast<Eigen::Index>(std::llround(32.0 / h));
  VecC samples(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double s = -16.0 + h * static_cast<double>(k);
    samples[k] = std::exp(-std::abs(s));
  }
  const Measure m = Measure::from_density({-16.0, h, std::move(samples)}, 1.0);
  CHECK_FALSE(total_variation_weighted(m, 0.5).is_infinite);
  CHECK(total_variation_weighted(m, 2.0).is_infinite);
  // a gaussian keeps decaying at the window edge, so larger weights stay finite
  CHECK_FALSE(total_variation_weighted(gaussian_measure(), 3.5).is_infinite);
}

TEST_CASE("cosh reweighting shifts the fourier transform into the strip") {
  CHECK(std::abs(cosh_weight(Measure::dirac(1.0), 0.7).atoms()[0].weight - std::cosh(0.7)) <
        1e-15);
  Rng rng(31);
  const Measure mu = random_measure(rng);  // density decay 2
  const double omega = 0.4;
  const Measure muw = cosh_weight(mu, omega);
  for (double s : {-3.0, -0.5, 0.0, 1.7}) {
    const cplx lhs = fourier(muw, s);
    const cplx rhs = 0.5 * (fourier(mu, cplx(s, omega)) + fourier(mu, cplx(s, -omega)));
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
  }
  CHECK(cosh_weight(gaussian_measure(), 0.7).decay_weight() == doctest::Approx(3.0 - 0.7));
  CHECK_THROWS_AS(cosh_weight(gaussian_measure(), 3.0), StripViolation);
}

TEST_CASE("convolution overflow guard") {
  const Measure g = gaussian_measure(40.0 / 32768);
  CHECK_THROWS_AS(convolve(g, g, 1 << 15), GridOverflow);
}

TEST_CASE("serialization round trip preserves the measure") {
  Rng rng(5);
  const Measure mu = random_measure(rng);
  std::stringstream ss;
  save_measure(ss, mu);
  const Measure back = load_measure(ss);
  CHECK(back.atoms().size() == mu.atoms().size());
  CHECK(back.has_density() == mu.has_density());
  CHECK(back.decay_weight() == doctest::Approx(mu.decay_weight()));
  for (double t : {-4.0, 0.3, 2.9})
    CHECK(std::abs(fourier(back, t) - fourier(mu, t)) < 1e-14);
}

TEST_CASE("malformed measure files raise config errors") {
  std::stringstream bad1("atom 1.0 2.0\n");
  CHECK_THROWS_AS(load_measure(bad1), ConfigError);
  std::stringstream bad2("blob 1 2 3\n");
  CHECK_THROWS_AS(load_measure(bad2), ConfigError);
  std::stringstream bad3("density 0 0.5 4\n1 0\n2 0\n");
  CHECK_THROWS_AS(load_measure(bad3), ConfigError);
}

TEST_CASE("constructor rejects malformed densities") {
  VecC odd(3);
  odd << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(Measure::from_density({0.0, 0.1, odd}, 1.0), DimensionMismatch);
  VecC ok(4);
  ok << 1.0, 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(Measure::from_density({0.0, -0.1, ok}, 1.0), Error);
}
