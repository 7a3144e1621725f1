#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "striplab/errors.hpp"
#include "striplab/interp.hpp"
#include "striplab/rng.hpp"

using namespace striplab;

namespace {

VecC random_state(Rng& rng, Eigen::Index dim) {
  VecC z(dim);
  for (Eigen::Index j = 0; j < dim; ++j) z[j] = rng.cnormal();
  return z;
}

// closed form for the same-norm couple
double xx_interp_closed(double theta, double q, double norm) {
  return std::pow(1.0 / ((1.0 - theta) * q) + 1.0 / (theta * q), 1.0 / q) * norm;
}

}  // namespace

TEST_CASE("same-norm couple has K = min(1,t) norm") {
  Rng rng(41);
  const InterpCouple c = same_norm_couple(12);
  const VecC z = random_state(rng, 12);
  for (double t : {0.01, 0.3, 1.0, 2.5, 40.0})
    CHECK(k_functional(c, z, t) == doctest::Approx(std::min(1.0, t) * z.norm()).epsilon(1e-9));
}

TEST_CASE("scaled one-dimensional couple") {
  const InterpCouple c = scaled_couple(1, 3.0);
  VecC z(1);
  z[0] = cplx(2.0, -1.0);
  for (double t : {0.05, 1.0 / 3.0, 0.5, 7.0})
    CHECK(k_functional(c, z, t) == doctest::Approx(std::min(1.0, 3.0 * t) * z.norm()).epsilon(1e-9));
}

TEST_CASE("diagonal l1 couple reaches the coordinatewise optimum") {
  Rng rng(42);
  VecR diag(10);
  for (int j = 0; j < 10; ++j) diag[j] = rng.uniform(-6.0, 6.0);
  const InterpCouple c = diagonal_l1_couple(diag);
  for (int trial = 0; trial < 4; ++trial) {
    const VecC z = random_state(rng, 10);
    for (double t : {0.02, 0.2, 1.0, 8.0}) {
      double want = 0.0;
      for (int j = 0; j < 10; ++j)
        want += std::min(1.0, t * (1.0 + std::abs(diag[j]))) * std::abs(z[j]);
      const double got = k_functional(c, z, t);
      CHECK(got == doctest::Approx(want).epsilon(1e-6));
      CHECK(got <= want * (1.0 + 1e-12));  // solver reports a feasible value
    }
  }
}

TEST_CASE("K never exceeds the endpoint cap and stays positive") {
  Rng rng(43);
  MatC bx = MatC::Identity(6, 6), by(8, 6);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 6; ++j) by(i, j) = rng.cnormal();
  const InterpCouple c = dense_l2_couple(bx, by);
  const VecC z = random_state(rng, 6);
  for (double t : {0.001, 0.1, 1.0, 30.0}) {
    const double k = k_functional(c, z, t);
    CHECK(k > 0.0);
    CHECK(k <= std::min(c.norm_x(z), t * c.norm_y(z)) * (1.0 + 1e-12));
  }
}

TEST_CASE("K is nondecreasing and concave in t") {
  Rng rng(44);
  VecR wx = VecR::Ones(9), wy(9);
  for (int j = 0; j < 9; ++j) wy[j] = 1.0 + std::abs(rng.normal());
  const InterpCouple c = diagonal_l2_couple(wx, wy);
  const VecC z = random_state(rng, 9);
  std::vector<double> ts, ks;
  for (int i = 0; i <= 24; ++i) ts.push_back(0.05 + 0.15 * i);
  for (double t : ts) ks.push_back(k_functional(c, z, t));
  for (std::size_t i = 0; i + 1 < ks.size(); ++i)
    CHECK(ks[i + 1] >= ks[i] * (1.0 - 1e-6));
  for (std::size_t i = 1; i + 1 < ks.size(); ++i)
    CHECK(ks[i] >= 0.5 * (ks[i - 1] + ks[i + 1]) * (1.0 - 1e-6));
}

TEST_CASE("interp norm closed forms on the same-norm couple") {
  Rng rng(45);
  const InterpCouple c = same_norm_couple(8);
  const VecC z = random_state(rng, 8);
  const double nz = z.norm();
  CHECK(interp_norm(c, z, 0.5, 2.0) == doctest::Approx(std::sqrt(2.0) * nz).epsilon(1e-3));
  for (double theta : {0.25, 0.5, 0.7})
    for (double q : {1.0, 1.4, 2.0, 3.5})
      CHECK(interp_norm(c, z, theta, q) ==
            doctest::Approx(xx_interp_closed(theta, q, nz)).epsilon(1e-3));
  CHECK(interp_norm(c, VecC::Zero(8), 0.5, 2.0) == 0.0);
}

TEST_CASE("interp norm sup form") {
  Rng rng(46);
  const InterpCouple c = same_norm_couple(5);
  const VecC z = random_state(rng, 5);
  // sup_t t^{-theta} min(1,t) ||z|| = ||z||, attained at t = 1 (a grid node)
  CHECK(interp_norm(c, z, 0.35, infty) == doctest::Approx(z.norm()).epsilon(1e-9));
}

TEST_CASE("interp norm is a norm") {
  Rng rng(47);
  VecR wx = VecR::Ones(7), wy(7);
  for (int j = 0; j < 7; ++j) wy[j] = 1.0 + 2.0 * rng.uniform();
  const InterpCouple c = diagonal_l2_couple(wx, wy);
  const VecC a = random_state(rng, 7), b = random_state(rng, 7);
  const double na = interp_norm(c, a, 0.4, 2.0);
  const double nb = interp_norm(c, b, 0.4, 2.0);
  const double nab = interp_norm(c, a + b, 0.4, 2.0);
  CHECK(nab <= (na + nb) * (1.0 + 1e-6));
  const double nsc = interp_norm(c, VecC(cplx(-2.5, 1.0) * a), 0.4, 2.0);
  CHECK(nsc == doctest::Approx(std::abs(cplx(-2.5, 1.0)) * na).epsilon(1e-6));
}

TEST_CASE("interpolation inequality for simple maps") {
  const InterpCouple c = same_norm_couple(6);
  const auto ident = [](const VecC& v) { return v; };
  const InterpCheckReport r1 = interp_inequality_check(c, ident, 1.0, 1.0, 0.5, 2.0, 10, 101);
  CHECK(r1.worst_ratio <= 1.0 + 1e-9);
  CHECK(r1.probes == 10);

  const auto triple = [](const VecC& v) { return VecC(cplx(-3.0, 0.0) * v); };
  const InterpCheckReport r2 = interp_inequality_check(c, triple, 3.0, 3.0, 0.5, 2.0, 10, 102);
  CHECK(r2.worst_ratio <= 1.0 + 1e-9);

  // claiming too-small endpoint bounds must trip the check
  CHECK_THROWS_AS(interp_inequality_check(c, triple, 1.0, 1.0, 0.5, 2.0, 5, 103), CheckFailed);
}

TEST_CASE("interpolation inequality for a diagonal resolvent") {
  Rng rng(48);
  VecR diag(16);
  for (int j = 0; j < 16; ++j) diag[j] = rng.uniform(-5.0, 5.0);
  VecR wx = VecR::Ones(16);
  VecR wy = VecR::Ones(16) + diag.cwiseAbs();
  InterpCouple c = diagonal_l2_couple(wx, wy);
  c.options.refine_iterations = 150;

  const cplx lambda(0.3, 2.0);  // stays off the real spectrum
  double bound = 0.0;
  for (int j = 0; j < 16; ++j) bound = std::max(bound, 1.0 / std::abs(lambda - diag[j]));
  const auto resolvent = [&](const VecC& v) {
    VecC out(16);
    for (int j = 0; j < 16; ++j) out[j] = v[j] / (lambda - diag[j]);
    return out;
  };
  const InterpCheckReport r =
      interp_inequality_check(c, resolvent, bound, bound, 0.5, 2.0, 100, 104);
  CHECK(r.worst_ratio <= 1.0 + 1e-9);
  CHECK(r.probes == 100);
}

TEST_CASE("solver guard rails") {
  const InterpCouple c = same_norm_couple(4);
  CHECK_THROWS_AS(k_functional(c, VecC::Zero(3), 1.0), DimensionMismatch);
  CHECK_THROWS_AS(k_functional(c, VecC::Zero(4), -1.0), Error);
  CHECK_THROWS_AS(interp_norm(c, VecC::Zero(4), 1.5, 2.0), ParameterOrder);

  InterpCouple bad = same_norm_couple(4);
  bad.norm_y = [](const VecC&) { return std::nan(""); };
  CHECK_THROWS_AS(k_functional(bad, VecC::Ones(4), 1.0), SolverDiverged);
}
