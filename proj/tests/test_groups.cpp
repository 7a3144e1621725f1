#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "striplab/errors.hpp"
#include "striplab/groups.hpp"
#include "striplab/numeric.hpp"
#include "striplab/random.hpp"
#include "striplab/rng.hpp"

using namespace striplab;

namespace {

const GridSpec kSpec{16.0, 256, 1, 2.0};

VecC random_vec(Rng& rng, Eigen::Index n) {
  VecC x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.cnormal();
  return x;
}

GridFunction mode(const GridSpec& spec, int m) {
  MatC c = MatC::Zero(spec.samples, spec.fiber_dim);
  c(m, 0) = 1.0;
  return from_spectrum(spec, c);
}

}  // namespace

TEST_CASE("group identity at s = 0") {
  Rng rng(61);
  const GroupModel shift = GroupModel::shift(kSpec);
  const VecC f = random_bandlimited(rng, kSpec).flatten();
  CHECK((shift.apply_group(0.0, f) - f).cwiseAbs().maxCoeff() < 1e-14);

  MatC a(2, 2);
  a << cplx(0.2, 1.0), cplx(0.0, 0.3), cplx(0.0), cplx(-0.4, 0.0);
  const GroupModel mat = GroupModel::matrix(a);
  const VecC x = random_vec(rng, 2);
  CHECK((mat.apply_group(0.0, x) - x).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("shift by a lattice step is a circular shift") {
  Rng rng(62);
  const GroupModel shift = GroupModel::shift(kSpec);
  const VecC f = random_bandlimited(rng, kSpec).flatten();
  const int steps = 17;
  const VecC g = shift.apply_group(steps * kSpec.spacing(), f);
  // U(s)f(t) = f(t + s): sample j of the result is sample j + steps of f
  for (int j = 0; j < kSpec.samples; ++j)
    CHECK(std::abs(g[j] - f[(j + steps) % kSpec.samples]) < 1e-12);
}

TEST_CASE("matrix group on a real diagonal generator") {
  MatC a = MatC::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1.0;
  const GroupModel g = GroupModel::matrix(a);
  Rng rng(63);
  const VecC x = random_vec(rng, 2);
  const VecC y = g.apply_group(M_PI, x);
  CHECK((y + x).cwiseAbs().maxCoeff() < 1e-12);  // e^{-i pi diag(1,-1)} = -I
}

TEST_CASE("group law holds across variants") {
  Rng rng(64);
  std::vector<GroupModel> models;
  models.push_back(GroupModel::shift(kSpec, 2.0));
  models.push_back(GroupModel::multiplication(kSpec, symbol_sine(2.0, 0.7), 2.0));
  MatC a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = 0.5 * rng.cnormal();
  models.push_back(GroupModel::matrix(a));
  MatC jordan = MatC::Zero(2, 2);
  jordan(0, 1) = 1.0;
  models.push_back(GroupModel::matrix(jordan));  // defective: exponential path

  for (const GroupModel& g : models) {
    for (int trial = 0; trial < 5; ++trial) {
      const VecC x = g.kind() == GroupKind::Shift
                         ? VecC(random_bandlimited(rng, kSpec).flatten())
                         : random_vec(rng, g.state_dim());
      const double s = rng.uniform(-3.0, 3.0), r = rng.uniform(-3.0, 3.0);
      const VecC lhs = g.apply_group(s, g.apply_group(r, x));
      const VecC rhs = g.apply_group(s + r, x);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + x.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("resolvent closed forms") {
  // zero generator: R(2, 0) x = x / 2
  const GroupModel zero = GroupModel::matrix(MatC::Zero(2, 2));
  Rng rng(65);
  const VecC x = random_vec(rng, 2);
  CHECK((zero.resolvent(2.0, x) - 0.5 * x).cwiseAbs().maxCoeff() < 1e-14);

  // diagonal generator: componentwise division
  MatC d = MatC::Zero(3, 3);
  d(0, 0) = cplx(1.0, 0.5);
  d(1, 1) = cplx(-2.0, 0.0);
  d(2, 2) = cplx(0.0, -1.0);
  const GroupModel diag = GroupModel::matrix(d);
  const VecC v = random_vec(rng, 3);
  const cplx lambda(0.7, 2.0);
  const VecC got = diag.resolvent(lambda, v);
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(got[j] - v[j] / (lambda - d(j, j))) < 1e-12);

  // shift model: a pure mode with generator eigenvalue -xi_m divides by
  // (lambda - eigenvalue)
  const GroupModel shift = GroupModel::shift(kSpec);
  const int m = 23;
  const double eig = -kSpec.frequency(m);
  const VecC f = mode(kSpec, m).flatten();
  const VecC rf = shift.resolvent(cplx(0.0, 1.0), f);
  const cplx want = 1.0 / (cplx(0.0, 1.0) - eig);
  CHECK((rf - want * f).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("resolvent identity") {
  Rng rng(66);
  MatC a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = rng.cnormal();
  std::vector<GroupModel> models;
  models.push_back(GroupModel::matrix(a));
  models.push_back(GroupModel::shift(kSpec));
  models.push_back(GroupModel::multiplication(kSpec, symbol_affine(0.5, 1.0)));
  const cplx lam(0.3, 7.0), mu(-1.2, -5.5);
  for (const GroupModel& g : models) {
    const VecC x = random_vec(rng, g.state_dim());
    const VecC lhs = g.resolvent(lam, x) - g.resolvent(mu, x);
    const VecC rhs = (mu - lam) * g.resolvent(lam, g.resolvent(mu, x));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + x.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("near-spectrum guard") {
  const GroupModel shift = GroupModel::shift(kSpec);
  const VecC f = mode(kSpec, 10).flatten();
  CHECK_THROWS_AS(shift.resolvent(-kSpec.frequency(40), f), NearSpectrum);

  MatC d = MatC::Zero(2, 2);
  d(0, 0) = cplx(1.0, 2.0);
  d(1, 1) = 3.0;
  const GroupModel mat = GroupModel::matrix(d);
  CHECK_THROWS_AS(mat.resolvent(cplx(1.0, 2.0), VecC::Ones(2)), NearSpectrum);
  CHECK_NOTHROW(mat.resolvent(cplx(1.0, -2.0), VecC::Ones(2)));

  const GroupModel mult = GroupModel::multiplication(kSpec, symbol_step(2.0));
  CHECK_THROWS_AS(mult.resolvent(2.0, VecC::Ones(mult.state_dim())), NearSpectrum);
}

TEST_CASE("generator matches the group derivative at first order") {
  Rng rng(67);
  std::vector<GroupModel> models;
  models.push_back(GroupModel::shift(kSpec));
  models.push_back(GroupModel::multiplication(kSpec, symbol_sine(1.5, 0.4)));
  MatC a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = rng.cnormal();
  models.push_back(GroupModel::matrix(a));

  for (const GroupModel& g : models) {
    const VecC x = g.kind() == GroupKind::Shift
                       ? VecC(random_bandlimited(rng, kSpec, 0.25).flatten())
                       : random_vec(rng, g.state_dim());
    const VecC ax = g.apply_generator(x);
    auto err = [&](double h) {
      const VecC diff = (g.apply_group(h, x) - x) / h + cplx(0.0, 1.0) * ax;
      return diff.cwiseAbs().maxCoeff();
    };
    // d/ds U(s)|_0 = -iA, so the forward difference converges at order >= 0.9
    const double e1 = err(1e-3), e2 = err(5e-4);
    CHECK(e1 < 0.1);
    const double order = std::log2(e1 / e2);
    CHECK(order >= 0.9);
  }
}

TEST_CASE("domain norm closed forms") {
  const GroupModel zero = GroupModel::matrix(MatC::Zero(3, 3));
  Rng rng(68);
  const VecC x = random_vec(rng, 3);
  CHECK(zero.domain_norm(x) == doctest::Approx(x.norm()).epsilon(1e-12));

  const GroupModel shift = GroupModel::shift(kSpec, 2.0);
  const int m = 40;
  const VecC f = mode(kSpec, m).flatten();
  const double want = (1.0 + std::abs(kSpec.frequency(m))) * std::sqrt(2.0 * kSpec.half_length);
  CHECK(shift.domain_norm(f) == doctest::Approx(want).epsilon(1e-10));
  CHECK(shift.domain_norm(VecC::Zero(shift.state_dim())) == 0.0);
}

TEST_CASE("multiplication group is a pointwise isometry") {
  Rng rng(69);
  const GroupModel g = GroupModel::multiplication(kSpec, symbol_affine(2.0, -1.0), 4.0);
  const VecC x = random_vec(rng, g.state_dim());
  for (double s : {-2.0, 0.4, 11.0}) {
    const VecC y = g.apply_group(s, x);
    CHECK(g.state_norm(y) == doctest::Approx(g.state_norm(x)).epsilon(1e-12));
    for (int j = 0; j < 8; ++j) {
      const double t = kSpec.point(37 * j % kSpec.samples);
      const cplx want = x[37 * j % kSpec.samples] * std::exp(cplx(0.0, -s * (2.0 * t - 1.0)));
      CHECK(std::abs(y[37 * j % kSpec.samples] - want) < 1e-12);
    }
  }
}

TEST_CASE("group type estimates") {
  MatC d = MatC::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -2.5;
  const GroupTypeEstimate unitary = estimate_group_type(GroupModel::matrix(d, 2.0), 50.0, 32);
  CHECK(unitary.growth_constant == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(unitary.growth_rate < 1e-8);
  CHECK_FALSE(unitary.polynomial_growth);

  MatC jordan = MatC::Zero(2, 2);
  jordan(0, 1) = 1.0;
  const GroupTypeEstimate poly = estimate_group_type(GroupModel::matrix(jordan, 2.0));
  CHECK(poly.growth_rate < 0.01);
  CHECK(poly.polynomial_growth);

  MatC rot = MatC::Zero(2, 2);
  rot(0, 0) = cplx(0.0, 1.0);
  rot(1, 1) = cplx(0.0, -1.0);
  const GroupTypeEstimate hyper = estimate_group_type(GroupModel::matrix(rot, 2.0), 40.0, 48);
  CHECK(hyper.growth_rate == doctest::Approx(1.0).epsilon(0.05));
  CHECK_FALSE(hyper.polynomial_growth);

  // the reported pair is a genuine bound on every sample of a fresh sweep
  const GroupModel g = GroupModel::matrix(rot, 2.0);
  for (int i = 1; i <= 20; ++i) {
    const double s = 40.0 * i / 20.0;
    MatC u(2, 2);
    for (int j = 0; j < 2; ++j) {
      VecC e = VecC::Zero(2);
      e[j] = 1.0;
      u.col(j) = g.apply_group(s, e);
    }
    CHECK(operator_norm(u, 2.0).lower <=
          (hyper.growth_constant + 1e-9) * std::exp(hyper.growth_rate * s) * (1.0 + 1e-6));
  }
}

TEST_CASE("operator norms of materialized matrices") {
  MatC n(2, 2);
  n << 0.0, 2.0, 0.0, 0.0;
  CHECK(operator_norm(n, 1.0).lower == doctest::Approx(2.0));
  CHECK(operator_norm(n, 2.0).lower == doctest::Approx(2.0));
  CHECK(operator_norm(n, infty).lower == doctest::Approx(2.0));

  Rng rng(70);
  MatC a(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) a(i, j) = rng.cnormal();
  const double svd = Eigen::JacobiSVD<MatC>(a).singularValues()[0];
  CHECK(operator_norm(a, 2.0).lower == doctest::Approx(svd).epsilon(1e-8));

  // diagonal matrices have p-independent norm max |d_j|
  MatC d = MatC::Zero(3, 3);
  d(0, 0) = cplx(0.0, 3.0);
  d(1, 1) = 1.0;
  d(2, 2) = -2.0;
  const NormEstimate est = operator_norm(d, 3.0);
  CHECK(est.lower == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(est.upper >= est.lower * (1.0 - 1e-12));
  const NormEstimate gen = operator_norm(a, 1.7);
  CHECK(gen.lower <= gen.upper * (1.0 + 1e-12));
  CHECK(gen.lower > 0.0);
}

TEST_CASE("resolvent norm decays away from the strip") {
  // diag(i, -i): spectrum at +-i; sampled resolvent norms shrink as |Im|
  // moves out, for the shift model they obey 1/|Im lambda|
  MatC rot = MatC::Zero(2, 2);
  rot(0, 0) = cplx(0.0, 1.0);
  rot(1, 1) = cplx(0.0, -1.0);
  const GroupModel g = GroupModel::matrix(rot);
  double prev = infty;
  for (double w : {1.5, 2.0, 3.0, 5.0}) {
    double sup = 0.0;
    for (double re : {-4.0, -1.0, 0.0, 2.0, 5.0}) {
      MatC r(2, 2);
      for (int j = 0; j < 2; ++j) {
        VecC e = VecC::Zero(2);
        e[j] = 1.0;
        r.col(j) = g.resolvent(cplx(re, w), e);
      }
      sup = std::max(sup, operator_norm(r, 2.0).lower);
    }
    CHECK(sup < prev);
    prev = sup;
  }

  const GroupModel shift = GroupModel::shift(kSpec);
  Rng rng(71);
  const VecC f = random_bandlimited(rng, kSpec).flatten();
  for (double w : {0.5, 1.0, 4.0}) {
    const double ratio = shift.state_norm(shift.resolvent(cplx(0.3, w), f)) / shift.state_norm(f);
    CHECK(ratio <= 1.0 / w * (1.0 + 1e-9));
  }
}

TEST_CASE("dimension guards") {
  const GroupModel g = GroupModel::shift(kSpec);
  CHECK_THROWS_AS(g.apply_group(1.0, VecC::Ones(5)), DimensionMismatch);
  CHECK_THROWS_AS(g.resolvent(cplx(0, 2.0), VecC::Ones(5)), DimensionMismatch);
  CHECK_THROWS_AS(GroupModel::matrix(MatC::Zero(2, 3)), DimensionMismatch);
}
