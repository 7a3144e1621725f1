#pragma once

#include <functional>
#include <vector>

#include "striplab/groups.hpp"
#include "striplab/measure.hpp"
#include "striplab/numeric.hpp"

// Function calculus for group generators: integration of the group against a
// measure, boundary Cauchy integrals over a horizontal strip, regularized
// limits for bounded symbols, weighted sup norms on strips and sectors, and
// principal-value group integrals.

namespace striplab {

// Holomorphic function on the strip {|Im z| < width}, given by value and
// derivative evaluators.  decay_order > 1 certifies |f(z)| <= c|Re z|^(-order)
// for large |Re z|, which makes the boundary integral absolutely convergent;
// decay_order = 0 means no decay is certified.
struct StripFunction {
  std::function<cplx(cplx)> eval;
  std::function<cplx(cplx)> deriv;
  double width = infty;
  double decay_order = 0.0;

  bool elementary() const { return decay_order > 1.0; }
};

// builtin symbol library
StripFunction strip_const(cplx c);
StripFunction strip_tau(double k);                 // -k^2 (ik - z)^{-2}
StripFunction strip_inv_shift(cplx pole);          // (pole - z)^{-1}
StripFunction strip_inv_shift_squared(cplx pole);  // (pole - z)^{-2}
StripFunction strip_gauss();                       // exp(-z^2/2)
StripFunction strip_exp_mode(double rate);         // exp(i rate z)
StripFunction strip_product(const StripFunction& f, const StripFunction& g);

// x -> integral of U(s)x against mu: atom sum plus trapezoid quadrature of the
// density part.  Throws GrowthMismatch when the certified decay of mu cannot
// dominate the measured growth of the group.
VecC phillips_apply(const GroupModel& g, const Measure& mu, const VecC& x);

struct ContourResult {
  VecC value;
  double tail_bound = 0.0;  // certified error from truncating the contour
  double trunc = 0.0;       // |Re z| reach actually used
};

// 1/(2 pi i) times the integral of f(z) R(z,A)x over the two boundary lines
// Im z = +-omega_prime of the strip, positively oriented.  The lines are
// parametrized by Re z = sinh(u) so a uniform trapezoid rule in u reaches far
// into the tails; trunc = 0 picks the reach from the certified decay.
// Throws NotElementary when decay_order <= 1, StripOrder when the ordering
// growth(g) < omega_prime < f.width fails.
ContourResult cauchy_strip_apply(const GroupModel& g, const StripFunction& f,
                                 double omega_prime, const VecC& x, double trunc = 0.0,
                                 int nodes_per_line = 4096);

struct RegularizationReport {
  std::vector<double> k_values;
  std::vector<double> residuals;  // successive accelerated-iterate differences, relative
  VecC value;
  bool converged = false;
};

// Applies f(A)x for bounded f by regularizing with tau_k over an increasing
// schedule and extracting the limit of the iterates by polynomial
// extrapolation in 1/k.  Throws NoConvergence when the residuals stagnate
// above tol.
RegularizationReport regularized_apply(const GroupModel& g, const StripFunction& f,
                                       const VecC& x, std::vector<double> k_schedule = {},
                                       double tol = 1e-4);

// sampling density for the sup-norm scans on strips and sectors
struct StripScan {
  double linear_half_width = 8.0;  // dense linear window on each line
  int linear_points = 641;
  double max_abs = 1e4;  // log-spaced extension out to this |Re z|
  int points_per_decade = 48;
  int interior_rows = 4;  // sampled lines strictly inside the strip, per sign
};

// sup over the strip of |f(z)| + (1+|z|)|f'(z)|; reports the explicit infinity
// flag when the per-decade maxima keep growing out to the truncation edge.
ExtReal hinf1_norm(const StripFunction& f, double omega, const StripScan& scan = {});

// even bounded-variation weight for the principal-value integral
struct PvWeight {
  std::function<double(double)> eval;
  double variation_bound = 0.0;
};

struct PvResult {
  VecC value;  // the eps -> 0 limit
  std::vector<double> epsilons;
  std::vector<double> residuals;  // distance from the truncated integral to the limit
};

// lim_{eps -> 0} of the integral of w(s) U(s)x ds/s over eps <= |s| <= 1.
// The pairing s <-> -s turns the integrand into w(s)(U(s) - U(-s))x / s, which
// extends smoothly across s = 0; the limit is its quadrature over [0,1] and
// the schedule entries give the truncated integrals and their residuals.
// Throws NoConvergence when the residuals fail to contract.
PvResult pv_group_integral(const GroupModel& g, const PvWeight& w, const VecC& x,
                           std::vector<double> eps_schedule = {});

// function on the sector {|arg w| < half_angle} with derivative
struct SectorFunction {
  std::function<cplx(cplx)> eval;
  std::function<cplx(cplx)> deriv;
  double half_angle = 0.0;
};

SectorFunction sector_const(cplx c);
SectorFunction sector_rational();  // w / (1 + w)^2

// g = f o exp on the strip of half-width f.half_angle, g'(z) = e^z f'(e^z)
StripFunction sector_pullback(const SectorFunction& f);

// sup over the sector of |f(w)| + (1 + |log w|)|w f'(w)|, scanned on the polar
// grid matching the strip scan under w = exp(z)
ExtReal hinf_log_norm(const SectorFunction& f, const StripScan& scan = {});

}  // namespace striplab
