#pragma once

#include <cstdint>
#include <functional>

#include "striplab/numeric.hpp"

// K-functionals and real interpolation norms for couples (X, Y) given by
// norms on a common finite-dimensional complex state space.

namespace striplab {

struct SolverOptions {
  int iterations = 2000;        // subgradient steps per start
  int starts = 3;               // y = 0, y = z, y = z/2
  int refine_iterations = 400;  // structure-specific refinement sweeps
  int polish_passes = 2;        // coordinate ray polish rounds
  double tolerance = 1e-10;     // relative stop threshold for refinements
};

// optional structure tags that unlock exact refinements; Generic couples rely
// on the subgradient phase plus the coordinate polish alone
enum class CoupleStructure {
  Generic,
  DiagonalQuadratic,  // norms are weighted l2 in a unitary frame
  DenseQuadratic,     // norms are |B v|_2 for stored matrices
  SeparableWeights,   // norms are weighted l1 in coordinates
};

struct InterpCouple {
  Eigen::Index dim = 0;
  std::function<double(const VecC&)> norm_x, norm_y;
  std::function<VecC(const VecC&)> subgrad_x, subgrad_y;

  CoupleStructure structure = CoupleStructure::Generic;
  // DiagonalQuadratic: unitary frame maps plus per-mode weight multipliers
  std::function<VecC(const VecC&)> to_frame, from_frame;
  VecR weight_x, weight_y;  // also used by SeparableWeights (coordinate weights)
  // DenseQuadratic: norm_x(v) = |quad_x v|_2, norm_y(v) = |quad_y v|_2
  MatC quad_x, quad_y;

  SolverOptions options;
};

// inf over decompositions z = x + y of norm_x(x) + t * norm_y(y); never
// exceeds min(norm_x(z), t * norm_y(z)); throws SolverDiverged on runaway
// iterates or non-finite norms
double k_functional(const InterpCouple& couple, const VecC& z, double t);

// || t^{-theta} K(t,z) ||_{L^q(dt/t)} by composite Simpson in log t over
// [2^{-window}, 2^{window}] plus analytic tails from K(t) <= t*norm_y(z)
// below and K(t) <= norm_x(z) above; q = infinity takes the sup form
double interp_norm(const InterpCouple& couple, const VecC& z, double theta, double q,
                   double window_octaves = 20.0, int nodes_per_octave = 8);

struct InterpCheckReport {
  double worst_ratio = 0.0;
  int probes = 0;
};

// asserts interp_norm(T z) <= bound_x^{1-theta} * bound_y^theta * interp_norm(z)
// for random complex normal probes; throws CheckFailed on a violation
InterpCheckReport interp_inequality_check(const InterpCouple& couple,
                                          const std::function<VecC(const VecC&)>& map,
                                          double bound_x, double bound_y, double theta, double q,
                                          int probes, std::uint64_t seed, double tol = 1e-6);

// couple factories
InterpCouple same_norm_couple(Eigen::Index dim);               // X = Y = l2
InterpCouple scaled_couple(Eigen::Index dim, double factor);   // Y-norm = factor * l2
InterpCouple diagonal_l1_couple(const VecR& generator_diag);   // l1 and sum (1+|a_j|)|.|
InterpCouple diagonal_l2_couple(const VecR& wx, const VecR& wy);  // weighted l2 pair
InterpCouple dense_l2_couple(const MatC& bx, const MatC& by);  // |B .|_2 pair

}  // namespace striplab
