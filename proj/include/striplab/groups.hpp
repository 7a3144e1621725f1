#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "striplab/gridfn.hpp"
#include "striplab/interp.hpp"
#include "striplab/numeric.hpp"

// Concrete one-parameter group models U(s) = exp(-isA) on finite state
// vectors: the periodic shift model (A = i d/dt on a sample grid), pointwise
// multiplication models (A = a(t)), and matrix generators.

namespace striplab {

enum class GroupKind { Shift, Multiplication, Matrix };

class GroupModel {
 public:
  // translation group U(s)f = f(. + s) on L^p of the grid, acting per fiber
  static GroupModel shift(const GridSpec& spec, double bochner_p = 2.0);
  // U(s) = pointwise multiplication by exp(-is a(t))
  static GroupModel multiplication(const GridSpec& spec, std::function<double(double)> symbol,
                                   double bochner_p = 2.0);
  // U(s) = exp(-isA) by eigendecomposition, or Pade scaling-and-squaring
  // when the eigenvector basis is ill-conditioned
  static GroupModel matrix(const MatC& generator, double exponent = 2.0);

  GroupKind kind() const { return kind_; }
  Eigen::Index state_dim() const;
  double exponent() const { return p_; }
  const GridSpec& grid() const { return spec_; }
  const MatC& generator_matrix() const { return gen_; }

  VecC apply_group(double s, const VecC& x) const;
  VecC apply_generator(const VecC& x) const;
  VecC resolvent(cplx lambda, const VecC& x) const;  // (lambda - A)^{-1} x

  double state_norm(const VecC& x) const;
  double domain_norm(const VecC& x) const;  // ||x|| + ||Ax||

  // largest |Im eigenvalue| of the generator (0 for the function models)
  double spectral_bound() const;
  double spectrum_distance(cplx lambda) const;

  // coordinates in which the generator acts diagonally (spectral coefficients
  // for the translation model, eigenvector coordinates for a diagonalizable
  // matrix, the state itself otherwise); nonlinear sequence acceleration is
  // only componentwise-exact in this frame
  VecC to_eigenframe(const VecC& x) const;
  VecC from_eigenframe(const VecC& y) const;

 private:
  GroupModel() = default;
  VecC frequency_multiply(const VecC& x, const std::function<cplx(double)>& factor) const;

  GroupKind kind_ = GroupKind::Matrix;
  double p_ = 2.0;
  GridSpec spec_{};
  VecR symbol_values_;  // multiplication model: a(t_j)
  MatC gen_;            // matrix model
  // cached spectral data for the matrix model
  VecC eigenvalues_;
  MatC eigvec_, eigvec_inv_;
  bool diagonalizable_ = false;
};

// interpolation couple (X, D(A)): X carries state_norm, D(A) the Hilbertian
// graph norm sqrt(state_norm(x)^2 + state_norm(Ax)^2), which is equivalent to
// the additive graph norm within sqrt(2).  Exponent-2 models get the exact
// quadratic solver structures (spectral frame for the shift model, pointwise
// weights for multiplication, stacked [I; A] for matrices); other exponents
// fall back to subgradient descent with exact norm subgradients.
InterpCouple group_couple(const GroupModel& g);

struct GroupTypeEstimate {
  double growth_constant = 1.0;  // M_hat >= 1
  double growth_rate = 0.0;      // theta_hat >= 0
  bool polynomial_growth = false;
  double fit_residual = 0.0;  // rms residual of the log-linear fit
};

// samples ||U(s)|| on [0, s_max], fits log-norm against rate*s + log M on the
// tail half, and pins M_hat so the bound holds at every sample
GroupTypeEstimate estimate_group_type(const GroupModel& g, double s_max = 200.0,
                                      int samples = 64);

struct NormEstimate {
  double lower = 0.0;
  double upper = 0.0;
};

// operator norm of a materialized matrix on l^p: exact column/row sums for
// p = 1/inf, power iteration for p = 2, nonlinear power ascent (lower) with a
// Riesz-Thorin cross bound (upper) otherwise
NormEstimate operator_norm(const MatC& m, double p, int restarts = 8, std::uint64_t seed = 1);

// named multiplication symbols for config files
std::function<double(double)> symbol_affine(double slope, double offset);
std::function<double(double)> symbol_sine(double amplitude, double angular_rate);
std::function<double(double)> symbol_step(double level);  // level * sign(t)

}  // namespace striplab
