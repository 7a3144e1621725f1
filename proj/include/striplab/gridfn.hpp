#pragma once

#include <functional>
#include <iosfwd>

#include "striplab/measure.hpp"
#include "striplab/numeric.hpp"

// Vector-valued functions sampled on the symmetric grid t_j = -R + j*h.
// Values are stored sample-major (N x d), so each fiber component is a
// contiguous column the FFT can run over directly.

namespace striplab {

struct GridSpec {
  double half_length = 16.0;  // R
  int samples = 512;          // N, power of two, >= 8
  int fiber_dim = 1;          // d
  double fiber_exponent = 2;  // norm exponent inside each fiber

  double spacing() const { return 2.0 * half_length / samples; }
  double point(int j) const { return -half_length + spacing() * j; }
  double frequency(int m) const;
  double nyquist() const { return M_PI * samples / (2.0 * half_length); }
  void validate() const;  // throws on malformed specs
  bool same_grid(const GridSpec& o) const {
    return half_length == o.half_length && samples == o.samples && fiber_dim == o.fiber_dim;
  }
};

class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const GridSpec& spec);  // zero samples
  GridFunction(const GridSpec& spec, MatC samples);

  static GridFunction from_scalar(const GridSpec& spec, const std::function<cplx(double)>& f);

  const GridSpec& spec() const { return spec_; }
  const MatC& samples() const { return vals_; }
  MatC& samples() { return vals_; }
  cplx& at(int j, int comp = 0) { return vals_(j, comp); }
  cplx at(int j, int comp = 0) const { return vals_(j, comp); }

  // flattened state vector (column-stacked), for solver interfaces
  VecC flatten() const;
  static GridFunction unflatten(const GridSpec& spec, const VecC& v);

 private:
  GridSpec spec_;
  MatC vals_;
};

// (h * sum_j ||f(t_j)||_fiber^p)^{1/p}; p = infty takes the max over samples
double lp_norm(const GridFunction& f, double p);
// ||f||_p + ||f'||_p with the derivative taken spectrally
double sobolev_norm(const GridFunction& f, double p);

// spectral coefficients (N x d) and their inverse
MatC spectrum(const GridFunction& f);
GridFunction from_spectrum(const GridSpec& spec, const MatC& coeffs);

GridFunction derivative(const GridFunction& f);
// translate by s: result(t) = f(t - s), done by frequency-domain phases
GridFunction translate(const GridFunction& f, double s);

// mu * f by multiplying the spectrum with the measure's Fourier transform;
// warns via diag when the measure support exceeds R/2 (periodic wrap-around)
GridFunction convolve_measure(const Measure& mu, const GridFunction& f,
                              Diagnostics* diag = nullptr);

// CSV with columns t, re_1, im_1, ..., re_d, im_d (17 significant digits)
void save_csv(std::ostream& os, const GridFunction& f);
GridFunction load_csv(std::istream& is);

}  // namespace striplab
