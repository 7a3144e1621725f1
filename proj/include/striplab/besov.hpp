#pragma once

#include <functional>
#include <vector>

#include "striplab/gridfn.hpp"

// Dyadic frequency decomposition, Besov norms, Fourier multipliers, and the
// two multiplier-size functionals used by the transference experiments.

namespace striplab {

// normalized smooth bump c1*exp(1/(s^2-1)) on (-1,1), zero outside, integral 1
double bump(double s);
// integral of the bump over (-inf, s]; smooth, 0 at -1, 1 at +1
double bump_cdf(double s);
// smooth decreasing profile: 1 for s <= 1, 0 for s >= 2
double lowpass_profile(double s);
// annulus profile lowpass(s) - lowpass(2s): supported in [1/2, 2], equals 1 at s=1
double band_profile(double s);

// partition of unity over dyadic frequency bands on a grid: level 0 is the
// lowpass block, level k >= 1 covers 2^{k-1} <= |xi| <= 2^{k+1}; levels sum
// to one exactly for |xi| <= 2^max_level, which covers the grid Nyquist
class DyadicPartition {
 public:
  explicit DyadicPartition(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int max_level() const { return max_level_; }
  double level_symbol(int k, double xi) const;

 private:
  GridSpec spec_;
  int max_level_ = 1;
};

DyadicPartition build_partition(const GridSpec& spec);

// l^q norm over k of 2^{kr} * lp_norm(block_k f, p); block_k multiplies the
// spectrum by level k of the partition.  Per-block weighted norms are exposed
// through block_norms when given.
double besov_norm(const GridFunction& f, double r, double p, double q,
                  std::vector<double>* block_norms = nullptr);

struct MultiplierSymbol {
  std::function<cplx(double)> value;
  std::function<cplx(double)> derivative;  // leave empty when unavailable
};

// pointwise spectrum multiplication by m(xi)
GridFunction multiplier_apply(const MultiplierSymbol& m, const GridFunction& f);

// search grid for the derivative-based multiplier norm: a symmetric linear
// window plus log-spaced points out to max_abs, then golden-section polish
struct FrequencyScan {
  double linear_half_width = 8.0;
  int linear_points = 2049;
  double max_abs = 1e4;
  int points_per_decade = 64;
};

// sup over the scan of |m(s)| + (1+|s|)|m'(s)|; throws MissingDerivative
double mikhlin_norm(const MultiplierSymbol& m, const FrequencyScan& scan = {});

// max over partition levels k of inf_a || (phi_k m)(a .) ||_{B^{1/2}_{2,1}},
// the inner norm taken on a fixed fine grid; the dilation search runs over
// log2 a in [-20,20] clipped per level so the dilated band stays inside the
// inner window and spans enough samples to be resolved
double girardi_weis_bound(const MultiplierSymbol& m, const GridSpec& spec,
                          std::vector<double>* block_values = nullptr);

}  // namespace striplab
