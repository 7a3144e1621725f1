#pragma once

#include <cstdint>
#include <vector>

#include "striplab/gridfn.hpp"
#include "striplab/groups.hpp"
#include "striplab/interp.hpp"
#include "striplab/measure.hpp"

// Transference of convolution operators through a group: the factorization
// "apply the measure to the group" = "average (P) after convolving (L) the
// embedded orbit (iota)", with window kernels that either have compact
// support (bounded groups) or sech-type decay beating a cosh weight
// (exponentially growing groups), plus the resulting norm-comparison checks.

namespace striplab {

enum class TransferMode { Bounded, Unbounded };

struct TransferKernels {
  TransferMode mode = TransferMode::Bounded;
  GridFunction psi;  // embedding window: iota x(s) = psi(-s) U(-s) x
  GridFunction phi;  // averaging window: P F = integral of phi(s) U(s) F(s)

  // bounded mode: psi == 1 on [-(flat_radius + 2*smoothing + margin), ...],
  // supp phi inside [-(2*smoothing + margin), ...], psi * phi == 1 on
  // [-flat_radius, flat_radius]
  double flat_radius = 0.0;  // N
  double smoothing = 0.0;    // alpha: mollifier scale / sech rate
  double margin = 0.0;       // beta: extra plateau width (bounded mode only)
  // unbounded mode: (psi * phi)(r) * cosh(weight_rate * r) == 1 when
  // smoothing == 2 * weight_rate
  double weight_rate = 0.0;  // omega

  const GridSpec& grid() const { return psi.spec(); }
};

// plateau windows built from the mollifier cumulative: psi is the mollified
// indicator of half-width flat_radius + 3*smoothing + margin, phi the
// normalized mollified indicator of half-width smoothing + margin; requires
// half_length >= 2*(flat_radius + 3*smoothing + margin)
TransferKernels build_kernels_bounded(double flat_radius, double smoothing, double margin,
                                      const GridSpec& spec);

// sech windows: psi(s) = sech(smoothing*s), phi(s) =
// sqrt(8)*rate/pi * cosh(rate*s)/cosh(2*rate*s); requires smoothing > rate
TransferKernels build_kernels_unbounded(double weight_rate, double smoothing,
                                        const GridSpec& spec);

// orbit embedding: grid function s -> psi(-s) U(-s) x with fiber dimension
// equal to the state dimension
GridFunction iota_map(const TransferKernels& k, const GroupModel& g, const VecC& x);

// averaging projection: grid quadrature of phi(s) U(s) F(s)
VecC p_map(const TransferKernels& k, const GroupModel& g, const GridFunction& f);

struct FactorizationReport {
  std::vector<double> residuals;  // per probe, relative to the state norm
  double max_residual = 0.0;
};

// verifies "measure applied to the group" == p_map(convolve(iota)) on random
// probes; bounded mode requires supp mu inside [-flat_radius, flat_radius],
// unbounded mode convolves with the cosh-weighted measure and requires the
// certified decay to exceed weight_rate
FactorizationReport factorization_check(const TransferKernels& k, const GroupModel& g,
                                        const Measure& mu, int probes, std::uint64_t seed,
                                        double tol = 1e-5);

struct MapBoundsReport {
  double embedding = 0.0;          // ||iota x||_p / (||psi||_p ||x||)
  double projection = 0.0;         // ||P F|| / (||phi||_{p'} ||F||_p)
  double embedding_smooth = 0.0;   // smooth-level embedding ratio
  double projection_domain = 0.0;  // graph-norm-level projection ratio
  double growth_constant = 1.0;    // admissible bound M_hat for the ratios
};

// checks the four operator bounds: ||iota x||_p <= M ||psi||_p ||x||,
// ||P F|| <= M ||phi||_{p'} ||F||_p, and their Sobolev/graph-norm versions
// with the kernels measured in W^{1,p} resp. W^{1,p'}; throws CheckFailed
// when a ratio exceeds growth_constant + tol
MapBoundsReport map_bounds_check(const TransferKernels& k, const GroupModel& g, int probes,
                                 std::uint64_t seed, double tol = 1e-6);

struct EmbeddingConstReport {
  double measured = 0.0;  // worst sobolev_norm(iota x, p) / domain_norm(x)
  double bound = 0.0;     // M*(smoothing+1)*|| cosh(rate .)/cosh(smoothing .) ||_p
};

// unbounded-mode embedding constant check with the explicit cosh-ratio bound
EmbeddingConstReport unbounded_embedding_check(const TransferKernels& k, const GroupModel& g,
                                               int probes, std::uint64_t seed);

struct ConvNormEstimate {
  double lower = 0.0;  // probe ascent over random band-limited functions
  double upper = 0.0;  // kappa * derivative-functional bound of the transform
};

// operator norm of "convolve with mu" on the interpolation space of smoothness
// theta between L^p and W^{1,p} realized on the given grid
ConvNormEstimate convolution_norm_estimate(const Measure& mu, const GridSpec& spec, double theta,
                                           double q, double p, int probes, std::uint64_t seed,
                                           double kappa = 1.0);

struct TransferenceOptions {
  double calibration = 2.0;    // C_cal: asserted ceiling is calibration * M_hat^2
  double kappa = 1.0;          // scale for the reported upper estimate
  int ascent_probes = 64;      // probes for the convolution-norm lower bound
  double band_fraction = 0.25; // spectral support fraction of random probes
};

struct TransferenceReport {
  std::vector<double> lhs, rhs, ratios;  // per probe
  double max_ratio = 0.0;
  double conv_lower = 0.0;      // convolution-norm ascent used in the ratios
  double conv_upper = 0.0;      // kappa-scaled derivative-functional bound
  double growth_constant = 1.0; // M_hat
};

// per probe x: interpolation norm of the group-applied measure over
// conv-norm * interpolation norm of x; asserts max ratio <=
// calibration * M_hat^2 (CheckFailed otherwise)
TransferenceReport transference_check(const TransferKernels& k, const GroupModel& g,
                                      const Measure& mu, double theta, double q, double p,
                                      int probes, std::uint64_t seed,
                                      const TransferenceOptions& opt = {});

}  // namespace striplab
