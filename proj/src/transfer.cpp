#include "striplab/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "striplab/besov.hpp"
#include "striplab/calculus.hpp"
#include "striplab/errors.hpp"
#include "striplab/parallel.hpp"
#include "striplab/rng.hpp"

namespace striplab {

namespace {

// overflow-safe sech(a*s) and cosh(a*s)/cosh(b*s) for b >= a >= 0
double stable_sech(double a, double s) {
  const double e = std::exp(-std::abs(a * s));
  return 2.0 * e / (1.0 + e * e);
}

double stable_cosh_ratio(double a, double b, double s) {
  const double u = std::abs(s);
  const double ea = std::exp(-2.0 * a * u), eb = std::exp(-2.0 * b * u);
  return std::exp((a - b) * u) * (1.0 + ea) / (1.0 + eb);
}

GridSpec scalar_spec(const GridSpec& spec) {
  GridSpec s = spec;
  s.fiber_dim = 1;
  return s;
}

// kernel sample at -t_j: the lattice is symmetric except t_0 = -R, whose
// reflection R wraps to -R periodically
cplx reflected(const GridFunction& k, int j) {
  const int n = k.spec().samples;
  return k.at((n - j) % n);
}

// Bochner norm (h * sum state_norm(F(t_j))^p)^{1/p} measuring fibers with the
// group's own state norm; p = infinity takes the sup
double bochner_norm(const GroupModel& g, const GridFunction& f, double p) {
  const int n = f.spec().samples;
  const double h = f.spec().spacing();
  const std::vector<double> rows = par::map_index<double>(n, [&](std::ptrdiff_t j) {
    return g.state_norm(f.samples().row(j).transpose());
  });
  if (std::isinf(p)) return *std::max_element(rows.begin(), rows.end());
  double acc = 0.0;
  for (double r : rows) acc += std::pow(r, p);
  return std::pow(h * acc, 1.0 / p);
}

double bochner_sobolev(const GroupModel& g, const GridFunction& f, double p) {
  return bochner_norm(g, f, p) + bochner_norm(g, derivative(f), p);
}

double conjugate_exponent(double p) {
  if (p == 1.0) return infty;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

GridFunction random_band_function(const GridSpec& spec, Rng& rng, double band_fraction) {
  const int n = spec.samples;
  const double cutoff = band_fraction * spec.nyquist();
  MatC coeffs = MatC::Zero(n, spec.fiber_dim);
  for (int c = 0; c < spec.fiber_dim; ++c)
    for (int m = 0; m < n; ++m)
      if (std::abs(spec.frequency(m)) <= cutoff) coeffs(m, c) = rng.cnormal();
  return from_spectrum(spec, coeffs);
}

VecC random_state(const GroupModel& g, Rng& rng, double band_fraction) {
  if (g.kind() == GroupKind::Shift)
    return random_band_function(g.grid(), rng, band_fraction).flatten();
  VecC x(g.state_dim());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.cnormal();
  return x;
}

// periodic convolution of two scalar kernels: coefficientwise product of the
// spectra scaled by the grid length
GridFunction kernel_convolution(const GridFunction& a, const GridFunction& b) {
  const MatC prod = (2.0 * a.spec().half_length) *
                    (spectrum(a).array() * spectrum(b).array()).matrix();
  return from_spectrum(a.spec(), prod);
}

void check_group_grid(const TransferKernels& k, const GroupModel& g) {
  if (g.kind() == GroupKind::Matrix) return;
  if (g.grid().half_length != k.grid().half_length || g.grid().samples != k.grid().samples)
    throw DimensionMismatch("transfer: group lattice does not match the kernel grid");
}

void check_kernel_grid(const TransferKernels& k, const GroupModel& g, const GridFunction& f) {
  check_group_grid(k, g);
  if (f.spec().half_length != k.grid().half_length || f.spec().samples != k.grid().samples)
    throw DimensionMismatch("p_map: function grid does not match the kernel grid");
  if (f.spec().fiber_dim != g.state_dim())
    throw DimensionMismatch("p_map: fiber dimension must equal the state dimension");
}

double support_radius(const Measure& mu) {
  double r = 0.0;
  for (const Atom& a : mu.atoms()) r = std::max(r, std::abs(a.location));
  if (mu.has_density()) {
    const DensityGrid& d = mu.density();
    for (Eigen::Index i = 0; i < d.samples.size(); ++i)
      if (std::abs(d.samples[i]) > 0.0)
        r = std::max(r, std::abs(d.left + d.spacing * static_cast<double>(i)));
  }
  return r;
}

}  // namespace

TransferKernels build_kernels_bounded(double flat_radius, double smoothing, double margin,
                                      const GridSpec& spec) {
  if (!(flat_radius > 0.0) || !(smoothing > 0.0) || !(margin > 0.0))
    throw ParameterOrder("build_kernels_bounded: all widths must be positive");
  spec.validate();
  const double reach = flat_radius + 3.0 * smoothing + margin;
  if (spec.half_length < 2.0 * reach)
    throw GridTooShort("build_kernels_bounded: need half_length >= twice the window reach");

  const GridSpec kspec = scalar_spec(spec);
  const double half = smoothing + margin;
  TransferKernels k;
  k.mode = TransferMode::Bounded;
  k.flat_radius = flat_radius;
  k.smoothing = smoothing;
  k.margin = margin;
  k.psi = GridFunction::from_scalar(kspec, [&](double s) {
    return cplx(bump_cdf((s + reach) / smoothing) - bump_cdf((s - reach) / smoothing));
  });
  k.phi = GridFunction::from_scalar(kspec, [&](double s) {
    return cplx((bump_cdf((s + half) / smoothing) - bump_cdf((s - half) / smoothing)) /
                (2.0 * half));
  });

  // construction-time identities: plateau, unit mass, and the convolution
  // plateau that the factorization rests on
  const double h = kspec.spacing();
  cplx mass = 0.0;
  for (int j = 0; j < kspec.samples; ++j) {
    const double t = kspec.point(j);
    if (std::abs(t) <= flat_radius + 2.0 * smoothing + margin &&
        std::abs(k.psi.at(j) - 1.0) > 1e-8)
      throw CheckFailed("build_kernels_bounded: embedding window is not flat on its plateau");
    mass += h * k.phi.at(j);
  }
  if (std::abs(mass - 1.0) > 1e-8)
    throw CheckFailed("build_kernels_bounded: averaging window mass differs from one");
  const GridFunction conv = kernel_convolution(k.psi, k.phi);
  for (int j = 0; j < kspec.samples; ++j)
    if (std::abs(kspec.point(j)) <= flat_radius && std::abs(conv.at(j) - 1.0) > 1e-6)
      throw CheckFailed("build_kernels_bounded: window convolution misses one on the core");
  return k;
}

TransferKernels build_kernels_unbounded(double weight_rate, double smoothing,
                                        const GridSpec& spec) {
  if (!(weight_rate > 0.0) || !(smoothing > weight_rate))
    throw ParameterOrder("build_kernels_unbounded: need smoothing > weight_rate > 0");
  spec.validate();
  const GridSpec kspec = scalar_spec(spec);
  TransferKernels k;
  k.mode = TransferMode::Unbounded;
  k.smoothing = smoothing;
  k.weight_rate = weight_rate;
  const double scale = std::sqrt(8.0) * weight_rate / M_PI;
  k.psi = GridFunction::from_scalar(kspec,
                                    [&](double s) { return cplx(stable_sech(smoothing, s)); });
  k.phi = GridFunction::from_scalar(kspec, [&](double s) {
    return cplx(scale * stable_cosh_ratio(weight_rate, 2.0 * weight_rate, s));
  });
  return k;
}

GridFunction iota_map(const TransferKernels& k, const GroupModel& g, const VecC& x) {
  check_group_grid(k, g);
  if (x.size() != g.state_dim()) throw DimensionMismatch("iota_map: state size mismatch");
  GridSpec ospec = k.grid();
  ospec.fiber_dim = static_cast<int>(g.state_dim());
  ospec.fiber_exponent = g.exponent();
  GridFunction out(ospec);
  par::for_index(ospec.samples, [&](std::ptrdiff_t j) {
    const double s = ospec.point(static_cast<int>(j));
    const cplx w = reflected(k.psi, static_cast<int>(j));
    out.samples().row(j) = (w * g.apply_group(-s, x)).transpose();
  });
  return out;
}

VecC p_map(const TransferKernels& k, const GroupModel& g, const GridFunction& f) {
  check_kernel_grid(k, g, f);
  const double h = f.spec().spacing();
  return par::sum_vectors(f.spec().samples, g.state_dim(), [&](std::ptrdiff_t j) {
    const double s = f.spec().point(static_cast<int>(j));
    const cplx w = h * k.phi.at(static_cast<int>(j));
    return VecC(w * g.apply_group(s, f.samples().row(j).transpose()));
  });
}

FactorizationReport factorization_check(const TransferKernels& k, const GroupModel& g,
                                        const Measure& mu, int probes, std::uint64_t seed,
                                        double tol) {
  if (probes < 1) throw ParameterOrder("factorization_check: need at least one probe");
  if (k.mode == TransferMode::Bounded) {
    if (support_radius(mu) > k.flat_radius + 1e-9)
      throw SupportViolation("factorization_check: measure support exceeds the flat radius");
  } else {
    if (!(mu.strip_capacity() > k.weight_rate))
      throw SupportViolation(
          "factorization_check: certified measure decay does not clear the weight rate");
    // the sech window beats cosh(weight_rate * .) only when the group grows
    // strictly slower than the weight
    if (estimate_group_type(g).growth_rate >= k.weight_rate)
      throw GrowthMismatch("factorization_check: group growth rate reaches the weight rate");
  }
  const Measure weighted =
      k.mode == TransferMode::Bounded ? mu : cosh_weight(mu, k.weight_rate);

  FactorizationReport rep;
  for (int i = 0; i < probes; ++i) {
    Rng rng(seed + 0x7f4a7c15u * static_cast<std::uint64_t>(i + 1));
    const VecC x = random_state(g, rng, 0.25);
    const double nx = g.state_norm(x);
    if (nx < 1e-12) continue;
    const VecC direct = phillips_apply(g, mu, x);
    const VecC routed = p_map(k, g, convolve_measure(weighted, iota_map(k, g, x)));
    const double res = g.state_norm(direct - routed) / nx;
    rep.residuals.push_back(res);
    rep.max_residual = std::max(rep.max_residual, res);
  }
  if (rep.max_residual > tol)
    throw CheckFailed("factorization_check: residual above tolerance");
  return rep;
}

MapBoundsReport map_bounds_check(const TransferKernels& k, const GroupModel& g, int probes,
                                 std::uint64_t seed, double tol) {
  if (probes < 1) throw ParameterOrder("map_bounds_check: need at least one probe");
  const double p = g.exponent();
  const double pc = conjugate_exponent(p);
  MapBoundsReport rep;
  // the bounds only involve |s| up to the grid; sample the orbit norm densely
  // there so the admissible multiple really dominates the window
  rep.growth_constant =
      estimate_group_type(g, k.grid().half_length, 256).growth_constant;
  const double psi_p = lp_norm(k.psi, p);
  const double psi_1p = sobolev_norm(k.psi, p);
  const double phi_pc = lp_norm(k.phi, pc);
  const double phi_1pc = sobolev_norm(k.phi, pc);

  GridSpec fspec = k.grid();
  fspec.fiber_dim = static_cast<int>(g.state_dim());
  fspec.fiber_exponent = p;

  for (int i = 0; i < probes; ++i) {
    Rng rng(seed + 0x9e3779b9u * static_cast<std::uint64_t>(i + 1));
    const VecC x = random_state(g, rng, 0.25);
    const double nx = g.state_norm(x);
    if (nx < 1e-12) continue;
    const GridFunction ix = iota_map(k, g, x);
    rep.embedding = std::max(rep.embedding, bochner_norm(g, ix, p) / (psi_p * nx));
    rep.embedding_smooth = std::max(
        rep.embedding_smooth, bochner_sobolev(g, ix, p) / (psi_1p * g.domain_norm(x)));

    const GridFunction f = random_band_function(fspec, rng, 0.25);
    const double nf = bochner_norm(g, f, p);
    if (nf < 1e-12) continue;
    const VecC pf = p_map(k, g, f);
    rep.projection = std::max(rep.projection, g.state_norm(pf) / (phi_pc * nf));
    rep.projection_domain = std::max(
        rep.projection_domain, g.domain_norm(pf) / (phi_1pc * bochner_sobolev(g, f, p)));
  }
  const double cap = rep.growth_constant + tol;
  if (rep.embedding > cap || rep.projection > cap || rep.embedding_smooth > cap ||
      rep.projection_domain > cap)
    throw CheckFailed("map_bounds_check: a window bound ratio exceeds the group constant");
  return rep;
}

EmbeddingConstReport unbounded_embedding_check(const TransferKernels& k, const GroupModel& g,
                                               int probes, std::uint64_t seed) {
  if (k.mode != TransferMode::Unbounded)
    throw ParameterOrder("unbounded_embedding_check: kernels are not in weighted mode");
  if (probes < 1) throw ParameterOrder("unbounded_embedding_check: need at least one probe");
  const double p = g.exponent();
  const GroupTypeEstimate est = estimate_group_type(g, k.grid().half_length, 256);
  EmbeddingConstReport rep;
  const GridFunction ratio_fn =
      GridFunction::from_scalar(k.grid(), [&](double s) {
        return cplx(stable_cosh_ratio(est.growth_rate, k.smoothing, s));
      });
  rep.bound = est.growth_constant * (k.smoothing + 1.0) * lp_norm(ratio_fn, p);
  for (int i = 0; i < probes; ++i) {
    Rng rng(seed + 0x51ed2701u * static_cast<std::uint64_t>(i + 1));
    const VecC x = random_state(g, rng, 0.25);
    const double dx = g.domain_norm(x);
    if (dx < 1e-12) continue;
    rep.measured = std::max(rep.measured, bochner_sobolev(g, iota_map(k, g, x), p) / dx);
  }
  if (rep.measured > rep.bound)
    throw CheckFailed("unbounded_embedding_check: measured constant exceeds the bound");
  return rep;
}

ConvNormEstimate convolution_norm_estimate(const Measure& mu, const GridSpec& spec, double theta,
                                           double q, double p, int probes, std::uint64_t seed,
                                           double kappa) {
  if (probes < 1) throw ParameterOrder("convolution_norm_estimate: need at least one probe");
  GridSpec sspec = scalar_spec(spec);
  sspec.fiber_exponent = 2.0;
  const GroupModel model = GroupModel::shift(sspec, p);
  const InterpCouple couple = group_couple(model);
  ConvNormEstimate est;
  for (int i = 0; i < probes; ++i) {
    Rng rng(seed + 0xb5297a4du * static_cast<std::uint64_t>(i + 1));
    const GridFunction f = random_band_function(sspec, rng, 0.25);
    const double denom = interp_norm(couple, f.flatten(), theta, q);
    if (denom < 1e-12) continue;
    const double numer = interp_norm(couple, convolve_measure(mu, f).flatten(), theta, q);
    est.lower = std::max(est.lower, numer / denom);
  }
  MultiplierSymbol sym;
  sym.value = [&mu](double xi) { return fourier(mu, xi); };
  sym.derivative = [&mu](double xi) { return fourier_derivative(mu, xi); };
  est.upper = kappa * girardi_weis_bound(sym, sspec);
  return est;
}

TransferenceReport transference_check(const TransferKernels& k, const GroupModel& g,
                                      const Measure& mu, double theta, double q, double p,
                                      int probes, std::uint64_t seed,
                                      const TransferenceOptions& opt) {
  if (probes < 1) throw ParameterOrder("transference_check: need at least one probe");
  const Measure weighted =
      k.mode == TransferMode::Bounded ? mu : cosh_weight(mu, k.weight_rate);
  const ConvNormEstimate conv = convolution_norm_estimate(
      weighted, k.grid(), theta, q, p, opt.ascent_probes, seed ^ 0x2545f491u, opt.kappa);
  if (conv.lower < 1e-12)
    throw SolverDiverged("transference_check: convolution-norm ascent vanished");

  TransferenceReport rep;
  rep.conv_lower = conv.lower;
  rep.conv_upper = conv.upper;
  rep.growth_constant = estimate_group_type(g).growth_constant;
  const InterpCouple couple = group_couple(g);
  for (int i = 0; i < probes; ++i) {
    Rng rng(seed + 0xd1b54a33u * static_cast<std::uint64_t>(i + 1));
    const VecC x = random_state(g, rng, opt.band_fraction);
    const double denom = interp_norm(couple, x, theta, q);
    if (denom < 1e-12) continue;
    const double lhs = interp_norm(couple, phillips_apply(g, mu, x), theta, q);
    const double rhs = conv.lower * denom;
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.ratios.push_back(lhs / rhs);
    rep.max_ratio = std::max(rep.max_ratio, lhs / rhs);
  }
  if (rep.max_ratio > opt.calibration * rep.growth_constant * rep.growth_constant)
    throw CheckFailed("transference_check: ratio exceeds the calibrated ceiling");
  return rep;
}

}  // namespace striplab
