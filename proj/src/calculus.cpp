#include "striplab/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "striplab/errors.hpp"
#include "striplab/gauss.hpp"
#include "striplab/parallel.hpp"

namespace striplab {

namespace {

// cheap growth probe: enough resolution to separate isometric and polynomial
// growth from genuinely exponential growth before integrating against it
double group_growth_rate(const GroupModel& g) {
  return estimate_group_type(g, 20.0, 16).growth_rate;
}

double golden_max_1d(const std::function<double(double)>& f, double a, double b, int iters) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  return std::max(f1, f2);
}

// shared scan skeleton for the weighted sup norms: rows of constant imaginary
// part (strip) or constant argument (sector), each sampled on a dense linear
// window plus a log-spaced extension, with per-window maxima for the growth
// heuristic and a two-stage golden refinement at the incumbent.
struct ScanOutcome {
  double best = 0.0;
  double best_s = 0.0, best_row = 0.0;
  double outer = 0.0, inner = 0.0;  // maxima over the last two |s| decades
};

ScanOutcome scan_rows(const std::function<double(double, double)>& phi,
                      const std::vector<double>& rows, const StripScan& scan) {
  const double L = scan.linear_half_width;
  std::vector<double> ss;
  for (int i = 0; i < scan.linear_points; ++i)
    ss.push_back(-L + 2.0 * L * i / (scan.linear_points - 1));
  const int decades = std::max(1, static_cast<int>(std::ceil(std::log10(scan.max_abs / L))));
  for (int d = 0; d < decades; ++d)
    for (int i = 0; i < scan.points_per_decade; ++i) {
      const double s =
          L * std::pow(10.0, (d + static_cast<double>(i) / scan.points_per_decade));
      if (s > scan.max_abs) break;
      ss.push_back(s);
      ss.push_back(-s);
    }

  const auto n = static_cast<std::ptrdiff_t>(rows.size() * ss.size());
  std::vector<ScanOutcome> cells = par::map_index<ScanOutcome>(n, [&](std::ptrdiff_t i) {
    const double row = rows[static_cast<std::size_t>(i) / ss.size()];
    const double s = ss[static_cast<std::size_t>(i) % ss.size()];
    ScanOutcome c;
    const double val = phi(s, row);
    c.best = std::isfinite(val) ? val : 0.0;
    c.best_s = s;
    c.best_row = row;
    if (std::abs(s) >= scan.max_abs / 10.0)
      c.outer = c.best;
    else if (std::abs(s) >= scan.max_abs / 100.0)
      c.inner = c.best;
    return c;
  });
  ScanOutcome out;
  for (const ScanOutcome& c : cells) {
    if (c.best > out.best) {
      out.best = c.best;
      out.best_s = c.best_s;
      out.best_row = c.best_row;
    }
    out.outer = std::max(out.outer, c.outer);
    out.inner = std::max(out.inner, c.inner);
  }
  return out;
}

ExtReal refine_scan(const std::function<double(double, double)>& phi, ScanOutcome got,
                    double row_cap, const StripScan& scan) {
  // growth trend to the truncation edge: report the explicit infinity flag
  if (got.outer > got.inner * 1.02 && got.outer > 1e-300) return ExtReal::infinite();
  const double step =
      std::max(2.0 * scan.linear_half_width / (scan.linear_points - 1),
               std::abs(got.best_s) * (std::pow(10.0, 1.0 / scan.points_per_decade) - 1.0));
  auto safe = [&](double s, double r) {
    const double v = phi(s, r);
    return std::isfinite(v) ? v : 0.0;
  };
  double best = got.best;
  double s_lo = got.best_s - step, s_hi = got.best_s + step;
  best = std::max(best, golden_max_1d([&](double s) { return safe(s, got.best_row); }, s_lo,
                                      s_hi, 48));
  best = std::max(
      best, golden_max_1d([&](double r) { return safe(got.best_s, r); }, -row_cap, row_cap, 48));
  return ExtReal::finite(best);
}

}  // namespace

StripFunction strip_const(cplx c) {
  StripFunction f;
  f.eval = [c](cplx) { return c; };
  f.deriv = [](cplx) { return cplx(0.0); };
  f.width = infty;
  return f;
}

StripFunction strip_tau(double k) {
  if (!(k > 0.0)) throw ParameterOrder("strip_tau: k must be positive");
  StripFunction f;
  const cplx ik(0.0, k);
  f.eval = [k, ik](cplx z) {
    const cplx d = ik - z;
    return -k * k / (d * d);
  };
  f.deriv = [k, ik](cplx z) {
    const cplx d = ik - z;
    return -2.0 * k * k / (d * d * d);
  };
  f.width = k;
  f.decay_order = 2.0;
  return f;
}

StripFunction strip_inv_shift(cplx pole) {
  if (pole.imag() == 0.0) throw ParameterOrder("strip_inv_shift: pole must be off the line");
  StripFunction f;
  f.eval = [pole](cplx z) { return 1.0 / (pole - z); };
  f.deriv = [pole](cplx z) {
    const cplx d = pole - z;
    return 1.0 / (d * d);
  };
  f.width = std::abs(pole.imag());
  f.decay_order = 1.0;  // too slow for the boundary integral on its own
  return f;
}

StripFunction strip_inv_shift_squared(cplx pole) {
  if (pole.imag() == 0.0)
    throw ParameterOrder("strip_inv_shift_squared: pole must be off the line");
  StripFunction f;
  f.eval = [pole](cplx z) {
    const cplx d = pole - z;
    return 1.0 / (d * d);
  };
  f.deriv = [pole](cplx z) {
    const cplx d = pole - z;
    return 2.0 / (d * d * d);
  };
  f.width = std::abs(pole.imag());
  f.decay_order = 2.0;
  return f;
}

StripFunction strip_gauss() {
  StripFunction f;
  f.eval = [](cplx z) { return std::exp(-0.5 * z * z); };
  f.deriv = [](cplx z) { return -z * std::exp(-0.5 * z * z); };
  f.width = infty;
  f.decay_order = 4.0;  // conservative polynomial envelope for the tail bound
  return f;
}

StripFunction strip_exp_mode(double rate) {
  StripFunction f;
  const cplx ia(0.0, rate);
  f.eval = [ia](cplx z) { return std::exp(ia * z); };
  f.deriv = [ia](cplx z) { return ia * std::exp(ia * z); };
  f.width = infty;
  return f;
}

StripFunction strip_product(const StripFunction& f, const StripFunction& g) {
  if (!f.eval || !g.eval) throw Error("strip_product: missing evaluator");
  StripFunction out;
  auto fe = f.eval, ge = g.eval, fd = f.deriv, gd = g.deriv;
  out.eval = [fe, ge](cplx z) { return fe(z) * ge(z); };
  if (fd && gd)
    out.deriv = [fe, ge, fd, gd](cplx z) { return fd(z) * ge(z) + fe(z) * gd(z); };
  out.width = std::min(f.width, g.width);
  // valid because every builtin is bounded on its strip: decay rates add
  out.decay_order = f.decay_order + g.decay_order;
  return out;
}

VecC phillips_apply(const GroupModel& g, const Measure& mu, const VecC& x) {
  if (x.size() != g.state_dim())
    throw DimensionMismatch("phillips_apply: state size mismatch");
  if (mu.has_density()) {
    const double theta = group_growth_rate(g);
    if (!(mu.decay_weight() > theta))
      throw GrowthMismatch("phillips_apply: measure decay does not dominate group growth");
  }
  VecC acc = VecC::Zero(x.size());
  for (const Atom& a : mu.atoms()) acc += a.weight * g.apply_group(a.location, x);
  if (mu.has_density()) {
    const DensityGrid& d = mu.density();
    const auto n = static_cast<std::ptrdiff_t>(d.samples.size());
    acc += par::sum_vectors(n, x.size(), [&](std::ptrdiff_t i) {
      const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
      const cplx coef = d.spacing * w * d.samples[i];
      return VecC(coef * g.apply_group(d.left + d.spacing * static_cast<double>(i), x));
    });
  }
  return acc;
}

ContourResult cauchy_strip_apply(const GroupModel& g, const StripFunction& f,
                                 double omega_prime, const VecC& x, double trunc,
                                 int nodes_per_line) {
  if (!f.eval) throw Error("cauchy_strip_apply: missing evaluator");
  if (!f.elementary())
    throw NotElementary("cauchy_strip_apply: symbol lacks certified decay of order > 1");
  if (x.size() != g.state_dim())
    throw DimensionMismatch("cauchy_strip_apply: state size mismatch");
  const double theta = group_growth_rate(g);
  if (!(theta < omega_prime && omega_prime < f.width))
    throw StripOrder("cauchy_strip_apply: need group growth < contour height < strip width");

  const double u_max = trunc > 0.0 ? std::asinh(trunc) : 28.0;
  const double reach = std::sinh(u_max);
  const int n = std::max(nodes_per_line, 16);
  const double du = 2.0 * u_max / (n - 1);
  const cplx inv_2pii = 1.0 / (2.0 * M_PI * cplx(0.0, 1.0));

  // index i < n walks the lower line in the +Re direction; the upper line
  // carries the opposite sign so the strip interior stays on the left
  ContourResult out;
  out.trunc = reach;
  out.value = par::sum_vectors(2 * n, x.size(), [&](std::ptrdiff_t idx) {
    const bool lower = idx < n;
    const int i = static_cast<int>(lower ? idx : idx - n);
    const double u = -u_max + du * i;
    const double s = std::sinh(u);
    const cplx z(s, lower ? -omega_prime : omega_prime);
    const cplx fz = f.eval(z);
    if (fz == cplx(0.0)) return VecC(VecC::Zero(x.size()));
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    const cplx coef =
        fz * inv_2pii * ((lower ? 1.0 : -1.0) * w * du * std::cosh(u));
    return VecC(coef * g.resolvent(z, x));
  });

  // decay envelope c |s|^{-alpha} fitted at the outer contour, resolvent factor
  // bounded by its value at the truncation corners (the spectra we model have
  // bounded real part, so the resolvent keeps shrinking past the corners)
  const double alpha = f.decay_order;
  double c_env = 0.0;
  for (double frac : {1.0, 0.5, 0.25})
    for (double sign : {1.0, -1.0}) {
      const double s = sign * reach * frac;
      c_env = std::max(c_env, std::abs(f.eval(cplx(s, omega_prime))) *
                                  std::pow(std::abs(s), alpha));
      c_env = std::max(c_env, std::abs(f.eval(cplx(s, -omega_prime))) *
                                  std::pow(std::abs(s), alpha));
    }
  const double xn = x.norm();
  double corner = 0.0;
  if (xn > 0.0)
    for (double sign : {1.0, -1.0})
      for (double im : {omega_prime, -omega_prime})
        corner = std::max(corner, g.resolvent(cplx(sign * reach, im), x).norm() / xn);
  out.tail_bound = c_env * std::pow(reach, 1.0 - alpha) / (alpha - 1.0) * corner * xn / M_PI;
  return out;
}

RegularizationReport regularized_apply(const GroupModel& g, const StripFunction& f,
                                       const VecC& x, std::vector<double> k_schedule,
                                       double tol) {
  if (!f.eval) throw Error("regularized_apply: missing evaluator");
  if (k_schedule.empty()) k_schedule = {8.0, 16.0, 32.0, 64.0, 128.0};
  for (std::size_t i = 0; i + 1 < k_schedule.size(); ++i)
    if (!(k_schedule[i] < k_schedule[i + 1]))
      throw ParameterOrder("regularized_apply: schedule must be strictly increasing");
  const double theta = group_growth_rate(g);
  const double omega_op = std::min(f.width, theta + 1.0);
  if (!(k_schedule.front() > omega_op))
    throw ParameterOrder("regularized_apply: schedule must start above the strip half-width");
  const double omega_prime = 0.5 * (theta + omega_op);

  RegularizationReport rep;
  rep.k_values = k_schedule;
  std::vector<VecC> iterates;
  for (double k : k_schedule)
    iterates.push_back(g.to_eigenframe(
        cauchy_strip_apply(g, strip_product(f, strip_tau(k)), omega_prime, x).value));

  // limit extraction: the regularizer makes each component of the iterates a
  // low-degree rational function of 1/k, so rational (Stoer-Bulirsch)
  // extrapolation to 1/k = 0 recovers the limit to quadrature accuracy where
  // polynomial acceleration of the raw O(1/k) sequence would stall
  const std::size_t n = iterates.size();
  const Eigen::Index dim = x.size();
  std::vector<VecC> stage_value(n, VecC::Zero(dim));
  par::for_index(dim, [&](std::ptrdiff_t c) {
    std::vector<std::vector<cplx>> t(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i].assign(i + 1, cplx(0.0));
      t[i][0] = iterates[i][c];
      for (std::size_t j = 1; j <= i; ++j) {
        const double ratio = k_schedule[i] / k_schedule[i - j];  // u_{i-j} / u_i
        const cplx num = t[i][j - 1] - t[i - 1][j - 1];
        const cplx prev2 = j >= 2 ? t[i - 1][j - 2] : cplx(0.0);
        const cplx inner = t[i][j - 1] - prev2;
        cplx corrected = t[i][j - 1];
        if (std::abs(inner) > 1e-300) {
          const cplx den = ratio * (1.0 - num / inner) - 1.0;
          if (std::abs(den) > 1e-300) corrected = t[i][j - 1] + num / den;
        }
        t[i][j] = corrected;
      }
    }
    for (std::size_t i = 0; i < n; ++i) stage_value[i][c] = t[i][i];
  });
  for (std::size_t i = 1; i < n; ++i) {
    const double scale = std::max(stage_value[i].norm(), 1e-300);
    rep.residuals.push_back((stage_value[i] - stage_value[i - 1]).norm() / scale);
  }
  rep.value = g.from_eigenframe(stage_value.back());
  rep.converged = !rep.residuals.empty() && rep.residuals.back() <= tol;
  if (!rep.converged)
    throw NoConvergence("regularized_apply: residuals stagnate above tolerance");
  return rep;
}

ExtReal hinf1_norm(const StripFunction& f, double omega, const StripScan& scan) {
  if (!f.eval) throw Error("hinf1_norm: missing evaluator");
  if (!f.deriv) throw MissingDerivative("hinf1_norm: derivative evaluator required");
  if (!(omega > 0.0)) throw ParameterOrder("hinf1_norm: omega must be positive");
  if (!(omega <= f.width)) throw StripOrder("hinf1_norm: omega exceeds the certified width");

  const double edge = omega * (1.0 - 1e-6);
  std::vector<double> rows = {edge, -edge, 0.0};
  for (int j = 1; j <= scan.interior_rows; ++j) {
    const double y = edge * j / (scan.interior_rows + 1);
    rows.push_back(y);
    rows.push_back(-y);
  }
  auto phi = [&](double s, double y) {
    const cplx z(s, y);
    return std::abs(f.eval(z)) + (1.0 + std::abs(z)) * std::abs(f.deriv(z));
  };
  return refine_scan(phi, scan_rows(phi, rows, scan), edge, scan);
}

PvResult pv_group_integral(const GroupModel& g, const PvWeight& w, const VecC& x,
                           std::vector<double> eps_schedule) {
  if (!w.eval) throw Error("pv_group_integral: missing weight evaluator");
  if (x.size() != g.state_dim())
    throw DimensionMismatch("pv_group_integral: state size mismatch");
  for (double s : {0.2, 0.55, 0.9})
    if (std::abs(w.eval(s) - w.eval(-s)) > 1e-10 * (1.0 + std::abs(w.eval(s))))
      throw Error("pv_group_integral: weight must be even");
  if (eps_schedule.empty()) eps_schedule = {0.5, 0.25, 0.125, 0.0625, 0.03125};
  for (std::size_t i = 0; i + 1 < eps_schedule.size(); ++i)
    if (!(eps_schedule[i] > eps_schedule[i + 1]))
      throw ParameterOrder("pv_group_integral: schedule must decrease");
  if (!(eps_schedule.back() > 0.0 && eps_schedule.front() < 1.0))
    throw ParameterOrder("pv_group_integral: schedule must lie in (0,1)");

  // the paired integrand extends smoothly across s = 0, so quadrature panels
  // whose nodes stay interior evaluate both the limit and its truncations
  auto integrate = [&](double lo, double hi) {
    const int panels = 64;
    const GaussRule16& rule = gauss16();
    const double pw = (hi - lo) / panels;
    return par::sum_vectors(panels * 16, x.size(), [&](std::ptrdiff_t idx) {
      const int p = static_cast<int>(idx) / 16, i = static_cast<int>(idx) % 16;
      const double mid = lo + (p + 0.5) * pw, rad = 0.5 * pw;
      const double s = mid + rad * rule.node[i];
      const VecC paired = g.apply_group(s, x) - g.apply_group(-s, x);
      return VecC((rad * rule.weight[i] * w.eval(s) / s) * paired);
    });
  };

  PvResult out;
  out.value = integrate(0.0, 1.0);
  out.epsilons = eps_schedule;
  for (double eps : eps_schedule)
    out.residuals.push_back((out.value - integrate(eps, 1.0)).norm());
  const std::size_t n = out.residuals.size();
  const double floor_tol = 1e-11 * (1.0 + out.value.norm());
  if (n >= 2 && out.residuals[n - 1] > floor_tol &&
      !(out.residuals[n - 1] <= 0.75 * out.residuals[n - 2]))
    throw NoConvergence("pv_group_integral: truncation residuals fail to contract");
  return out;
}

SectorFunction sector_const(cplx c) {
  SectorFunction f;
  f.eval = [c](cplx) { return c; };
  f.deriv = [](cplx) { return cplx(0.0); };
  f.half_angle = M_PI / 2.0;
  return f;
}

SectorFunction sector_rational() {
  SectorFunction f;
  f.eval = [](cplx w) {
    const cplx d = 1.0 + w;
    return w / (d * d);
  };
  f.deriv = [](cplx w) {
    const cplx d = 1.0 + w;
    return (1.0 - w) / (d * d * d);
  };
  f.half_angle = M_PI / 4.0;
  return f;
}

StripFunction sector_pullback(const SectorFunction& f) {
  if (!f.eval) throw Error("sector_pullback: missing evaluator");
  if (!(f.half_angle > 0.0 && f.half_angle < M_PI))
    throw ParameterOrder("sector_pullback: half angle must lie in (0, pi)");
  StripFunction out;
  auto fe = f.eval;
  out.eval = [fe](cplx z) { return fe(std::exp(z)); };
  if (f.deriv) {
    auto fd = f.deriv;
    out.deriv = [fd](cplx z) {
      const cplx w = std::exp(z);
      return w * fd(w);
    };
  }
  out.width = f.half_angle;
  return out;
}

ExtReal hinf_log_norm(const SectorFunction& f, const StripScan& scan) {
  if (!f.eval) throw Error("hinf_log_norm: missing evaluator");
  if (!f.deriv) throw MissingDerivative("hinf_log_norm: derivative evaluator required");
  if (!(f.half_angle > 0.0 && f.half_angle < M_PI))
    throw ParameterOrder("hinf_log_norm: half angle must lie in (0, pi)");

  const double edge = f.half_angle * (1.0 - 1e-6);
  std::vector<double> rows = {edge, -edge, 0.0};
  for (int j = 1; j <= scan.interior_rows; ++j) {
    const double a = edge * j / (scan.interior_rows + 1);
    rows.push_back(a);
    rows.push_back(-a);
  }
  // polar scan: u = log |w| plays the role of Re z, the argument the row;
  // cap the reach so exp(u) and modest rational powers of w stay in range
  StripScan capped = scan;
  capped.max_abs = std::min(scan.max_abs, 80.0);
  auto phi = [&](double u, double arg) {
    const cplx w = std::exp(cplx(u, arg));
    return std::abs(f.eval(w)) +
           (1.0 + std::hypot(u, arg)) * std::abs(w * f.deriv(w));
  };
  return refine_scan(phi, scan_rows(phi, rows, capped), edge, capped);
}

}  // namespace striplab
