#include "striplab/interp.hpp"

#include <algorithm>
#include <cmath>

#include "striplab/errors.hpp"
#include "striplab/parallel.hpp"
#include "striplab/rng.hpp"

namespace striplab {

namespace {

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw SolverDiverged(std::string("k_functional: non-finite ") + what);
  return v;
}

struct Objective {
  const InterpCouple& c;
  const VecC& z;
  double t;
  double operator()(const VecC& y) const {
    return checked(c.norm_x(z - y) + t * c.norm_y(y), "objective value");
  }
};

// subgradient descent with Polyak-type steps aimed below the running best
void subgradient_phase(const InterpCouple& c, const VecC& z, double t, const Objective& f,
                       double guard, VecC& best_y, double& best_f) {
  std::vector<VecC> starts{VecC::Zero(z.size()), z, 0.5 * z};
  starts.resize(std::max(1, std::min<int>(c.options.starts, 3)));
  const double scale = z.norm() + 1e-12;
  for (const VecC& start : starts) {
    VecC y = start;
    double fy = f(y);
    if (fy < best_f) {
      best_f = fy;
      best_y = y;
    }
    double gap = 0.25 * (std::abs(best_f) + 1e-12);
    for (int it = 0; it < c.options.iterations; ++it) {
      const VecC g = t * c.subgrad_y(y) - c.subgrad_x(z - y);
      const double gn = g.norm();
      if (gn < 1e-150) break;
      const double target = best_f - gap;
      // Polyak step, capped so a nearly-cancelling subgradient cannot fling
      // the iterate out of the region of interest
      const double step = std::min((fy - target) / (gn * gn), scale / gn);
      y -= step * g;
      if (c.norm_x(y) > 0.5 * guard) y = best_y;  // re-center instead of drifting
      if (c.norm_x(y) > guard)
        throw SolverDiverged("k_functional: iterate left the trust region");
      fy = f(y);
      if (fy < best_f) {
        best_f = fy;
        best_y = y;
      }
      if ((it + 1) % 250 == 0) gap *= 0.5;
    }
  }
}

// alternating quadratic-surrogate sweeps; exact for couples whose norms are
// (transformed) euclidean norms
void diagonal_irls(const InterpCouple& c, const VecC& z, double t, VecC& best_y, double& best_f) {
  const VecC zf = c.to_frame ? c.to_frame(z) : z;
  // improvements are tracked in frame coordinates and mapped back once at the
  // end, so the (possibly FFT-backed) inverse map runs at most once
  VecC frame_best;
  bool improved = false;
  auto fval = [&](const VecC& v) {
    const double lx = (c.weight_x.array() * (zf - v).array().abs()).matrix().norm();
    const double ly = (c.weight_y.array() * v.array().abs()).matrix().norm();
    return std::make_pair(lx, ly);
  };
  auto note = [&](double f, const VecC& y) {
    if (f < best_f) {
      best_f = f;
      frame_best = y;
      improved = true;
    }
  };
  auto run = [&](VecC y) {
    for (int it = 0; it < c.options.refine_iterations; ++it) {
      auto [lx, ly] = fval(y);
      const double fcur = lx + t * ly;
      note(fcur, y);
      const double lam = std::max(lx, 1e-300), mu = std::max(ly, 1e-300);
      for (Eigen::Index m = 0; m < y.size(); ++m) {
        const double a = sqr(c.weight_x[m]) / lam;
        const double b = t * sqr(c.weight_y[m]) / mu;
        y[m] = zf[m] * (a / (a + b));
      }
      auto [nx, ny] = fval(y);
      const double fnew = nx + t * ny;
      note(fnew, y);
      if (std::abs(fcur - fnew) <= c.options.tolerance * (std::abs(fcur) + 1e-300)) break;
    }
  };
  // midpoint start escapes boundary incumbents that pin the surrogate weights
  run(0.5 * zf);
  run(improved ? frame_best : (c.to_frame ? c.to_frame(best_y) : best_y));
  if (improved) best_y = c.from_frame ? c.from_frame(frame_best) : frame_best;
}

void dense_irls(const InterpCouple& c, const VecC& z, double t, VecC& best_y, double& best_f) {
  const MatC gx = c.quad_x.adjoint() * c.quad_x;
  const MatC gy = c.quad_y.adjoint() * c.quad_y;
  auto run = [&](VecC y) {
    for (int it = 0; it < c.options.refine_iterations; ++it) {
      const double lx = (c.quad_x * (z - y)).norm();
      const double ly = (c.quad_y * y).norm();
      const double fcur = lx + t * ly;
      if (fcur < best_f) {
        best_f = fcur;
        best_y = y;
      }
      const double lam = std::max(lx, 1e-300), mu = std::max(ly, 1e-300);
      const MatC lhs = gx / lam + (t / mu) * gy;
      y = Eigen::LDLT<MatC>(lhs).solve(gx * z / lam);
      const double fnew = (c.quad_x * (z - y)).norm() + t * (c.quad_y * y).norm();
      if (fnew < best_f) {
        best_f = fnew;
        best_y = y;
      }
      if (std::abs(fcur - fnew) <= c.options.tolerance * (std::abs(fcur) + 1e-300)) break;
    }
  };
  run(0.5 * z);
  run(best_y);
}

// cycle the coordinates, minimizing along the ray y_j = tau * z_j by golden
// section; exact for couples with coordinatewise norms
void coordinate_polish(const InterpCouple& c, const VecC& z, double t, const Objective& f,
                       VecC& best_y, double& best_f) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  VecC y = best_y.size() ? best_y : VecC(VecC::Zero(z.size()));
  for (int pass = 0; pass < c.options.polish_passes; ++pass) {
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      if (z[j] == cplx(0.0) && y[j] == cplx(0.0)) continue;
      auto slice = [&](double tau) {
        VecC w = y;
        w[j] = tau * z[j];
        return f(w);
      };
      double a = -0.25, b = 1.25;
      double u = b - phi * (b - a), v = a + phi * (b - a);
      double fu = slice(u), fv = slice(v);
      for (int it = 0; it < 60; ++it) {
        if (fu < fv) {
          b = v;
          v = u;
          fv = fu;
          u = b - phi * (b - a);
          fu = slice(u);
        } else {
          a = u;
          u = v;
          fu = fv;
          v = a + phi * (b - a);
          fv = slice(v);
        }
      }
      const double tau = fu < fv ? u : v;
      y[j] = tau * z[j];
    }
    const double fy = f(y);
    if (fy < best_f) {
      best_f = fy;
      best_y = y;
    }
  }
}

}  // namespace

double k_functional(const InterpCouple& couple, const VecC& z, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error("k_functional: t must be positive");
  if (z.size() != couple.dim) throw DimensionMismatch("k_functional: state size mismatch");
  const double nx = checked(couple.norm_x(z), "norm_x(z)");
  const double ny = checked(couple.norm_y(z), "norm_y(z)");
  if (nx == 0.0) return 0.0;

  const Objective f{couple, z, t};
  const double cap = std::min(nx, t * ny);
  VecC best_y = (nx <= t * ny) ? VecC(VecC::Zero(z.size())) : VecC(z);
  double best_f = cap;
  const double guard = 10.0 * nx + 1e-12;

  subgradient_phase(couple, z, t, f, guard, best_y, best_f);
  switch (couple.structure) {
    case CoupleStructure::DiagonalQuadratic:
      diagonal_irls(couple, z, t, best_y, best_f);
      break;
    case CoupleStructure::DenseQuadratic:
      dense_irls(couple, z, t, best_y, best_f);
      break;
    case CoupleStructure::SeparableWeights:
    case CoupleStructure::Generic:
      coordinate_polish(couple, z, t, f, best_y, best_f);
      break;
  }
  return std::min(best_f, cap);
}

double interp_norm(const InterpCouple& couple, const VecC& z, double theta, double q,
                   double window_octaves, int nodes_per_octave) {
  if (!(theta > 0.0) || !(theta < 1.0)) throw ParameterOrder("interp_norm: theta must lie in (0,1)");
  if (!(q >= 1.0)) throw Error("interp_norm: q must be >= 1");
  const double nx = couple.norm_x(z);
  const double ny = couple.norm_y(z);
  if (nx == 0.0) return 0.0;

  const int n = static_cast<int>(std::lround(2.0 * window_octaves * nodes_per_octave));
  const double du = 2.0 * window_octaves / n;  // u = log2 t
  const std::vector<double> kvals = par::map_index<double>(n + 1, [&](std::size_t i) {
    const double tt = std::exp2(-window_octaves + du * static_cast<double>(i));
    return k_functional(couple, z, tt);
  });

  const double tmin = std::exp2(-window_octaves), tmax = std::exp2(window_octaves);
  if (is_sup_exponent(q)) {
    double sup = std::max(std::pow(tmin, 1.0 - theta) * ny, std::pow(tmax, -theta) * nx);
    for (int i = 0; i <= n; ++i) {
      const double tt = std::exp2(-window_octaves + du * i);
      sup = std::max(sup, std::pow(tt, -theta) * kvals[i]);
    }
    return sup;
  }

  // composite Simpson in u for integrand (t^{-theta} K)^q * ln 2
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double tt = std::exp2(-window_octaves + du * i);
    const double g = std::pow(std::pow(tt, -theta) * kvals[i], q);
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * g;
  }
  acc *= du * M_LN2 / 3.0;
  const double tail_lo = std::pow(ny, q) * std::pow(tmin, (1.0 - theta) * q) / ((1.0 - theta) * q);
  const double tail_hi = std::pow(nx, q) * std::pow(tmax, -theta * q) / (theta * q);
  return std::pow(acc + tail_lo + tail_hi, 1.0 / q);
}

InterpCheckReport interp_inequality_check(const InterpCouple& couple,
                                          const std::function<VecC(const VecC&)>& map,
                                          double bound_x, double bound_y, double theta, double q,
                                          int probes, std::uint64_t seed, double tol) {
  Rng rng(seed);
  const double bound = std::pow(bound_x, 1.0 - theta) * std::pow(bound_y, theta);
  InterpCheckReport report;
  report.probes = probes;
  for (int i = 0; i < probes; ++i) {
    VecC z(couple.dim);
    for (Eigen::Index j = 0; j < couple.dim; ++j) z[j] = rng.cnormal();
    const double base = interp_norm(couple, z, theta, q);
    if (base == 0.0) continue;
    const double mapped = interp_norm(couple, map(z), theta, q);
    const double ratio = mapped / (bound * base);
    report.worst_ratio = std::max(report.worst_ratio, ratio);
    if (ratio > 1.0 + tol)
      throw CheckFailed("interpolation inequality violated at probe " + std::to_string(i) +
                        ": ratio " + std::to_string(ratio));
  }
  return report;
}

namespace {

VecC l2_subgrad(const VecC& v) {
  const double n = v.norm();
  return n < 1e-300 ? VecC(VecC::Zero(v.size())) : VecC(v / n);
}

}  // namespace

InterpCouple same_norm_couple(Eigen::Index dim) {
  InterpCouple c;
  c.dim = dim;
  c.norm_x = c.norm_y = [](const VecC& v) { return v.norm(); };
  c.subgrad_x = c.subgrad_y = l2_subgrad;
  c.structure = CoupleStructure::DiagonalQuadratic;
  c.weight_x = VecR::Ones(dim);
  c.weight_y = VecR::Ones(dim);
  c.options.iterations = 60;
  return c;
}

InterpCouple scaled_couple(Eigen::Index dim, double factor) {
  InterpCouple c;
  c.dim = dim;
  c.norm_x = [](const VecC& v) { return v.norm(); };
  c.norm_y = [factor](const VecC& v) { return factor * v.norm(); };
  c.subgrad_x = l2_subgrad;
  c.subgrad_y = [factor](const VecC& v) { return VecC(factor * l2_subgrad(v)); };
  c.structure = CoupleStructure::DiagonalQuadratic;
  c.weight_x = VecR::Ones(dim);
  c.weight_y = VecR::Constant(dim, factor);
  c.options.iterations = 60;
  return c;
}

InterpCouple diagonal_l1_couple(const VecR& generator_diag) {
  InterpCouple c;
  c.dim = generator_diag.size();
  const VecR wy = VecR::Ones(c.dim) + generator_diag.cwiseAbs();
  c.norm_x = [](const VecC& v) { return v.cwiseAbs().sum(); };
  c.norm_y = [wy](const VecC& v) { return (wy.array() * v.array().abs()).sum(); };
  c.subgrad_x = [](const VecC& v) {
    VecC g(v.size());
    for (Eigen::Index j = 0; j < v.size(); ++j)
      g[j] = std::abs(v[j]) < 1e-300 ? cplx(0.0) : v[j] / std::abs(v[j]);
    return g;
  };
  c.subgrad_y = [wy](const VecC& v) {
    VecC g(v.size());
    for (Eigen::Index j = 0; j < v.size(); ++j)
      g[j] = std::abs(v[j]) < 1e-300 ? cplx(0.0) : wy[j] * v[j] / std::abs(v[j]);
    return g;
  };
  c.structure = CoupleStructure::SeparableWeights;
  c.weight_x = VecR::Ones(c.dim);
  c.weight_y = wy;
  c.options.iterations = 200;
  return c;
}

InterpCouple diagonal_l2_couple(const VecR& wx, const VecR& wy) {
  if (wx.size() != wy.size()) throw DimensionMismatch("diagonal_l2_couple: weight sizes differ");
  InterpCouple c;
  c.dim = wx.size();
  c.norm_x = [wx](const VecC& v) { return (wx.array() * v.array().abs()).matrix().norm(); };
  c.norm_y = [wy](const VecC& v) { return (wy.array() * v.array().abs()).matrix().norm(); };
  c.subgrad_x = [wx](const VecC& v) {
    const double n = (wx.array() * v.array().abs()).matrix().norm();
    if (n < 1e-300) return VecC(VecC::Zero(v.size()));
    return VecC(((wx.array() * wx.array()) * v.array() / n).matrix());
  };
  c.subgrad_y = [wy](const VecC& v) {
    const double n = (wy.array() * v.array().abs()).matrix().norm();
    if (n < 1e-300) return VecC(VecC::Zero(v.size()));
    return VecC(((wy.array() * wy.array()) * v.array() / n).matrix());
  };
  c.structure = CoupleStructure::DiagonalQuadratic;
  c.weight_x = wx;
  c.weight_y = wy;
  c.options.iterations = 60;
  return c;
}

InterpCouple dense_l2_couple(const MatC& bx, const MatC& by) {
  if (bx.cols() != by.cols()) throw DimensionMismatch("dense_l2_couple: column counts differ");
  InterpCouple c;
  c.dim = bx.cols();
  const MatC bxc = bx, byc = by;
  c.norm_x = [bxc](const VecC& v) { return (bxc * v).norm(); };
  c.norm_y = [byc](const VecC& v) { return (byc * v).norm(); };
  c.subgrad_x = [bxc](const VecC& v) {
    const double n = (bxc * v).norm();
    if (n < 1e-300) return VecC(VecC::Zero(v.size()));
    return VecC(bxc.adjoint() * (bxc * v) / n);
  };
  c.subgrad_y = [byc](const VecC& v) {
    const double n = (byc * v).norm();
    if (n < 1e-300) return VecC(VecC::Zero(v.size()));
    return VecC(byc.adjoint() * (byc * v) / n);
  };
  c.structure = CoupleStructure::DenseQuadratic;
  c.quad_x = bxc;
  c.quad_y = byc;
  c.options.iterations = 60;
  return c;
}

}  // namespace striplab
