#include "striplab/groups.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <memory>

#include "striplab/errors.hpp"
#include "striplab/fft.hpp"
#include "striplab/rng.hpp"

namespace striplab {

namespace {

constexpr double kSpectrumTol = 1e-9;

double vector_p_norm(const VecC& x, double p) {
  if (is_sup_exponent(p)) return x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  if (p == 2.0) return x.norm();
  if (p == 1.0) return x.cwiseAbs().sum();
  return std::pow(x.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

}  // namespace

GroupModel GroupModel::shift(const GridSpec& spec, double bochner_p) {
  spec.validate();
  if (!(bochner_p >= 1.0)) throw Error("group: exponent must be >= 1");
  GroupModel g;
  g.kind_ = GroupKind::Shift;
  g.spec_ = spec;
  g.p_ = bochner_p;
  return g;
}

GroupModel GroupModel::multiplication(const GridSpec& spec, std::function<double(double)> symbol,
                                      double bochner_p) {
  spec.validate();
  if (!symbol) throw Error("group: multiplication symbol missing");
  if (!(bochner_p >= 1.0)) throw Error("group: exponent must be >= 1");
  GroupModel g;
  g.kind_ = GroupKind::Multiplication;
  g.spec_ = spec;
  g.p_ = bochner_p;
  g.symbol_values_.resize(spec.samples);
  for (int j = 0; j < spec.samples; ++j) {
    g.symbol_values_[j] = symbol(spec.point(j));
    if (!std::isfinite(g.symbol_values_[j]))
      throw Error("group: multiplication symbol must be finite on the grid");
  }
  return g;
}

GroupModel GroupModel::matrix(const MatC& generator, double exponent) {
  if (generator.rows() != generator.cols() || generator.rows() < 1)
    throw DimensionMismatch("group: generator must be a nonempty square matrix");
  if (!(exponent >= 1.0)) throw Error("group: exponent must be >= 1");
  GroupModel g;
  g.kind_ = GroupKind::Matrix;
  g.gen_ = generator;
  g.p_ = exponent;
  const Eigen::ComplexEigenSolver<MatC> es(generator);
  g.eigenvalues_ = es.eigenvalues();
  g.eigvec_ = es.eigenvectors();
  const Eigen::JacobiSVD<MatC> svd(g.eigvec_);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  g.diagonalizable_ = smin > 0.0 && smax / smin < 1e8;
  if (g.diagonalizable_)
    g.eigvec_inv_ = g.eigvec_.partialPivLu().solve(MatC::Identity(generator.rows(), generator.rows()));
  return g;
}

Eigen::Index GroupModel::state_dim() const {
  if (kind_ == GroupKind::Matrix) return gen_.rows();
  return static_cast<Eigen::Index>(spec_.samples) * spec_.fiber_dim;
}

VecC GroupModel::frequency_multiply(const VecC& x, const std::function<cplx(double)>& factor) const {
  const GridFunction f = GridFunction::unflatten(spec_, x);
  MatC c = spectrum(f);
  for (int m = 0; m < spec_.samples; ++m) c.row(m) *= factor(spec_.frequency(m));
  return from_spectrum(spec_, c).flatten();
}

VecC GroupModel::apply_group(double s, const VecC& x) const {
  if (x.size() != state_dim()) throw DimensionMismatch("apply_group: state size mismatch");
  switch (kind_) {
    case GroupKind::Shift:
      // U(s)f = f(. + s): phase e^{+i xi s} on the spectrum
      return frequency_multiply(x, [s](double xi) { return std::exp(cplx(0.0, xi * s)); });
    case GroupKind::Multiplication: {
      VecC out(x.size());
      const Eigen::Index n = spec_.samples;
      for (Eigen::Index i = 0; i < x.size(); ++i)
        out[i] = x[i] * std::exp(cplx(0.0, -s * symbol_values_[i % n]));
      return out;
    }
    case GroupKind::Matrix:
      if (diagonalizable_) {
        VecC phases(eigenvalues_.size());
        for (Eigen::Index i = 0; i < phases.size(); ++i)
          phases[i] = std::exp(cplx(0.0, -s) * eigenvalues_[i]);
        return eigvec_ * (phases.asDiagonal() * (eigvec_inv_ * x));
      }
      return MatC((cplx(0.0, -s) * gen_).exp()) * x;
  }
  throw Error("apply_group: unknown group kind");
}

VecC GroupModel::apply_generator(const VecC& x) const {
  if (x.size() != state_dim()) throw DimensionMismatch("apply_generator: state size mismatch");
  switch (kind_) {
    case GroupKind::Shift:
      // A = i d/dt: the mode e^{i xi t} has generator eigenvalue -xi
      return frequency_multiply(x, [](double xi) { return cplx(-xi, 0.0); });
    case GroupKind::Multiplication: {
      VecC out(x.size());
      const Eigen::Index n = spec_.samples;
      for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = symbol_values_[i % n] * x[i];
      return out;
    }
    case GroupKind::Matrix:
      return gen_ * x;
  }
  throw Error("apply_generator: unknown group kind");
}

double GroupModel::spectrum_distance(cplx lambda) const {
  switch (kind_) {
    case GroupKind::Shift: {
      // spectrum: the sampled generator eigenvalues {-xi_m} on the real line
      double d = infty;
      for (int m = 0; m < spec_.samples; ++m)
        d = std::min(d, std::abs(lambda + spec_.frequency(m)));
      return d;
    }
    case GroupKind::Multiplication: {
      double d = infty;
      for (Eigen::Index j = 0; j < symbol_values_.size(); ++j)
        d = std::min(d, std::abs(lambda - symbol_values_[j]));
      return d;
    }
    case GroupKind::Matrix: {
      double d = infty;
      for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i)
        d = std::min(d, std::abs(lambda - eigenvalues_[i]));
      return d;
    }
  }
  return infty;
}

VecC GroupModel::to_eigenframe(const VecC& x) const {
  if (x.size() != state_dim()) throw DimensionMismatch("to_eigenframe: state size mismatch");
  switch (kind_) {
    case GroupKind::Shift: {
      const MatC c = spectrum(GridFunction::unflatten(spec_, x));
      return VecC(Eigen::Map<const VecC>(c.data(), c.size()));
    }
    case GroupKind::Multiplication:
      return x;
    case GroupKind::Matrix:
      return diagonalizable_ ? VecC(eigvec_inv_ * x) : x;
  }
  return x;
}

VecC GroupModel::from_eigenframe(const VecC& y) const {
  if (y.size() != state_dim()) throw DimensionMismatch("from_eigenframe: state size mismatch");
  switch (kind_) {
    case GroupKind::Shift: {
      const MatC c = Eigen::Map<const MatC>(y.data(), spec_.samples, spec_.fiber_dim);
      return from_spectrum(spec_, c).flatten();
    }
    case GroupKind::Multiplication:
      return y;
    case GroupKind::Matrix:
      return diagonalizable_ ? VecC(eigvec_ * y) : y;
  }
  return y;
}

VecC GroupModel::resolvent(cplx lambda, const VecC& x) const {
  if (x.size() != state_dim()) throw DimensionMismatch("resolvent: state size mismatch");
  if (spectrum_distance(lambda) < kSpectrumTol)
    throw NearSpectrum("resolvent: spectral parameter within tolerance of the spectrum");
  switch (kind_) {
    case GroupKind::Shift:
      return frequency_multiply(x, [lambda](double xi) { return 1.0 / (lambda + xi); });
    case GroupKind::Multiplication: {
      VecC out(x.size());
      const Eigen::Index n = spec_.samples;
      for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = x[i] / (lambda - symbol_values_[i % n]);
      return out;
    }
    case GroupKind::Matrix: {
      const MatC lhs = lambda * MatC::Identity(gen_.rows(), gen_.cols()) - gen_;
      return lhs.partialPivLu().solve(x);
    }
  }
  throw Error("resolvent: unknown group kind");
}

double GroupModel::state_norm(const VecC& x) const {
  if (x.size() != state_dim()) throw DimensionMismatch("state_norm: state size mismatch");
  if (kind_ == GroupKind::Matrix) return vector_p_norm(x, p_);
  return lp_norm(GridFunction::unflatten(spec_, x), p_);
}

double GroupModel::domain_norm(const VecC& x) const {
  return state_norm(x) + state_norm(apply_generator(x));
}

double GroupModel::spectral_bound() const {
  if (kind_ != GroupKind::Matrix) return 0.0;
  double w = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i)
    w = std::max(w, std::abs(eigenvalues_[i].imag()));
  return w;
}

namespace {

// operator-norm sample of U(s): materialized for matrices, probe ascent for
// the function models (which are isometries, so probes are exact there)
double group_norm_sample(const GroupModel& g, double s, Rng& rng) {
  if (g.kind() == GroupKind::Matrix) {
    const Eigen::Index d = g.state_dim();
    MatC u(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      VecC e = VecC::Zero(d);
      e[j] = 1.0;
      u.col(j) = g.apply_group(s, e);
    }
    return operator_norm(u, g.exponent()).lower;
  }
  double best = 0.0;
  for (int probe = 0; probe < 6; ++probe) {
    VecC x(g.state_dim());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.cnormal();
    const double nx = g.state_norm(x);
    if (nx < 1e-12) continue;
    best = std::max(best, g.state_norm(g.apply_group(s, x)) / nx);
  }
  return best;
}

}  // namespace

InterpCouple group_couple(const GroupModel& g) {
  const double p = g.exponent();
  if (!std::isfinite(p) || p < 1.0)
    throw ParameterOrder("group_couple: state exponent must be finite and >= 1");
  auto model = std::make_shared<const GroupModel>(g);

  // 2*d(norm)/d(conj v): the displacement direction the subgradient loop uses
  auto state_subgrad = [model, p](const VecC& v) {
    const double n = model->state_norm(v);
    VecC out = VecC::Zero(v.size());
    if (n < 1e-300) return out;
    const GridSpec& gspec = model->grid();
    if (p == 2.0 &&
        (model->kind() == GroupKind::Matrix || gspec.fiber_dim == 1 ||
         gspec.fiber_exponent == 2.0)) {
      const double s = model->kind() == GroupKind::Matrix ? 1.0 : gspec.spacing();
      out = (s / n) * v;
      return out;
    }
    if (model->kind() == GroupKind::Matrix) {
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > 1e-300) out[i] = std::pow(a, p - 2.0) * v[i] * std::pow(n, 1.0 - p);
      }
      return out;
    }
    const GridSpec& spec = model->grid();
    const double h = spec.spacing();
    const double fe = spec.fiber_exponent;
    const Eigen::Index ns = spec.samples;
    for (Eigen::Index j = 0; j < ns; ++j) {
      double row = 0.0;
      for (Eigen::Index c = 0; c < spec.fiber_dim; ++c)
        row += std::pow(std::abs(v[j + ns * c]), fe);
      row = std::pow(row, 1.0 / fe);
      if (row < 1e-300) continue;
      for (Eigen::Index c = 0; c < spec.fiber_dim; ++c) {
        const double a = std::abs(v[j + ns * c]);
        if (a > 1e-300)
          out[j + ns * c] = h * std::pow(row, p - fe) * std::pow(a, fe - 2.0) * v[j + ns * c] *
                            std::pow(n, 1.0 - p);
      }
    }
    return out;
  };
  auto adjoint_generator = [model](const VecC& v) {
    // the shift generator is real-diagonal in the spectral frame and the
    // multiplication symbol is real, so both are self-adjoint
    if (model->kind() == GroupKind::Matrix) return VecC(model->generator_matrix().adjoint() * v);
    return model->apply_generator(v);
  };

  InterpCouple c;
  c.dim = g.state_dim();
  c.norm_x = [model](const VecC& v) { return model->state_norm(v); };
  c.norm_y = [model](const VecC& v) {
    const double n1 = model->state_norm(v);
    const double n2 = model->state_norm(model->apply_generator(v));
    return std::hypot(n1, n2);
  };
  c.subgrad_x = state_subgrad;
  c.subgrad_y = [model, state_subgrad, adjoint_generator](const VecC& v) {
    const double n1 = model->state_norm(v);
    const VecC w = model->apply_generator(v);
    const double n2 = model->state_norm(w);
    const double ny = std::hypot(n1, n2);
    if (ny < 1e-300) return VecC(VecC::Zero(v.size()));
    VecC out = VecC::Zero(v.size());
    if (n1 > 1e-300) out += (n1 / ny) * state_subgrad(v);
    if (n2 > 1e-300) out += (n2 / ny) * adjoint_generator(state_subgrad(w));
    return out;
  };

  const GridSpec& spec = g.grid();
  const bool flat_fibers = spec.fiber_dim == 1 || spec.fiber_exponent == 2.0;
  if (p == 2.0 && g.kind() == GroupKind::Shift && flat_fibers) {
    c.structure = CoupleStructure::DiagonalQuadratic;
    c.to_frame = [model](const VecC& v) { return model->to_eigenframe(v); };
    c.from_frame = [model](const VecC& v) { return model->from_eigenframe(v); };
    const double scale = std::sqrt(2.0 * spec.half_length);
    c.weight_x = VecR::Constant(c.dim, scale);
    c.weight_y = VecR(c.dim);
    for (Eigen::Index i = 0; i < c.dim; ++i) {
      const double xi = spec.frequency(static_cast<int>(i % spec.samples));
      c.weight_y[i] = scale * std::sqrt(1.0 + xi * xi);
    }
    c.options.iterations = 2;
    c.options.starts = 1;
    c.options.refine_iterations = 30;
    c.options.tolerance = 3e-9;
  } else if (p == 2.0 && g.kind() == GroupKind::Multiplication && flat_fibers) {
    // recover the symbol samples through the public generator action
    const VecC ones = VecC::Ones(c.dim);
    const VecC sym = g.apply_generator(ones);
    c.structure = CoupleStructure::DiagonalQuadratic;
    const double scale = std::sqrt(spec.spacing());
    c.weight_x = VecR::Constant(c.dim, scale);
    c.weight_y = VecR(c.dim);
    for (Eigen::Index i = 0; i < c.dim; ++i)
      c.weight_y[i] = scale * std::sqrt(1.0 + std::norm(sym[i]));
    c.options.iterations = 2;
    c.options.starts = 1;
    c.options.refine_iterations = 30;
    c.options.tolerance = 3e-9;
  } else if (p == 2.0 && g.kind() == GroupKind::Matrix) {
    c.structure = CoupleStructure::DenseQuadratic;
    c.quad_x = MatC::Identity(c.dim, c.dim);
    c.quad_y = MatC(2 * c.dim, c.dim);
    c.quad_y.topRows(c.dim) = MatC::Identity(c.dim, c.dim);
    c.quad_y.bottomRows(c.dim) = g.generator_matrix();
    c.options.iterations = 2;
    c.options.starts = 1;
  }
  return c;
}

GroupTypeEstimate estimate_group_type(const GroupModel& g, double s_max, int samples) {
  if (!(s_max > 0.0) || samples < 8) throw Error("estimate_group_type: need s_max > 0, samples >= 8");
  Rng rng(424242);
  // norms past the overflow threshold poison a log-linear fit with NaNs, so
  // keep only the finite samples; losing most of them already proves growth
  std::vector<double> ss, ln;
  ss.reserve(samples);
  ln.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double s = s_max * (i + 1.0) / samples;
    const double v = std::log(std::max(group_norm_sample(g, s, rng), 1e-300));
    if (!std::isfinite(v)) continue;
    ss.push_back(s);
    ln.push_back(v);
  }
  if (ss.size() < 8) {
    GroupTypeEstimate est;
    est.growth_rate = infty;
    est.growth_constant = infty;
    est.fit_residual = 0.0;
    est.polynomial_growth = false;
    return est;
  }
  samples = static_cast<int>(ss.size());
  // least squares on the tail half, where exponential growth dominates any
  // transient polynomial factor
  const int lo = samples / 2;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const int n = samples - lo;
  for (int i = lo; i < samples; ++i) {
    sx += ss[i];
    sy += ln[i];
    sxx += ss[i] * ss[i];
    sxy += ss[i] * ln[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = denom > 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  GroupTypeEstimate est;
  est.growth_rate = std::max(0.0, slope);
  const double intercept = (sy - slope * sx) / n;
  double rss = 0.0;
  for (int i = lo; i < samples; ++i) {
    const double r = ln[i] - (intercept + slope * ss[i]);
    rss += r * r;
  }
  est.fit_residual = std::sqrt(rss / n);
  double m = 1.0, peak = 0.0;
  for (int i = 0; i < samples; ++i) {
    m = std::max(m, std::exp(ln[i] - est.growth_rate * ss[i]));
    peak = std::max(peak, std::exp(ln[i]));
  }
  est.growth_constant = m;
  est.polynomial_growth = est.growth_rate < 0.01 && peak > 1.5;
  return est;
}

namespace {

double col_sum_norm(const MatC& m) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) best = std::max(best, m.col(j).cwiseAbs().sum());
  return best;
}

double row_sum_norm(const MatC& m) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) best = std::max(best, m.row(i).cwiseAbs().sum());
  return best;
}

double spectral_norm(const MatC& m) {
  // power iteration on m* m from a deterministic start
  VecC v = VecC::Ones(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += cplx(0.0, 1e-3 * (i + 1));
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < 500; ++it) {
    VecC w = m.adjoint() * (m * v);
    const double wn = w.norm();
    if (wn < 1e-300) return 0.0;
    w /= wn;
    const double next = (m * w).norm();
    if (std::abs(next - sigma) <= 1e-14 * (next + 1e-300) && it > 4) return next;
    sigma = next;
    v = w;
  }
  return sigma;
}

// sign(v) |v|^{p-1} applied elementwise
VecC duality_map(const VecC& v, double p) {
  VecC out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    out[i] = a < 1e-300 ? cplx(0.0) : v[i] / a * std::pow(a, p - 1.0);
  }
  return out;
}

}  // namespace

NormEstimate operator_norm(const MatC& m, double p, int restarts, std::uint64_t seed) {
  if (!(p >= 1.0)) throw Error("operator_norm: exponent must be >= 1");
  NormEstimate est;
  if (p == 1.0) {
    est.lower = est.upper = col_sum_norm(m);
    return est;
  }
  if (is_sup_exponent(p)) {
    est.lower = est.upper = row_sum_norm(m);
    return est;
  }
  if (p == 2.0) {
    est.lower = est.upper = spectral_norm(m);
    return est;
  }
  // nonlinear power ascent for the lower bound
  Rng rng(seed);
  const double q = p / (p - 1.0);
  double lower = 0.0;
  for (int r = 0; r < restarts; ++r) {
    VecC x(m.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = r == 0 ? cplx(1.0) : rng.cnormal();
    for (int it = 0; it < 120; ++it) {
      const double nx = vector_p_norm(x, p);
      if (nx < 1e-300) break;
      x /= nx;
      const VecC y = m * x;
      lower = std::max(lower, vector_p_norm(y, p));
      x = duality_map(m.adjoint() * duality_map(y, p), q);
    }
  }
  est.lower = lower;
  // Riesz-Thorin cross bound from the exactly computable exponents
  if (p < 2.0) {
    const double theta = 2.0 * (p - 1.0) / p;  // 1/p = (1-theta)/1 + theta/2
    est.upper = std::pow(col_sum_norm(m), 1.0 - theta) * std::pow(spectral_norm(m), theta);
  } else {
    const double theta = 1.0 - 2.0 / p;  // 1/p = (1-theta)/2
    est.upper = std::pow(spectral_norm(m), 1.0 - theta) * std::pow(row_sum_norm(m), theta);
  }
  est.upper = std::max(est.upper, est.lower);
  return est;
}

std::function<double(double)> symbol_affine(double slope, double offset) {
  return [slope, offset](double t) { return slope * t + offset; };
}

std::function<double(double)> symbol_sine(double amplitude, double angular_rate) {
  return [amplitude, angular_rate](double t) { return amplitude * std::sin(angular_rate * t); };
}

std::function<double(double)> symbol_step(double level) {
  return [level](double t) { return t > 0.0 ? level : (t < 0.0 ? -level : 0.0); };
}

}  // namespace striplab
