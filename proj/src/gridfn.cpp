#include "striplab/gridfn.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "striplab/errors.hpp"
#include "striplab/fft.hpp"

namespace striplab {

double GridSpec::frequency(int m) const { return fft::frequency(m, samples, half_length); }

void GridSpec::validate() const {
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw Error("grid: half length must be positive");
  if (samples < 8 || (samples & (samples - 1)) != 0)
    throw Error("grid: sample count must be a power of two with at least 8 samples");
  if (fiber_dim < 1) throw DimensionMismatch("grid: fiber dimension must be at least 1");
  if (!(fiber_exponent >= 1.0)) throw Error("grid: fiber exponent must be >= 1");
}

GridFunction::GridFunction(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  vals_ = MatC::Zero(spec.samples, spec.fiber_dim);
}

GridFunction::GridFunction(const GridSpec& spec, MatC samples) : spec_(spec), vals_(std::move(samples)) {
  spec_.validate();
  if (vals_.rows() != spec.samples || vals_.cols() != spec.fiber_dim)
    throw DimensionMismatch("grid function: sample matrix shape does not match the spec");
}

GridFunction GridFunction::from_scalar(const GridSpec& spec, const std::function<cplx(double)>& f) {
  GridSpec s = spec;
  s.fiber_dim = 1;
  GridFunction out(s);
  for (int j = 0; j < s.samples; ++j) out.at(j) = f(s.point(j));
  return out;
}

VecC GridFunction::flatten() const {
  return Eigen::Map<const VecC>(vals_.data(), vals_.size());
}

GridFunction GridFunction::unflatten(const GridSpec& spec, const VecC& v) {
  if (v.size() != static_cast<Eigen::Index>(spec.samples) * spec.fiber_dim)
    throw DimensionMismatch("grid function: flattened size does not match the spec");
  return GridFunction(spec, Eigen::Map<const MatC>(v.data(), spec.samples, spec.fiber_dim));
}

namespace {

// per-sample fiber norms as a vector over the grid
VecR fiber_norms(const MatC& vals, double p) {
  if (vals.cols() == 1) return vals.col(0).cwiseAbs();
  if (p == 2.0) return vals.rowwise().norm();
  if (is_sup_exponent(p)) return vals.cwiseAbs().rowwise().maxCoeff();
  if (p == 1.0) return vals.cwiseAbs().rowwise().sum();
  return vals.cwiseAbs().array().pow(p).rowwise().sum().pow(1.0 / p).matrix();
}

}  // namespace

double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw Error("lp_norm: exponent must be >= 1");
  const VecR fib = fiber_norms(f.samples(), f.spec().fiber_exponent);
  if (is_sup_exponent(p)) return fib.maxCoeff();
  const double h = f.spec().spacing();
  if (p == 1.0) return h * fib.sum();
  if (p == 2.0) return std::sqrt(h * fib.squaredNorm());
  return std::pow(h * fib.array().pow(p).sum(), 1.0 / p);
}

MatC spectrum(const GridFunction& f) { return fft::spectrum_columns(f.samples()); }

GridFunction from_spectrum(const GridSpec& spec, const MatC& coeffs) {
  if (coeffs.rows() != spec.samples || coeffs.cols() != spec.fiber_dim)
    throw DimensionMismatch("from_spectrum: coefficient shape does not match the spec");
  return GridFunction(spec, fft::grid_values_columns(coeffs));
}

GridFunction derivative(const GridFunction& f) {
  MatC c = spectrum(f);
  for (int m = 0; m < f.spec().samples; ++m)
    c.row(m) *= cplx(0.0, f.spec().frequency(m));
  return from_spectrum(f.spec(), c);
}

double sobolev_norm(const GridFunction& f, double p) {
  return lp_norm(f, p) + lp_norm(derivative(f), p);
}

GridFunction translate(const GridFunction& f, double s) {
  MatC c = spectrum(f);
  for (int m = 0; m < f.spec().samples; ++m)
    c.row(m) *= std::exp(cplx(0.0, -f.spec().frequency(m) * s));
  return from_spectrum(f.spec(), c);
}

GridFunction convolve_measure(const Measure& mu, const GridFunction& f, Diagnostics* diag) {
  if (diag && mu.support_radius() > 0.5 * f.spec().half_length)
    diag->warn("convolve_measure: measure support exceeds half of the grid half-length; "
               "periodic wrap-around will pollute the result");
  MatC c = spectrum(f);
  for (int m = 0; m < f.spec().samples; ++m)
    c.row(m) *= fourier(mu, f.spec().frequency(m));
  return from_spectrum(f.spec(), c);
}

void save_csv(std::ostream& os, const GridFunction& f) {
  const GridSpec& s = f.spec();
  os << "t";
  for (int c = 1; c <= s.fiber_dim; ++c) os << ",re_" << c << ",im_" << c;
  os << "\n";
  char buf[64];
  for (int j = 0; j < s.samples; ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", s.point(j));
    os << buf;
    for (int c = 0; c < s.fiber_dim; ++c) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", f.at(j, c).real(), f.at(j, c).imag());
      os << buf;
    }
    os << "\n";
  }
}

GridFunction load_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("grid csv: empty input");
  int cols = 1;
  for (char ch : line)
    if (ch == ',') ++cols;
  if (cols < 3 || (cols - 1) % 2 != 0)
    throw ConfigError("grid csv: header needs columns t, re_1, im_1, ...");
  const int d = (cols - 1) / 2;

  std::vector<double> ts;
  std::vector<cplx> vals;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("grid csv line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (static_cast<int>(row.size()) != cols)
      throw ConfigError("grid csv line " + std::to_string(lineno) + ": wrong column count");
    ts.push_back(row[0]);
    for (int c = 0; c < d; ++c) vals.emplace_back(row[1 + 2 * c], row[2 + 2 * c]);
  }
  const int n = static_cast<int>(ts.size());
  if (n < 8) throw ConfigError("grid csv: too few rows");
  const double h = ts[1] - ts[0];
  GridSpec spec{-ts[0], n, d, 2.0};
  try {
    spec.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("grid csv: ") + e.what());
  }
  if (std::abs(ts[n - 1] - (spec.half_length - h)) > 1e-9 * spec.half_length)
    throw ConfigError("grid csv: rows are not a symmetric uniform grid");
  MatC m(n, d);
  for (int j = 0; j < n; ++j)
    for (int c = 0; c < d; ++c) m(j, c) = vals[static_cast<std::size_t>(j) * d + c];
  return GridFunction(spec, std::move(m));
}

}  // namespace striplab
