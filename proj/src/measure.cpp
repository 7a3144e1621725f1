#include "striplab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "striplab/errors.hpp"
#include "striplab/fft.hpp"

namespace striplab {

namespace {

bool finite_cplx(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// trapezoid weights on a uniform grid: half weight at both ends
double trap_weight(Eigen::Index k, Eigen::Index n) {
  return (k == 0 || k == n - 1) ? 0.5 : 1.0;
}

}  // namespace

Measure::Measure(std::vector<Atom> atoms, std::optional<DensityGrid> density, double decay_weight)
    : atoms_(std::move(atoms)), density_(std::move(density)), decay_weight_(decay_weight) {
  if (decay_weight_ < 0.0 || std::isnan(decay_weight_))
    throw Error("measure: decay weight must be nonnegative");
  if (density_ && !std::isfinite(decay_weight_))
    throw Error("measure: a density part needs a finite decay weight");
  for (const Atom& a : atoms_)
    if (!std::isfinite(a.location) || !finite_cplx(a.weight))
      throw Error("measure: atom entries must be finite");
  if (density_) {
    if (density_->spacing <= 0.0 || !std::isfinite(density_->spacing) ||
        !std::isfinite(density_->left))
      throw Error("measure: density grid needs finite left endpoint and positive spacing");
    const Eigen::Index n = density_->samples.size();
    if (n < 2 || n % 2 != 0)
      throw DimensionMismatch("measure: density sample count must be even and at least 2");
    for (Eigen::Index k = 0; k < n; ++k)
      if (!finite_cplx(density_->samples[k]))
        throw Error("measure: density samples must be finite");
  }
}

Measure Measure::dirac(double location, cplx weight) {
  return Measure({Atom{location, weight}}, std::nullopt, infty);
}

Measure Measure::from_atoms(std::vector<Atom> atoms) {
  return Measure(std::move(atoms), std::nullopt, infty);
}

Measure Measure::from_density(DensityGrid density, double decay_weight) {
  return Measure({}, std::move(density), decay_weight);
}

double Measure::support_radius() const {
  double r = 0.0;
  for (const Atom& a : atoms_) r = std::max(r, std::abs(a.location));
  if (density_) r = std::max({r, std::abs(density_->left), std::abs(density_->right())});
  return r;
}

cplx fourier(const Measure& mu, cplx z) {
  if (std::abs(z.imag()) > mu.strip_capacity() * (1.0 + 1e-12) + 1e-300)
    throw StripViolation("fourier: |Im z| exceeds the certified strip half-width");
  cplx acc = 0.0;
  for (const Atom& a : mu.atoms()) acc += a.weight * std::exp(cplx(0, -a.location) * z);
  if (mu.has_density()) {
    const DensityGrid& d = mu.density();
    const Eigen::Index n = d.samples.size();
    cplx sum = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double s = d.left + d.spacing * static_cast<double>(k);
      sum += trap_weight(k, n) * d.samples[k] * std::exp(cplx(0, -s) * z);
    }
    acc += d.spacing * sum;
  }
  return acc;
}

cplx fourier_derivative(const Measure& mu, cplx z) {
  if (std::abs(z.imag()) > mu.strip_capacity() * (1.0 + 1e-12) + 1e-300)
    throw StripViolation("fourier_derivative: |Im z| exceeds the certified strip half-width");
  cplx acc = 0.0;
  for (const Atom& a : mu.atoms())
    acc += cplx(0, -a.location) * a.weight * std::exp(cplx(0, -a.location) * z);
  if (mu.has_density()) {
    const DensityGrid& d = mu.density();
    const Eigen::Index n = d.samples.size();
    cplx sum = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double s = d.left + d.spacing * static_cast<double>(k);
      sum += trap_weight(k, n) * cplx(0, -s) * d.samples[k] * std::exp(cplx(0, -s) * z);
    }
    acc += d.spacing * sum;
  }
  return acc;
}

namespace {

// one absolutely continuous contribution on its own uniform grid
struct Block {
  double left;
  double spacing;
  VecC samples;
};

VecC resample_linear(const VecC& v, double h_old, double h_new, Eigen::Index n_new) {
  VecC out(n_new);
  for (Eigen::Index k = 0; k < n_new; ++k) {
    const double pos = k * h_new / h_old;
    const auto i = static_cast<Eigen::Index>(std::floor(pos));
    if (i >= v.size() - 1) {
      out[k] = v[v.size() - 1];
    } else {
      const double f = pos - static_cast<double>(i);
      out[k] = (1.0 - f) * v[i] + f * v[i + 1];
    }
  }
  return out;
}

// discrete linear convolution scaled by the spacing (Riemann weights)
VecC convolve_samples(const VecC& f, const VecC& g, double h) {
  const Eigen::Index n = f.size() + g.size() - 1;
  Eigen::Index m = 1;
  while (m < n) m <<= 1;
  VecC fp = VecC::Zero(m), gp = VecC::Zero(m);
  fp.head(f.size()) = f;
  gp.head(g.size()) = g;
  VecC F(m), G(m);
  fft::dft_forward(fp.data(), F.data(), static_cast<int>(m));
  fft::dft_forward(gp.data(), G.data(), static_cast<int>(m));
  F.array() *= G.array();
  VecC conv(m);
  fft::dft_backward(F.data(), conv.data(), static_cast<int>(m));
  return (h / static_cast<double>(m)) * conv.head(n);
}

}  // namespace

Measure convolve(const Measure& mu, const Measure& nu, int max_samples) {
  if (mu.empty() || nu.empty()) return Measure();

  std::vector<Atom> atoms;
  for (const Atom& a : mu.atoms())
    for (const Atom& b : nu.atoms())
      atoms.push_back({a.location + b.location, a.weight * b.weight});

  // collect density contributions, all on one common spacing
  std::vector<Block> blocks;
  double h = infty;
  if (mu.has_density()) h = std::min(h, mu.density().spacing);
  if (nu.has_density()) h = std::min(h, nu.density().spacing);

  // pre-apply the trapezoid end weights so that block arithmetic becomes exact
  // lattice-measure arithmetic; the merge step divides the output end weights
  // back out, making fourier(convolve(mu, nu)) == fourier(mu) * fourier(nu)
  // hold to rounding on aligned grids
  auto aligned = [&](const DensityGrid& d) -> VecC {
    VecC v = d.samples;
    if (std::abs(d.spacing - h) > 1e-12 * h) {
      const auto n_new = static_cast<Eigen::Index>(std::floor((d.right() - d.left) / h)) + 1;
      v = resample_linear(d.samples, d.spacing, h, n_new);
    }
    v[0] *= 0.5;
    v[v.size() - 1] *= 0.5;
    return v;
  };

  if (mu.has_density() && nu.has_density()) {
    VecC f = aligned(mu.density()), g = aligned(nu.density());
    blocks.push_back({mu.density().left + nu.density().left, h, convolve_samples(f, g, h)});
  }
  if (mu.has_density())
    for (const Atom& b : nu.atoms())
      blocks.push_back({mu.density().left + b.location, h, b.weight * aligned(mu.density())});
  if (nu.has_density())
    for (const Atom& a : mu.atoms())
      blocks.push_back({nu.density().left + a.location, h, a.weight * aligned(nu.density())});

  const double cap = std::min(mu.strip_capacity(), nu.strip_capacity());
  if (blocks.empty()) {
    Measure out = Measure::from_atoms(std::move(atoms));
    return out;
  }

  // merge blocks onto one grid; off-lattice offsets split across adjacent bins
  double left = infty, right = -infty;
  for (const Block& b : blocks) {
    left = std::min(left, b.left);
    right = std::max(right, b.left + h * static_cast<double>(b.samples.size() - 1));
  }
  auto n_out = static_cast<Eigen::Index>(std::ceil((right - left) / h - 1e-9)) + 2;
  if (n_out % 2 != 0) ++n_out;
  if (n_out > max_samples)
    throw GridOverflow("convolve: result density would need " + std::to_string(n_out) +
                       " samples (cap " + std::to_string(max_samples) + ")");

  VecC acc = VecC::Zero(n_out);
  for (const Block& b : blocks) {
    const double base = (b.left - left) / h;
    const auto ibase = static_cast<Eigen::Index>(std::floor(base + 1e-9));
    double frac = base - static_cast<double>(ibase);
    if (frac < 1e-9 || frac > 1.0 - 1e-9) frac = frac < 0.5 ? 0.0 : 1.0;
    for (Eigen::Index k = 0; k < b.samples.size(); ++k) {
      const Eigen::Index i = ibase + k;
      if (frac == 0.0) {
        acc[i] += b.samples[k];
      } else {
        acc[i] += (1.0 - frac) * b.samples[k];
        acc[i + 1] += frac * b.samples[k];
      }
    }
  }
  acc[0] *= 2.0;
  acc[n_out - 1] *= 2.0;

  return Measure(std::move(atoms), DensityGrid{left, h, std::move(acc)}, cap);
}

ExtReal total_variation_weighted(const Measure& mu, double omega) {
  if (omega < 0.0 || !std::isfinite(omega))
    throw Error("total_variation_weighted: weight must be finite and nonnegative");
  double acc = 0.0;
  for (const Atom& a : mu.atoms())
    acc += std::abs(a.weight) * std::exp(omega * std::abs(a.location));
  if (!mu.has_density()) return ExtReal::finite(acc);

  const DensityGrid& d = mu.density();
  const Eigen::Index n = d.samples.size();
  VecR weighted(n);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double s = d.left + d.spacing * static_cast<double>(k);
    weighted[k] = std::abs(d.samples[k]) * std::exp(omega * std::abs(s));
    sum += trap_weight(k, n) * weighted[k];
  }
  acc += d.spacing * sum;

  if (omega > mu.decay_weight() + 1e-12) {
    // beyond the certified class: flag divergence when the weighted integrand
    // still grows toward either edge of the sampled window
    const Eigen::Index dec = std::max<Eigen::Index>(1, n / 10);
    const double lo_outer = weighted.head(dec).maxCoeff();
    const double lo_inner = weighted.segment(dec, std::min(dec, n - dec)).maxCoeff();
    const double hi_outer = weighted.tail(dec).maxCoeff();
    const double hi_inner = weighted.segment(n - 2 * dec, dec).maxCoeff();
    if (lo_outer > lo_inner * (1.0 + 1e-9) || hi_outer > hi_inner * (1.0 + 1e-9))
      return ExtReal::infinite();
  }
  return ExtReal::finite(acc);
}

double total_variation(const Measure& mu) { return total_variation_weighted(mu, 0.0).value; }

Measure cosh_weight(const Measure& mu, double omega) {
  if (omega <= 0.0 || !std::isfinite(omega))
    throw Error("cosh_weight: weight must be finite and positive");
  if (omega >= mu.strip_capacity())
    throw StripViolation("cosh_weight: weight must stay below the certified decay");
  std::vector<Atom> atoms = mu.atoms();
  for (Atom& a : atoms) a.weight *= std::cosh(omega * a.location);
  std::optional<DensityGrid> density;
  double decay = infty;
  if (mu.has_density()) {
    DensityGrid d = mu.density();
    for (Eigen::Index k = 0; k < d.samples.size(); ++k) {
      const double s = d.left + d.spacing * static_cast<double>(k);
      d.samples[k] *= std::cosh(omega * s);
    }
    density = std::move(d);
    decay = mu.decay_weight() - omega;
  }
  return Measure(std::move(atoms), std::move(density), decay);
}

void save_measure(std::ostream& os, const Measure& mu) {
  char buf[160];
  if (std::isfinite(mu.decay_weight()))
    std::snprintf(buf, sizeof buf, "decay %.17g\n", mu.decay_weight());
  else
    std::snprintf(buf, sizeof buf, "decay inf\n");
  os << buf;
  for (const Atom& a : mu.atoms()) {
    std::snprintf(buf, sizeof buf, "atom %.17g %.17g %.17g\n", a.location, a.weight.real(),
                  a.weight.imag());
    os << buf;
  }
  if (mu.has_density()) {
    const DensityGrid& d = mu.density();
    std::snprintf(buf, sizeof buf, "density %.17g %.17g %lld\n", d.left, d.spacing,
                  static_cast<long long>(d.samples.size()));
    os << buf;
    for (Eigen::Index k = 0; k < d.samples.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g\n", d.samples[k].real(), d.samples[k].imag());
      os << buf;
    }
  }
}

Measure load_measure(std::istream& is) {
  std::vector<Atom> atoms;
  std::optional<DensityGrid> density;
  double decay = infty;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "decay") {
      std::string v;
      ss >> v;
      decay = (v == "inf") ? infty : std::stod(v);
    } else if (tag == "atom") {
      double s, re, im;
      if (!(ss >> s >> re >> im))
        throw ConfigError("measure line " + std::to_string(lineno) + ": bad atom entry");
      atoms.push_back({s, cplx(re, im)});
    } else if (tag == "density") {
      double left, spacing;
      long long n;
      if (!(ss >> left >> spacing >> n) || n < 2)
        throw ConfigError("measure line " + std::to_string(lineno) + ": bad density header");
      VecC samples(n);
      for (long long k = 0; k < n; ++k) {
        double re, im;
        if (!(is >> re >> im))
          throw ConfigError("measure: density block ended after " + std::to_string(k) +
                            " of " + std::to_string(n) + " samples");
        samples[k] = cplx(re, im);
      }
      std::getline(is, line);  // swallow the remainder of the last sample line
      density = DensityGrid{left, spacing, std::move(samples)};
    } else {
      throw ConfigError("measure line " + std::to_string(lineno) + ": unknown tag '" + tag + "'");
    }
  }
  if (density && !std::isfinite(decay)) decay = 0.0;
  return Measure(std::move(atoms), std::move(density), decay);
}

}  // namespace striplab
