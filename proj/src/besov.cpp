#include "striplab/besov.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "striplab/errors.hpp"
#include "striplab/gauss.hpp"
#include "striplab/parallel.hpp"

namespace striplab {

namespace {

double bump_raw(double s) { return std::abs(s) < 1.0 ? std::exp(1.0 / (s * s - 1.0)) : 0.0; }

double gauss_panel(double a, double b, const std::function<double(double)>& f) {
  return gauss16_panel<double>(a, b, f);
}

constexpr int kPanels = 64;

// cumulative integrals of the raw bump over [-1, -1 + j*(2/kPanels)]
struct BumpTable {
  std::array<double, kPanels + 1> cum{};
  double total = 0.0;
  BumpTable() {
    const double w = 2.0 / kPanels;
    cum[0] = 0.0;
    for (int j = 0; j < kPanels; ++j)
      cum[j + 1] = cum[j] + gauss_panel(-1.0 + j * w, -1.0 + (j + 1) * w, bump_raw);
    total = cum[kPanels];
  }
};

const BumpTable& bump_table() {
  static const BumpTable table;
  return table;
}

}  // namespace

double bump(double s) { return bump_raw(s) / bump_table().total; }

double bump_cdf(double s) {
  if (s <= -1.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const BumpTable& t = bump_table();
  const double w = 2.0 / kPanels;
  const int j = std::min(kPanels - 1, static_cast<int>(std::floor((s + 1.0) / w)));
  const double left = -1.0 + j * w;
  return (t.cum[j] + gauss_panel(left, s, bump_raw)) / t.total;
}

double lowpass_profile(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  return 1.0 - bump_cdf(2.0 * s - 3.0);
}

double band_profile(double s) { return lowpass_profile(s) - lowpass_profile(2.0 * s); }

DyadicPartition::DyadicPartition(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  max_level_ = std::max(1, static_cast<int>(std::ceil(std::log2(spec.nyquist()))));
}

double DyadicPartition::level_symbol(int k, double xi) const {
  const double a = std::abs(xi);
  if (k == 0) return lowpass_profile(a);
  return band_profile(std::ldexp(a, -k));
}

DyadicPartition build_partition(const GridSpec& spec) { return DyadicPartition(spec); }

double besov_norm(const GridFunction& f, double r, double p, double q,
                  std::vector<double>* block_norms) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw Error("besov_norm: exponents must be >= 1");
  const DyadicPartition part(f.spec());
  const GridSpec& spec = f.spec();
  const MatC coeffs = spectrum(f);
  const int levels = part.max_level() + 1;

  std::vector<double> weighted = par::map_index<double>(levels, [&](std::size_t ks) {
    const int k = static_cast<int>(ks);
    MatC c = coeffs;
    for (int m = 0; m < spec.samples; ++m) c.row(m) *= part.level_symbol(k, spec.frequency(m));
    const double norm = lp_norm(from_spectrum(spec, c), p);
    return std::pow(2.0, r * k) * norm;
  });
  if (block_norms) *block_norms = weighted;

  if (is_sup_exponent(q)) return *std::max_element(weighted.begin(), weighted.end());
  double acc = 0.0;
  for (double w : weighted) acc += std::pow(w, q);
  return std::pow(acc, 1.0 / q);
}

GridFunction multiplier_apply(const MultiplierSymbol& m, const GridFunction& f) {
  if (!m.value) throw Error("multiplier_apply: symbol has no evaluator");
  MatC c = spectrum(f);
  for (int j = 0; j < f.spec().samples; ++j) c.row(j) *= m.value(f.spec().frequency(j));
  return from_spectrum(f.spec(), c);
}

namespace {

double golden_max(const std::function<double(double)>& f, double lo, double hi, int iters) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return std::max(fc, fd);
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters) {
  return -golden_max([&](double x) { return -f(x); }, lo, hi, iters);
}

}  // namespace

double mikhlin_norm(const MultiplierSymbol& m, const FrequencyScan& scan) {
  if (!m.value) throw Error("mikhlin_norm: symbol has no evaluator");
  if (!m.derivative) throw MissingDerivative("mikhlin_norm: symbol derivative unavailable");
  auto objective = [&](double s) {
    return std::abs(m.value(s)) + (1.0 + std::abs(s)) * std::abs(m.derivative(s));
  };

  std::vector<double> points;
  points.push_back(0.0);
  const int nl = std::max(3, scan.linear_points);
  for (int i = 0; i < nl; ++i)
    points.push_back(-scan.linear_half_width + 2.0 * scan.linear_half_width * i / (nl - 1.0));
  const double decades = std::log10(scan.max_abs / scan.linear_half_width);
  const int nlog = std::max(1, static_cast<int>(std::ceil(decades * scan.points_per_decade)));
  for (int i = 1; i <= nlog; ++i) {
    const double s = scan.linear_half_width * std::pow(10.0, decades * i / nlog);
    points.push_back(s);
    points.push_back(-s);
  }
  std::sort(points.begin(), points.end());

  std::size_t best = 0;
  double fbest = -infty;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double v = objective(points[i]);
    if (v > fbest) {
      fbest = v;
      best = i;
    }
  }
  const double lo = points[best == 0 ? 0 : best - 1];
  const double hi = points[std::min(best + 1, points.size() - 1)];
  return std::max(fbest, golden_max(objective, lo, hi, 80));
}

namespace {

const GridSpec kInnerSpec{64.0, 4096, 1, 2.0};

// B^{1/2}_{2,1} norm of xi -> (phi_k m)(a xi) sampled on the fixed inner grid
double dilated_block_norm(const DyadicPartition& outer, int k, const MultiplierSymbol& m,
                          double a) {
  GridFunction g = GridFunction::from_scalar(kInnerSpec, [&](double xi) {
    const double window = outer.level_symbol(k, a * xi);
    return window == 0.0 ? cplx(0.0) : window * m.value(a * xi);
  });
  return besov_norm(g, 0.5, 2.0, 1.0);
}

}  // namespace

double girardi_weis_bound(const MultiplierSymbol& m, const GridSpec& spec,
                          std::vector<double>* block_values) {
  if (!m.value) throw Error("girardi_weis_bound: symbol has no evaluator");
  const DyadicPartition part(spec);
  const int levels = part.max_level() + 1;
  std::vector<double> vals(levels);
  for (int k = 0; k < levels; ++k) {
    // admissible dilations: the image band [2^{k-1}/a, 2^{k+1}/a] must fit in
    // the inner window and keep at least ~16 samples across its width
    double lo = (k + 1) - std::log2(0.98 * kInnerSpec.half_length);
    double hi = (k == 0) ? 2.0 : k + std::log2(3.0);
    lo = std::max(lo, -20.0);
    hi = std::min(hi, 20.0);
    auto objective = [&](double log2a) {
      return dilated_block_norm(part, k, m, std::exp2(log2a));
    };
    const int coarse = 33;
    double best_x = lo, best_v = infty;
    for (int i = 0; i < coarse; ++i) {
      const double x = lo + (hi - lo) * i / (coarse - 1.0);
      const double v = objective(x);
      if (v < best_v) {
        best_v = v;
        best_x = x;
      }
    }
    const double step = (hi - lo) / (coarse - 1.0);
    const double ref = golden_min(objective, std::max(lo, best_x - step),
                                  std::min(hi, best_x + step), 40);
    vals[k] = std::min(best_v, ref);
  }
  if (block_values) *block_values = vals;
  return *std::max_element(vals.begin(), vals.end());
}

}  // namespace striplab
