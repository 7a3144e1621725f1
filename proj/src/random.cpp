#include "striplab/random.hpp"

#include <cmath>

namespace striplab {

Measure random_measure(Rng& rng, const MeasureFamilyOptions& opts) {
  const double h = opts.lattice;
  const int span = static_cast<int>(std::floor(opts.support / h));
  auto lattice_point = [&](double radius) {
    const int r = std::min(span, static_cast<int>(std::floor(radius / h)));
    return h * rng.uniform_int(-r, r);
  };

  std::vector<Atom> atoms;
  if (opts.allow_atoms) {
    const int n_atoms = rng.uniform_int(0, opts.max_atoms);
    for (int i = 0; i < n_atoms; ++i) atoms.push_back({lattice_point(opts.support), rng.cnormal()});
  }

  std::optional<DensityGrid> density;
  const bool want_density = opts.allow_density && (atoms.empty() || rng.uniform() < 0.7);
  if (want_density) {
    // density window spans the full lattice range, mass concentrated inside
    Eigen::Index n = 2 * span;
    if (n % 2 != 0) ++n;
    VecC samples = VecC::Zero(n);
    const int bumps = rng.uniform_int(1, 2);
    for (int b = 0; b < bumps; ++b) {
      const double center = lattice_point(0.5 * opts.support);
      const double sigma = rng.uniform(0.15, 0.5);
      const cplx amp = rng.cnormal();
      const bool laplace_shape = rng.uniform() < 0.3;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double s = -span * h + h * static_cast<double>(k);
        const double u = (s - center) / sigma;
        samples[k] += laplace_shape ? amp * std::exp(-std::abs(u) * 2.0)
                                    : amp * std::exp(-0.5 * u * u);
      }
    }
    density = DensityGrid{-span * h, h, std::move(samples)};
  }

  if (atoms.empty() && !density) atoms.push_back({0.0, rng.cnormal()});
  return Measure(std::move(atoms), std::move(density),
                 density ? opts.decay_weight : infty);
}

GridFunction random_bandlimited(Rng& rng, const GridSpec& spec, double band_fraction) {
  spec.validate();
  const double cutoff = band_fraction * spec.nyquist();
  MatC coeffs = MatC::Zero(spec.samples, spec.fiber_dim);
  for (int c = 0; c < spec.fiber_dim; ++c)
    for (int m = 0; m < spec.samples; ++m)
      if (std::abs(spec.frequency(m)) <= cutoff) coeffs(m, c) = rng.cnormal();
  GridFunction f = from_spectrum(spec, coeffs);
  const double n2 = lp_norm(f, 2.0);
  if (n2 > 0) f.samples() /= n2;
  return f;
}

VecC random_state(Rng& rng, int dim) {
  VecC x(dim);
  for (int i = 0; i < dim; ++i) x[i] = rng.cnormal();
  const double n = x.norm();
  return n > 0 ? VecC(x / n) : x;
}

}  // namespace striplab
