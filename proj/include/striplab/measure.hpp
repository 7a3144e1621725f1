#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "striplab/numeric.hpp"

// Complex measures on the line with exponential decay control: finitely many
// atoms plus an optional absolutely continuous part sampled on a uniform grid.
// decay_weight is the certified exponential rate: e^{decay|s|}|mu|(ds) is the
// weighted total variation the class norm refers to.

namespace striplab {

struct Atom {
  double location = 0.0;
  cplx weight = 0.0;
};

// density samples[k] sits at left + k*spacing; sample count is even
struct DensityGrid {
  double left = 0.0;
  double spacing = 0.0;
  VecC samples;

  double right() const { return left + spacing * static_cast<double>(samples.size() - 1); }
};

class Measure {
 public:
  Measure() = default;
  Measure(std::vector<Atom> atoms, std::optional<DensityGrid> density, double decay_weight);

  static Measure dirac(double location, cplx weight = 1.0);
  static Measure from_atoms(std::vector<Atom> atoms);
  static Measure from_density(DensityGrid density, double decay_weight);

  const std::vector<Atom>& atoms() const { return atoms_; }
  bool has_density() const { return density_.has_value(); }
  const DensityGrid& density() const { return *density_; }
  double decay_weight() const { return decay_weight_; }

  // half-width of the strip on which the Fourier transform is certified;
  // a pure atomic measure works on every horizontal line
  double strip_capacity() const { return density_ ? decay_weight_ : infty; }

  // radius of the (numerical) support
  double support_radius() const;

  bool empty() const { return atoms_.empty() && !density_; }

 private:
  std::vector<Atom> atoms_;
  std::optional<DensityGrid> density_;
  double decay_weight_ = 0.0;
};

// F mu(z) = ∫ e^{-i s z} mu(ds); density part by trapezoid on its grid.
// Throws StripViolation when |Im z| exceeds the certified strip.
cplx fourier(const Measure& mu, cplx z);
// d/dz F mu(z) = ∫ (-i s) e^{-i s z} mu(ds)
cplx fourier_derivative(const Measure& mu, cplx z);

// convolution; density results live on an enlarged grid, atom shifts that are
// off the lattice deposit across adjacent bins (second order).  Throws
// GridOverflow when the result would exceed max_samples.
Measure convolve(const Measure& mu, const Measure& nu, int max_samples = 1 << 16);

// ∫ e^{omega |s|} |mu|(ds); beyond the certified decay a growth heuristic on
// the outermost samples decides whether to report the +infinity flag
ExtReal total_variation_weighted(const Measure& mu, double omega);

// plain total variation (omega = 0)
double total_variation(const Measure& mu);

// measure cosh(omega s) mu(ds); certified decay drops by omega.
// Throws StripViolation when omega >= strip capacity.
Measure cosh_weight(const Measure& mu, double omega);

// text serialization: "decay <w>", "atom <s> <re> <im>" lines and a
// "density <left> <spacing> <n>" block followed by n "<re> <im>" lines
void save_measure(std::ostream& os, const Measure& mu);
Measure load_measure(std::istream& is);

}  // namespace striplab
