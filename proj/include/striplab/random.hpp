#pragma once

#include "striplab/gridfn.hpp"
#include "striplab/measure.hpp"
#include "striplab/rng.hpp"

// Seeded probe and measure families used by tests and by the experiment
// harness.  Atom locations and density windows snap to one common lattice so
// that mixed atom/density convolutions stay exactly on-grid, which the
// Fourier-homomorphism tolerance depends on.

namespace striplab {

struct MeasureFamilyOptions {
  double support = 4.0;       // atoms and density windows inside [-support, support]
  double lattice = 1.0 / 16;  // shared lattice spacing
  int max_atoms = 3;
  bool allow_density = true;
  bool allow_atoms = true;
  double decay_weight = 2.0;  // certified decay for density parts
};

Measure random_measure(Rng& rng, const MeasureFamilyOptions& opts = {});

// complex Gaussian spectral coefficients, band-limited to the given fraction
// of the Nyquist frequency (default half), scaled to unit L2 norm
GridFunction random_bandlimited(Rng& rng, const GridSpec& spec, double band_fraction = 0.5);

// dense complex Gaussian state for matrix models
VecC random_state(Rng& rng, int dim);

}  // namespace striplab
