// Kernel benchmark: times the serial reference path against the OpenMP path
// for the heavy numerical kernels and verifies the two produce bit-identical
// results.  Usage: striplab-bench [--samples N] [--reps R]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "striplab/besov.hpp"
#include "striplab/calculus.hpp"
#include "striplab/gridfn.hpp"
#include "striplab/groups.hpp"
#include "striplab/interp.hpp"
#include "striplab/measure.hpp"
#include "striplab/parallel.hpp"
#include "striplab/random.hpp"
#include "striplab/rng.hpp"

using namespace striplab;

namespace {

double run_timed(const std::function<VecC()>& body, int reps, VecC* out) {
  *out = body();  // warm-up, also the parity witness
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) body();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

struct Bench {
  std::string name;
  std::function<VecC()> body;
};

}  // namespace

int main(int argc, char** argv) {
  int samples = 1024, reps = 5;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--samples") == 0 && i + 1 < argc)
      samples = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--reps") == 0 && i + 1 < argc)
      reps = std::atoi(argv[++i]);
  }

  const GridSpec spec{16.0, samples, 1, 2.0};
  const GroupModel shift = GroupModel::shift(spec);
  const InterpCouple couple = group_couple(shift);
  Rng rng(5);
  const VecC x = random_bandlimited(rng, spec, 0.5).flatten();
  Rng mrng(6);
  MeasureFamilyOptions opts;
  opts.max_atoms = 0;  // density-only: exercises the quadrature kernel
  const Measure density = random_measure(mrng, opts);
  const GridFunction f = GridFunction::unflatten(spec, x);

  auto wrap = [](double v) {
    VecC out(1);
    out[0] = v;
    return out;
  };

  const std::vector<Bench> benches = {
      {"measure-apply", [&] { return phillips_apply(shift, density, x); }},
      {"smoothness-norm", [&] { return wrap(besov_norm(f, 0.5, 2.0, 2.0)); }},
      {"interp-norm", [&] { return wrap(interp_norm(couple, x, 0.5, 2.0)); }},
      {"block-sum",
       [&] {
         return par::sum_vectors(4096, 8, [&](std::ptrdiff_t i) {
           VecC v = VecC::Constant(8, cplx(1.0 / (1.0 + i), 0.5));
           return v;
         });
       }},
  };

  std::printf("grid: %d samples, %d reps, %d thread(s)\n", samples, reps,
              par::max_threads());
  std::printf("%-18s %12s %12s %9s %8s\n", "kernel", "serial (ms)", "openmp (ms)",
              "speedup", "parity");
  bool all_match = true;
  for (const Bench& b : benches) {
    VecC serial_out, parallel_out;
    par::set_enabled(false);
    const double t_serial = run_timed(b.body, reps, &serial_out);
    par::set_enabled(true);
    const double t_parallel = run_timed(b.body, reps, &parallel_out);
    const bool match =
        serial_out.size() == parallel_out.size() &&
        std::memcmp(serial_out.data(), parallel_out.data(),
                    sizeof(cplx) * serial_out.size()) == 0;
    all_match = all_match && match;
    std::printf("%-18s %12.3f %12.3f %8.2fx %8s\n", b.name.c_str(), t_serial, t_parallel,
                t_serial / t_parallel, match ? "exact" : "DIFFER");
  }
  if (!all_match) {
    std::printf("parity failure: serial and parallel paths disagree\n");
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
