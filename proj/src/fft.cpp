#include "striplab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace striplab::fft {

namespace {

// FFTW plan creation is not thread-safe; executions via fftw_execute_dft are.
// Plans are cached per size, created out-of-place with FFTW_ESTIMATE (fully
// deterministic) plus FFTW_UNALIGNED so they apply to any caller buffer.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex g_plan_mutex;

PlanPair plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> a(n), b(n);
  PlanPair p;
  p.fwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                           reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.bwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                           reinterpret_cast<fftw_complex*>(b.data()), FFTW_BACKWARD,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache[n] = p;
  return p;
}

void execute(fftw_plan plan, const cplx* in, cplx* out) {
  // in-buffer is not modified by an out-of-place c2c transform
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

double frequency(int m, int n, double half_length) {
  const int mt = m < n / 2 ? m : m - n;
  return M_PI * mt / half_length;
}

void spectrum(const cplx* values, cplx* coeffs, int n) {
  std::vector<cplx> tmp(n);
  execute(plans_for(n).fwd, values, tmp.data());
  const double scale = 1.0 / n;
  for (int m = 0; m < n; ++m) coeffs[m] = ((m & 1) ? -scale : scale) * tmp[m];
}

void grid_values(const cplx* coeffs, cplx* values, int n) {
  std::vector<cplx> tmp(n);
  for (int m = 0; m < n; ++m) tmp[m] = (m & 1) ? -coeffs[m] : coeffs[m];
  execute(plans_for(n).bwd, tmp.data(), values);
}

VecC spectrum(const VecC& values) {
  VecC out(values.size());
  spectrum(values.data(), out.data(), static_cast<int>(values.size()));
  return out;
}

VecC grid_values(const VecC& coeffs) {
  VecC out(coeffs.size());
  grid_values(coeffs.data(), out.data(), static_cast<int>(coeffs.size()));
  return out;
}

MatC spectrum_columns(const MatC& values) {
  MatC out(values.rows(), values.cols());
  const int n = static_cast<int>(values.rows());
  for (Eigen::Index c = 0; c < values.cols(); ++c)
    spectrum(values.col(c).data(), out.col(c).data(), n);
  return out;
}

MatC grid_values_columns(const MatC& coeffs) {
  MatC out(coeffs.rows(), coeffs.cols());
  const int n = static_cast<int>(coeffs.rows());
  for (Eigen::Index c = 0; c < coeffs.cols(); ++c)
    grid_values(coeffs.col(c).data(), out.col(c).data(), n);
  return out;
}

void dft_forward(const cplx* in, cplx* out, int n) { execute(plans_for(n).fwd, in, out); }

void dft_backward(const cplx* in, cplx* out, int n) { execute(plans_for(n).bwd, in, out); }

}  // namespace striplab::fft

