#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <numeric>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "striplab/numeric.hpp"

// Parallel kernels with a serial reference path.  Everything funnels through
// for_index(); reductions evaluate per-index results into a buffer first and
// fold serially in index order, so parallel and serial runs are bit-identical
// and output never depends on the thread count.

namespace striplab::par {

bool enabled();
void set_enabled(bool on);  // false = serial reference path
int max_threads();

template <class F>
void for_index(std::ptrdiff_t n, F&& body) {
#if defined(_OPENMP)
  if (enabled() && n > 1) {
    // exceptions may not unwind out of the parallel region: capture the first
    // one and rethrow on the calling thread
    std::exception_ptr err;
    std::mutex err_mutex;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

template <class T, class F>
std::vector<T> map_index(std::ptrdiff_t n, F&& f) {
  std::vector<T> out(static_cast<std::size_t>(n));
  for_index(n, [&](std::ptrdiff_t i) { out[static_cast<std::size_t>(i)] = f(i); });
  return out;
}

template <class F>
double sum_index(std::ptrdiff_t n, F&& f) {  // f(i) -> double
  auto buf = map_index<double>(n, f);
  return std::accumulate(buf.begin(), buf.end(), 0.0);
}

template <class F>
double max_index(std::ptrdiff_t n, F&& f) {  // f(i) -> double, n >= 1
  auto buf = map_index<double>(n, f);
  double m = buf[0];
  for (double v : buf) m = v > m ? v : m;
  return m;
}

// chunked vector accumulation: partial sums over fixed contiguous ranges
// (parallel across chunks), folded in chunk order.  Chunk count is fixed by
// the caller, not by the thread count, to keep results reproducible.
template <class F>
VecC sum_vectors(std::ptrdiff_t n, Eigen::Index dim, F&& f, int chunks = 64) {
  if (n <= 0) return VecC::Zero(dim);
  if (chunks > n) chunks = static_cast<int>(n);
  std::vector<VecC> partial(static_cast<std::size_t>(chunks));
  for_index(chunks, [&](std::ptrdiff_t c) {
    const std::ptrdiff_t lo = n * c / chunks, hi = n * (c + 1) / chunks;
    VecC acc = VecC::Zero(dim);
    for (std::ptrdiff_t i = lo; i < hi; ++i) acc += f(i);
    partial[static_cast<std::size_t>(c)] = std::move(acc);
  });
  VecC total = VecC::Zero(dim);
  for (const auto& p : partial) total += p;
  return total;
}

}  // namespace striplab::par
