#pragma once

// Independent numerical oracles for the tests.  Deliberately simple and
// self-contained: nothing here calls into the library's own quadrature or
// spectral machinery, so a disagreement always means one side is wrong.

#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

using cplx = std::complex<double>;

// composite Simpson with n panels (n even)
template <class F>
auto simpson(F&& f, double a, double b, int n) -> decltype(f(0.0)) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  auto acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
  return acc * (h / 3.0);
}

// recursive adaptive Simpson
namespace detail {
template <class F>
double adapt(F& f, double a, double b, double fa, double fm, double fb, double whole,
             double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) < 15.0 * tol) return left + right + delta / 15.0;
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <class F>
double adaptive(F&& f, double a, double b, double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adapt(f, a, b, fa, fm, fb, whole, tol, 40);
}

// sine integral Si(x) = ∫_0^x sin(u)/u du
inline double sine_integral(double x) {
  auto sinc = [](double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; };
  return adaptive(sinc, 0.0, x, 1e-13);
}

// f applied to an upper-triangular Jordan block J(lambda, d) hits the basis
// vector e_col: entries f^{(j)}(lambda)/j! on the j-th superdiagonal.
// derivs[j] must hold f^{(j)}(lambda), j = 0..d-1.
inline std::vector<cplx> jordan_column(const std::vector<cplx>& derivs, int d, int col) {
  std::vector<cplx> out(d, cplx(0.0));
  double fact = 1.0;
  for (int j = 0; j <= col; ++j) {
    if (j > 0) fact *= j;
    out[col - j] = derivs[j] / fact;
  }
  return out;
}

}  // namespace oracle
