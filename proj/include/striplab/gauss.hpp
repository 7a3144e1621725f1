#pragma once

#include <array>
#include <cmath>

// 16-point Gauss-Legendre rule on [-1,1], shared by the quadratures that must
// avoid interval endpoints.  Nodes and weights are solved once by Newton
// iteration on the Legendre recurrence.

namespace striplab {

struct GaussRule16 {
  std::array<double, 16> node{}, weight{};
  GaussRule16() {
    const int n = 16;
    for (int i = 0; i < n / 2; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      node[i] = -x;
      node[n - 1 - i] = x;
      weight[i] = weight[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

inline const GaussRule16& gauss16() {
  static const GaussRule16 rule;
  return rule;
}

// integral of f over [a, b] by one 16-point panel; F maps double -> T
template <class T, class F>
T gauss16_panel(double a, double b, F&& f) {
  const GaussRule16& g = gauss16();
  const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
  T acc = g.weight[0] * f(mid + rad * g.node[0]);
  for (int i = 1; i < 16; ++i) acc += g.weight[i] * f(mid + rad * g.node[i]);
  return rad * acc;
}

}  // namespace striplab
