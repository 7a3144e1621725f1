#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace striplab {

using cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;

inline constexpr double infty = std::numeric_limits<double>::infinity();

// Lebesgue exponents are plain doubles; infty encodes the sup norm.
inline bool is_sup_exponent(double p) { return !(p < infty); }

// extended real: a value that may carry an explicit +infinity flag
struct ExtReal {
  double value = 0.0;
  bool is_infinite = false;

  static ExtReal finite(double v) { return {v, false}; }
  static ExtReal infinite() { return {infty, true}; }
  // value for contexts where +inf propagates through arithmetic naturally
  double as_double() const { return is_infinite ? infty : value; }
};

// warning channel for operations that stay well-defined but numerically degraded
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string msg) { warnings.push_back(std::move(msg)); }
  bool empty() const { return warnings.empty(); }
};

inline double sqr(double x) { return x * x; }

}  // namespace striplab
