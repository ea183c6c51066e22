#include "diracspec/mat2.hpp"

#include <algorithm>

namespace dirac {

double op_norm(const Mat2& m) {
  const double f2 = m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22;
  const double d = m.det();
  const double disc = std::max(0.0, f2 * f2 - 4.0 * d * d);
  return std::sqrt(0.5 * (f2 + std::sqrt(disc)));
}

double max_abs(const Mat2& m) {
  return std::max({std::abs(m.a11), std::abs(m.a12), std::abs(m.a21), std::abs(m.a22)});
}

Mat2 rotation(double lambda, double x) {
  const double th = lambda * x;
  const double c = std::cos(th);
  const double s = std::sin(th);
  return {c, -s, s, c};
}

namespace {

// For a trace-free m with d = det m we have m^2 = -d I, so
// exp(m) = C(d) I + S(d) m with C = cos(sqrt d), S = sin(sqrt d)/sqrt d
// (hyperbolic versions for d < 0).
struct CS {
  double c;
  double s;
  double ds;  // dS/dd
};

CS cs_of(double d) {
  if (std::abs(d) < 1e-3) {
    // Taylor in d; truncation below 1e-18 for |d| < 1e-3.
    const double c = 1.0 - d / 2.0 + d * d / 24.0 - d * d * d / 720.0 + d * d * d * d / 40320.0;
    const double s = 1.0 - d / 6.0 + d * d / 120.0 - d * d * d / 5040.0 + d * d * d * d / 362880.0;
    const double ds = -1.0 / 6.0 + d / 60.0 - d * d / 1680.0 + d * d * d / 90720.0;
    return {c, s, ds};
  }
  double c = 0.0;
  double s = 0.0;
  if (d > 0.0) {
    const double w = std::sqrt(d);
    c = std::cos(w);
    s = std::sin(w) / w;
  } else {
    const double w = std::sqrt(-d);
    c = std::cosh(w);
    s = std::sinh(w) / w;
  }
  return {c, s, (c - s) / (2.0 * d)};
}

}  // namespace

Mat2 mat2_exp(const Mat2& m) {
  const double tau = 0.5 * m.trace();
  const Mat2 m0 = m - tau * kI;
  const double d = m0.det();
  Mat2 e;
  if (d == 0.0) {
    e = kI + m0;
  } else {
    const CS v = cs_of(d);
    e = v.c * kI + v.s * m0;
  }
  return tau == 0.0 ? e : std::exp(tau) * e;
}

ExpWithDerivative mat2_exp_derivative(const Mat2& m, const Mat2& dm) {
  const double tau = 0.5 * m.trace();
  const double dtau = 0.5 * dm.trace();
  const Mat2 m0 = m - tau * kI;
  const Mat2 dm0 = dm - dtau * kI;
  const double d = m0.det();
  // d(det m0) = tr(adj(m0) dm0) and adj(m0) = -m0 for trace-free m0
  const Mat2 prod = m0 * dm0;
  const double dd = -prod.trace();
  const CS v = cs_of(d);
  const Mat2 e0 = v.c * kI + v.s * m0;
  // dC/dd = -S/2
  const Mat2 de0 = (-0.5 * v.s * dd) * kI + (v.ds * dd) * m0 + v.s * dm0;
  const double g = std::exp(tau);
  return {g * e0, g * (de0 + dtau * e0)};
}

}  // namespace dirac
