#pragma once

#include <cmath>

namespace dirac {

// Real 2x2 matrix, row-major entries.
struct Mat2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 zero() { return {}; }
  // a*I + b*B
  static constexpr Mat2 rot_algebra(double a, double b) { return {a, b, -b, a}; }

  constexpr double trace() const { return a11 + a22; }
  constexpr double det() const { return a11 * a22 - a12 * a21; }
  constexpr Mat2 transpose() const { return {a11, a21, a12, a22}; }

  constexpr Mat2& operator+=(const Mat2& o) {
    a11 += o.a11; a12 += o.a12; a21 += o.a21; a22 += o.a22;
    return *this;
  }
  constexpr Mat2& operator-=(const Mat2& o) {
    a11 -= o.a11; a12 -= o.a12; a21 -= o.a21; a22 -= o.a22;
    return *this;
  }
  constexpr Mat2& operator*=(double s) {
    a11 *= s; a12 *= s; a21 *= s; a22 *= s;
    return *this;
  }
  constexpr bool operator==(const Mat2&) const = default;
};

constexpr Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
constexpr Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
constexpr Mat2 operator-(const Mat2& a) { return {-a.a11, -a.a12, -a.a21, -a.a22}; }
constexpr Mat2 operator*(double s, Mat2 a) { return a *= s; }
constexpr Mat2 operator*(Mat2 a, double s) { return a *= s; }
constexpr Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
          a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}
constexpr Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }

inline constexpr Mat2 kI = Mat2::identity();
inline constexpr Mat2 kB{0.0, 1.0, -1.0, 0.0};
inline constexpr Mat2 kJ{1.0, 0.0, 0.0, -1.0};

// [[q1, q2], [q2, -q1]]
constexpr Mat2 potential_matrix(double q1, double q2) { return {q1, q2, q2, -q1}; }

// Largest singular value.
double op_norm(const Mat2& m);
double max_abs(const Mat2& m);
inline bool is_finite(const Mat2& m) {
  return std::isfinite(m.a11) && std::isfinite(m.a12) && std::isfinite(m.a21) &&
         std::isfinite(m.a22);
}

// e^{-lambda x B}
Mat2 rotation(double lambda, double x);

Mat2 mat2_exp(const Mat2& m);

struct ExpWithDerivative {
  Mat2 value;
  Mat2 derivative;  // d/de exp(m + e*dm) at e = 0
};
ExpWithDerivative mat2_exp_derivative(const Mat2& m, const Mat2& dm);

}  // namespace dirac
