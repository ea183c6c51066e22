#include "diracspec/potential.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "diracspec/errors.hpp"

namespace dirac {

namespace {

void check_points(const std::vector<double>& x, const char* what) {
  if (x.size() < 2) throw Error("core", "InvalidPotential", std::string(what) + ": need at least two points");
  if (x.front() != 0.0 || x.back() != 1.0)
    throw Error("core", "InvalidPotential", std::string(what) + ": domain must be exactly [0,1]");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1]))
      throw Error("core", "InvalidPotential", std::string(what) + " must strictly increase",
                  static_cast<long>(i));
  }
}

void check_values(const std::vector<double>& v, std::size_t n, const char* name) {
  if (v.size() != n)
    throw Error("core", "InvalidPotential",
                std::string(name) + " has " + std::to_string(v.size()) + " values, expected " +
                    std::to_string(n));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]))
      throw Error("core", "InvalidPotential", std::string(name) + " contains a non-finite value",
                  static_cast<long>(i));
  }
}

// 8-point Gauss-Legendre on [0,1].
constexpr std::array<double, 8> kGaussX = {0.019855071751231912, 0.10166676129318664,
                                           0.2372337950418355,   0.4082826787521751,
                                           0.5917173212478248,   0.7627662049581645,
                                           0.8983332387068134,   0.9801449282487681};
constexpr std::array<double, 8> kGaussW = {0.050614268145188344, 0.11119051722668717,
                                           0.15685332293894352,  0.18134189168918088,
                                           0.18134189168918088,  0.15685332293894352,
                                           0.11119051722668717,  0.050614268145188344};

// Values of (q1, q2) just inside (a, b), linear in between.
struct LinearPiece {
  double a, b;
  double q1a, q2a, q1b, q2b;
};

std::vector<double> merged_points(const Potential& q, const Potential& r) {
  std::vector<double> x = q.points();
  x.insert(x.end(), r.points().begin(), r.points().end());
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  return x;
}

void inside_values(const Potential& q, double a, double b, double& q1a, double& q2a,
                   double& q1b, double& q2b) {
  if (q.kind() == PotentialKind::piecewise) {
    const Mat2 m = q.at(0.5 * (a + b));
    q1a = q1b = m.a11;
    q2a = q2b = m.a12;
  } else {
    const Mat2 ma = q.at(a);
    const Mat2 mb = q.at(b);
    q1a = ma.a11;
    q2a = ma.a12;
    q1b = mb.a11;
    q2b = mb.a12;
  }
}

double integrate_piece_pow(const LinearPiece& s, double p) {
  const double len = s.b - s.a;
  if (s.q1a == s.q1b && s.q2a == s.q2b) {
    return len * std::pow(std::hypot(s.q1a, s.q2a), p);
  }
  double acc = 0.0;
  for (std::size_t g = 0; g < kGaussX.size(); ++g) {
    const double u = kGaussX[g];
    const double v1 = s.q1a + u * (s.q1b - s.q1a);
    const double v2 = s.q2a + u * (s.q2b - s.q2a);
    acc += kGaussW[g] * std::pow(std::hypot(v1, v2), p);
  }
  return len * acc;
}

}  // namespace

Potential::Potential(PotentialKind kind, std::vector<double> points, std::vector<double> q1,
                     std::vector<double> q2, double p)
    : kind_(kind), points_(std::move(points)), q1_(std::move(q1)), q2_(std::move(q2)), p_(p) {
  if (!(p_ >= 1.0)) throw Error("core", "InvalidPotential", "p exponent must be >= 1");
}

Potential Potential::piecewise(std::vector<double> breakpoints, std::vector<double> q1,
                               std::vector<double> q2, double p) {
  check_points(breakpoints, "breakpoints");
  check_values(q1, breakpoints.size() - 1, "q1");
  check_values(q2, breakpoints.size() - 1, "q2");
  return Potential(PotentialKind::piecewise, std::move(breakpoints), std::move(q1),
                   std::move(q2), p);
}

Potential Potential::sampled(std::vector<double> nodes, std::vector<double> q1,
                             std::vector<double> q2, double p) {
  check_points(nodes, "nodes");
  check_values(q1, nodes.size(), "q1");
  check_values(q2, nodes.size(), "q2");
  return Potential(PotentialKind::sampled, std::move(nodes), std::move(q1), std::move(q2), p);
}

Potential Potential::constant(double q1, double q2, double p) {
  return piecewise({0.0, 1.0}, {q1}, {q2}, p);
}

Potential Potential::zero() { return constant(0.0, 0.0); }

Potential Potential::from_matrices(PotentialKind kind, std::vector<double> points,
                                   const std::vector<Mat2>& values, double p) {
  std::vector<double> q1(values.size());
  std::vector<double> q2(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Mat2& m = values[i];
    const double scale = std::max(1.0, max_abs(m));
    if (std::abs(m.a12 - m.a21) > 1e-12 * scale)
      throw Error("core", "StructureViolation",
                  "matrix is not symmetric; expected [[q1,q2],[q2,-q1]]", static_cast<long>(i));
    if (std::abs(m.a11 + m.a22) > 1e-12 * scale)
      throw Error("core", "StructureViolation",
                  "matrix is not trace-free; expected [[q1,q2],[q2,-q1]]", static_cast<long>(i));
    q1[i] = m.a11;
    q2[i] = m.a12;
  }
  if (kind == PotentialKind::piecewise) return piecewise(std::move(points), std::move(q1), std::move(q2), p);
  return sampled(std::move(points), std::move(q1), std::move(q2), p);
}

Mat2 Potential::at(double x) const {
  const std::size_t n = points_.size();
  if (x <= 0.0) {
    return value(0);
  }
  if (x >= 1.0) {
    return value(kind_ == PotentialKind::piecewise ? n - 2 : n - 1);
  }
  const auto it = std::upper_bound(points_.begin(), points_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - points_.begin()) - 1;  // points_[k] <= x
  if (kind_ == PotentialKind::piecewise) {
    if (points_[k] == x && k > 0) return 0.5 * (value(k - 1) + value(k));
    return value(k);
  }
  const double t = (x - points_[k]) / (points_[k + 1] - points_[k]);
  return (1.0 - t) * value(k) + t * value(k + 1);
}

bool Potential::is_zero() const {
  for (std::size_t i = 0; i < q1_.size(); ++i) {
    if (q1_[i] != 0.0 || q2_[i] != 0.0) return false;
  }
  return true;
}

Potential Potential::negated() const {
  std::vector<double> a = q1_;
  std::vector<double> b = q2_;
  for (double& v : a) v = -v;
  for (double& v : b) v = -v;
  return Potential(kind_, points_, std::move(a), std::move(b), p_);
}

Potential Potential::with_p(double p) const { return Potential(kind_, points_, q1_, q2_, p); }

double lp_norm(const Potential& q, double p) {
  if (!(p >= 1.0)) throw Error("core", "InvalidArgument", "lp_norm requires p >= 1");
  const auto& x = q.points();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    LinearPiece s{x[k], x[k + 1], 0, 0, 0, 0};
    if (q.kind() == PotentialKind::piecewise) {
      s.q1a = s.q1b = q.q1()[k];
      s.q2a = s.q2b = q.q2()[k];
    } else {
      s.q1a = q.q1()[k];
      s.q2a = q.q2()[k];
      s.q1b = q.q1()[k + 1];
      s.q2b = q.q2()[k + 1];
    }
    acc += integrate_piece_pow(s, p);
  }
  return std::pow(acc, 1.0 / p);
}

double l1_distance(const Potential& q, const Potential& r) {
  const std::vector<double> x = merged_points(q, r);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    double a1, a2, b1, b2, c1, c2, d1, d2;
    inside_values(q, x[k], x[k + 1], a1, a2, b1, b2);
    inside_values(r, x[k], x[k + 1], c1, c2, d1, d2);
    LinearPiece s{x[k], x[k + 1], a1 - c1, a2 - c2, b1 - d1, b2 - d2};
    acc += integrate_piece_pow(s, 1.0);
  }
  return acc;
}

}  // namespace dirac
