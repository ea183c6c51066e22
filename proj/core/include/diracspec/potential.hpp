#pragma once

#include <vector>

#include "diracspec/mat2.hpp"

namespace dirac {

enum class PotentialKind { piecewise, sampled };

// Q(x) = [[q1, q2], [q2, -q1]] on [0,1].
//
// piecewise: points are breakpoints 0 = b_0 < ... < b_K = 1, values are per
//   segment. At an interior breakpoint at() returns the mean of the two
//   one-sided limits.
// sampled: points are nodes 0 = x_0 < ... < x_K = 1, values per node, linear
//   interpolation in between.
class Potential {
 public:
  static Potential piecewise(std::vector<double> breakpoints, std::vector<double> q1,
                             std::vector<double> q2, double p = 2.0);
  static Potential sampled(std::vector<double> nodes, std::vector<double> q1,
                           std::vector<double> q2, double p = 2.0);
  static Potential constant(double q1, double q2, double p = 2.0);
  static Potential zero();
  // Rejects matrices that are not symmetric and trace-free.
  static Potential from_matrices(PotentialKind kind, std::vector<double> points,
                                 const std::vector<Mat2>& values, double p = 2.0);

  PotentialKind kind() const { return kind_; }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& q1() const { return q1_; }
  const std::vector<double>& q2() const { return q2_; }
  double p() const { return p_; }

  Mat2 at(double x) const;
  // Value on the open segment k (piecewise) or at node k (sampled).
  Mat2 value(std::size_t k) const { return potential_matrix(q1_[k], q2_[k]); }
  bool is_zero() const;

  Potential negated() const;
  Potential with_p(double p) const;

 private:
  Potential(PotentialKind kind, std::vector<double> points, std::vector<double> q1,
            std::vector<double> q2, double p);

  PotentialKind kind_;
  std::vector<double> points_;
  std::vector<double> q1_;
  std::vector<double> q2_;
  double p_;
};

// (int_0^1 |Q(t)|^p dt)^{1/p} with the operator norm |Q| = sqrt(q1^2 + q2^2).
double lp_norm(const Potential& q, double p);
inline double l1_norm(const Potential& q) { return lp_norm(q, 1.0); }
// int_0^1 |Q(t) - R(t)| dt
double l1_distance(const Potential& q, const Potential& r);

}  // namespace dirac
