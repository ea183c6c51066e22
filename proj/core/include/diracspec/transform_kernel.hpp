#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "diracspec/executor.hpp"
#include "diracspec/grid.hpp"
#include "diracspec/mat2.hpp"
#include "diracspec/potential.hpp"

namespace dirac {

// Where the second variable is sampled on row x_i = i h of a uniform grid.
//   nodes:     t_j = j h,          j = 0..i
//   midpoints: t_j = (j + 1/2) h,  j = 0..i-1
enum class TLayout { nodes, midpoints };

// 2x2 kernel on the triangle 0 <= t <= x <= 1, zero above the diagonal.
class TriKernel {
 public:
  TriKernel() = default;
  TriKernel(int cells, TLayout layout);

  int cells() const { return cells_; }
  double step() const { return 1.0 / cells_; }
  TLayout layout() const { return layout_; }
  std::size_t row_size(int i) const {
    return layout_ == TLayout::nodes ? static_cast<std::size_t>(i) + 1 : static_cast<std::size_t>(i);
  }
  double t(int j) const { return layout_ == TLayout::nodes ? j * step() : (j + 0.5) * step(); }

  Mat2& at(int i, int j) { return data_[offset(i) + static_cast<std::size_t>(j)]; }
  const Mat2& at(int i, int j) const { return data_[offset(i) + static_cast<std::size_t>(j)]; }
  Mat2* row(int i) { return data_.data() + offset(i); }
  const Mat2* row(int i) const { return data_.data() + offset(i); }

  // Linear interpolation in t on row i, constant extension past the end samples.
  Mat2 interp(int i, double t) const;

  TriKernel& operator+=(const TriKernel& o);
  double max_abs() const;

 private:
  std::size_t offset(int i) const {
    const auto k = static_cast<std::size_t>(i);
    return layout_ == TLayout::nodes ? k * (k + 1) / 2 : (k == 0 ? 0 : k * (k - 1) / 2);
  }

  int cells_ = 0;
  TLayout layout_ = TLayout::nodes;
  std::vector<Mat2> data_;
};

// max( max_x ||K(x,.)||_{L_p}, max_t ||K(.,t)||_{L_p} ), trapezoid on node layout.
double gp_norm(const TriKernel& k, double p);
// max over grid rows of ||K(x,.)||_{L_p}
double max_row_lp(const TriKernel& k, double p);

struct PSeries {
  TriKernel P_plus;   // sum of even-order P_n
  TriKernel P_minus;  // sum of odd-order P_n
  int n_max = 0;
  std::vector<double> gp;       // G_p norm of each P_n, n = 1..n_max
  std::vector<double> row_max;  // max_x ||P_n(x,.)||_{L_p}
  double last_increment = 0.0;  // gp.back()
  double bound = 0.0;           // ||Q||_p^n / (n-1)! at n = n_max
  bool warning = false;         // last increment above 10x the bound
};

// P_1(x,s) = BQ(s), P_{n+1}(x,s) = int_s^x BQ(eta) P_n(eta, eta - s) deta.
PSeries build_P_series(const Potential& q, int n_max, const Grid& grid,
                       const Executor& ex = Executor::serial());

// Smallest n with ||Q||_{L1}^n / (n-1)! below tol, at least 1.
int auto_n_max(double q_l1, double tol);

struct KernelPair {
  TriKernel R;  // R = P+ + P- J
  TriKernel K;  // K(x,t) = [R(x,(x-t)/2) + R(x,(x+t)/2) J] / 2
};
KernelPair assemble_K(const TriKernel& P_plus, const TriKernel& P_minus);
// Same, but the first term BQ(s)J is evaluated exactly at the half steps and
// only the continuous remainder is interpolated. Preferred for piecewise Q.
KernelPair assemble_K(const PSeries& ps, const Potential& q);

// c(x) = c0(x) + int_0^x K(x,t) c0(t) dt, c0 = (cos lambda x, sin lambda x).
std::vector<std::array<double, 2>> apply_transform(const TriKernel& K, double lambda);

// c0 at the nodes of a uniform grid.
std::vector<std::array<double, 2>> free_solution(int cells, double lambda);

void write_kernel_csv(std::ostream& os, const TriKernel& k);

}  // namespace dirac
