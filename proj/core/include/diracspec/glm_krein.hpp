#pragma once

#include <optional>
#include <vector>

#include "diracspec/direct_spectra.hpp"
#include "diracspec/executor.hpp"
#include "diracspec/grid.hpp"
#include "diracspec/mat2.hpp"
#include "diracspec/potential.hpp"
#include "diracspec/transform_kernel.hpp"

namespace dirac {

enum class Summation { raw, fejer };

// Fejer means when p = 1, symmetric partial sums otherwise, unless forced.
Summation summation_policy(double p, std::optional<bool> cesaro = std::nullopt);

// H(s) = sum_n w_n [alpha_n e^{-2 lambda_n s B} - e^{-(2n+1) pi s B}] = a(s) I + b(s) B
// sampled on the lattice s = m h/4, m = -4M..4M, h = 1/M. The lattice holds the
// cell midpoints of [-1,1] and every half-argument the Nystrom schemes touch.
class ToeplitzSlice {
 public:
  ToeplitzSlice() = default;
  ToeplitzSlice(int cells, Summation summation, int cesaro_order);

  int cells() const { return M_; }
  double step() const { return 1.0 / M_; }
  double lattice_step() const { return 0.25 / M_; }
  Summation summation() const { return summation_; }
  int cesaro_order() const { return cesaro_order_; }

  // H(m h / 4)
  Mat2 at(int m) const {
    const auto k = static_cast<std::size_t>(m + 4 * M_);
    return Mat2::rot_algebra(a_[k], b_[k]);
  }
  double a(int m) const { return a_[static_cast<std::size_t>(m + 4 * M_)]; }
  double b(int m) const { return b_[static_cast<std::size_t>(m + 4 * M_)]; }
  void set(int m, double a, double b) {
    a_[static_cast<std::size_t>(m + 4 * M_)] = a;
    b_[static_cast<std::size_t>(m + 4 * M_)] = b;
  }
  // H at the midpoint of cell k of [-1,1], k = 0..2M-1.
  Mat2 cell_midpoint(int k) const { return at(4 * (k - M_) + 2); }

 private:
  int M_ = 0;
  Summation summation_ = Summation::raw;
  int cesaro_order_ = 0;
  std::vector<double> a_;
  std::vector<double> b_;
};

// Requires a symmetric index range; entries outside it are free and contribute 0.
ToeplitzSlice build_H(const NormingData& data, int cells, Summation summation,
                      const Executor& ex = Executor::serial());

// F(x,t) = [H((x-t)/2) + H((x+t)/2) J] / 2 read off the H lattice. Arguments are
// in half-steps: x = u h/2, t = v h/2, so grid nodes are even and cell
// midpoints odd.
class FKernel {
 public:
  FKernel(const ToeplitzSlice& H, double scale = 1.0) : H_(&H), scale_(scale) {}

  int cells() const { return H_->cells(); }
  double step() const { return H_->step(); }
  double scale() const { return scale_; }
  const ToeplitzSlice& H() const { return *H_; }

  Mat2 at_half(int u, int v) const {
    return (0.5 * scale_) * (H_->at(u - v) + H_->at(u + v) * kJ);
  }
  FKernel scaled(double s) const { return FKernel(*H_, scale_ * s); }

 private:
  const ToeplitzSlice* H_;
  double scale_;
};

FKernel build_F(const ToeplitzSlice& H, const Grid& grid);

struct PositivityReport {
  double min_eigenvalue = 0.0;
  bool pass = false;
  int first_failing_block = -1;  // first cell whose leading principal block is not positive
};

// Midpoint Nystrom matrix I + h F(t_k, t_j); smallest eigenvalue plus a block
// LDL^T pass over all leading principal blocks.
PositivityReport check_positivity(const FKernel& F);
// Throws NotPositive when the report fails.
void require_positive(const PositivityReport& rep);

enum class KreinMethod { dense, levinson };
enum class DiagonalRule { nystrom, extrapolate };

struct KreinOptions {
  KreinMethod method = KreinMethod::dense;
  DiagonalRule diagonal = DiagonalRule::nystrom;
};

// Midpoint Nystrom solution of
//   R~(x,t) + H(x-t) + int_0^x R~(x,s) H(s-t) ds = 0
// at x_i = i h with unknowns at t_k = (k+1/2) h, k < i.
struct KreinSolution {
  ToeplitzSlice H;
  TriKernel R_tilde;       // midpoint layout
  std::vector<Mat2> diag;  // R~(x_i, 0), i = 0..M
  double residual_norm = 0.0;
  double min_rcond = 1.0;

  // R~(x_i, m h/4) from the Nystrom interpolant.
  Mat2 interpolant(int i, int m) const;
};

KreinSolution solve_krein(const ToeplitzSlice& H, const Grid& grid, const KreinOptions& opt = {},
                          const Executor& ex = Executor::serial());

// Midpoint Nystrom solution of K(x,t) + F(x,t) + int_0^x K(x,s) F(s,t) ds = 0
// on node rows; returns the midpoint layout.
TriKernel solve_glm(const FKernel& F, const Grid& grid, const Executor& ex = Executor::serial());

// Nystrom interpolant of a midpoint GLM solution onto the node layout.
TriKernel glm_on_nodes(const TriKernel& K_mid, const FKernel& F);

// K(x,t) = [R~(x,(x+t)/2) + R~(x,(x-t)/2) J] / 2 with R~ from the Nystrom
// interpolant; layout selects where t is sampled.
TriKernel kernel_from_krein(const KreinSolution& sol, TLayout layout);

struct GlmResidual {
  double sup_l1 = 0.0;   // max_x h sum_t |residual(x,t)|
  double max_abs = 0.0;  // max_{x,t} |residual(x,t)|
};
// Residual of a midpoint-layout kernel in the discretised GLM equation.
GlmResidual glm_residual(const TriKernel& K_mid, const FKernel& F);

struct RecoveredPotential {
  Potential potential = Potential::zero();
  double asymmetry = 0.0;  // max over nodes of |Q12 - Q21| + |Q11 + Q22| before symmetrising
};

// Q(x_i) = R~(x_i, 0) J B, symmetrised; StructureViolation above 1e-3.
// With upsample > 1 the node values are refined by cubic (Catmull-Rom)
// interpolation onto `upsample` sub-nodes per cell; linear interpolation alone
// damps the top Fourier modes of the recovered potential, which shifts the
// upper eigenvalues.
RecoveredPotential recover_potential(const KreinSolution& sol, double p = 2.0, int upsample = 1);

struct Factorization {
  TriKernel K_plus;   // lower factor on node rows, midpoint columns
  TriKernel K_minus;  // K-(t,x) = K+(x,t)^T, stored with the same indexing
  std::vector<Mat2> D;       // block pivots of I + h F on cell midpoints
  double identity_defect = 0.0;  // max_k |D_k - I|
  PositivityReport positivity;
};

// Block LDL^T of the midpoint Nystrom matrix. K+ on node rows uses bordered
// triangular solves against the leading factors.
Factorization discrete_factorization(const FKernel& F, const Grid& grid);

struct ReconstructionOptions {
  int cells = 256;
  std::optional<bool> cesaro;  // empty: summation_policy(p)
  KreinOptions krein;
  bool check_positivity = true;
  int upsample = 4;
};

struct Reconstruction {
  ToeplitzSlice H;
  PositivityReport positivity;
  KreinSolution krein;
  RecoveredPotential recovered;
};

Reconstruction reconstruct(const NormingData& data, const ReconstructionOptions& opt = {},
                           const Executor& ex = Executor::serial());

}  // namespace dirac
