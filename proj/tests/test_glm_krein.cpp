#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "diracspec/cauchy.hpp"
#include "diracspec/errors.hpp"
#include "diracspec/glm_krein.hpp"
#include "diracspec/spectral_products.hpp"

using namespace dirac;

namespace {

constexpr double kPi = std::numbers::pi;

NormingData free_data(int N) {
  NormingData d{IndexedSeq(-N, N), IndexedSeq(-N, N), 2.0};
  for (int n = -N; n <= N; ++n) {
    d.lambda[n] = kPi * (n + 0.5);
    d.alpha[n] = 1.0;
  }
  return d;
}

// q1 = c, q2 = 0: closed-form spectrum and alpha_n = 1 + c / lambda_n
NormingData constant_data(double c, int N) {
  NormingData d = free_data(N);
  for (int n = -N; n <= N; ++n) {
    const double s = n + 0.5;
    d.lambda[n] = (s > 0 ? 1.0 : -1.0) * std::sqrt(c * c + kPi * kPi * s * s);
    d.alpha[n] = 1.0 + c / d.lambda[n];
  }
  return d;
}

NormingData single_term(double alpha0, int N) {
  NormingData d = free_data(N);
  d.alpha[0] = alpha0;
  return d;
}

Potential step_q() { return Potential::piecewise({0.0, 0.5, 1.0}, {1.0, 0.0}, {0.5, 0.5}); }

NormingData direct_data(const Potential& q, int N) {
  return norming_quadrature(q, find_eigenvalues(q, Boundary::A1, -N, N));
}

// e^{-theta B} = cos theta I - sin theta B
Mat2 rot(double theta) { return Mat2{std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta)}; }

void put(Eigen::MatrixXd& A, int r, int c, const Mat2& m) {
  A(2 * r, 2 * c) = m.a11;
  A(2 * r, 2 * c + 1) = m.a12;
  A(2 * r + 1, 2 * c) = m.a21;
  A(2 * r + 1, 2 * c + 1) = m.a22;
}

double max_diff(const TriKernel& a, const TriKernel& b) {
  double d = 0.0;
  for (int i = 0; i <= a.cells(); ++i)
    for (std::size_t j = 0; j < a.row_size(i); ++j)
      d = std::max(d, max_abs(a.at(i, static_cast<int>(j)) - b.at(i, static_cast<int>(j))));
  return d;
}

// L1(-1,1) distance of two H slices on the same lattice (trapezoid in s).
double h_l1_distance(const ToeplitzSlice& a, const ToeplitzSlice& b) {
  const int L = 4 * a.cells();
  double sum = 0.0;
  for (int m = -L; m <= L; ++m) {
    const double w = (m == -L || m == L) ? 0.5 : 1.0;
    sum += w * std::hypot(a.a(m) - b.a(m), a.b(m) - b.b(m));
  }
  return sum * a.lattice_step();
}

}  // namespace

TEST(BuildH, FreeDataCancel) {
  const ToeplitzSlice H = build_H(free_data(32), 32, Summation::raw);
  for (int m = -128; m <= 128; ++m) {
    EXPECT_EQ(H.a(m), 0.0);
    EXPECT_EQ(H.b(m), 0.0);
  }
}

TEST(BuildH, SingleTermIsARotationProfile) {
  for (Summation s : {Summation::raw, Summation::fejer}) {
    const ToeplitzSlice H = build_H(single_term(1.2, 16), 32, s);
    for (int m = -128; m <= 128; ++m) {
      const double x = m / 128.0;
      EXPECT_LE(max_abs(H.at(m) - 0.2 * rot(kPi * x)), 1e-12) << m;
    }
  }
}

TEST(BuildH, StructureOnConstantData) {
  const ToeplitzSlice H = build_H(constant_data(1.0, 32), 64, Summation::fejer);
  for (int m = -256; m <= 256; ++m) {
    EXPECT_LE(max_abs(kB * H.at(m) - H.at(m) * kB), 1e-10);
    EXPECT_LE(max_abs(kJ * H.at(m) * kJ - H.at(-m)), 1e-10);
  }
}

TEST(BuildH, FejerMeansConverge) {
  const ToeplitzSlice h32 = build_H(constant_data(1.0, 32), 128, Summation::fejer);
  const ToeplitzSlice h64 = build_H(constant_data(1.0, 64), 128, Summation::fejer);
  const ToeplitzSlice h128 = build_H(constant_data(1.0, 128), 128, Summation::fejer);
  EXPECT_LT(h_l1_distance(h64, h128), h_l1_distance(h32, h64));
}

TEST(BuildH, Errors) {
  NormingData d = free_data(8);
  d.alpha[3] = -0.1;
  try {
    build_H(d, 32, Summation::raw);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.condition(), "NonPositiveAlpha");
    EXPECT_EQ(e.index(), 3);
  }
  NormingData a{IndexedSeq(-3, 5), IndexedSeq(-3, 5), 2.0};
  for (int n = -3; n <= 5; ++n) {
    a.lambda[n] = kPi * (n + 0.5);
    a.alpha[n] = 1.0;
  }
  try {
    build_H(a, 32, Summation::raw);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.condition(), "AsymmetricRange");
  }
}

TEST(SummationPolicy, Defaults) {
  EXPECT_EQ(summation_policy(1.0), Summation::fejer);
  EXPECT_EQ(summation_policy(2.0), Summation::raw);
  EXPECT_EQ(summation_policy(2.0, true), Summation::fejer);
  EXPECT_EQ(summation_policy(1.0, false), Summation::raw);
}

TEST(BuildF, SingleTermClosedForm) {
  const int M = 32;
  const ToeplitzSlice H = build_H(single_term(1.2, 16), M, Summation::raw);
  const FKernel F = build_F(H, Grid::uniform(M));
  const double h = 1.0 / M;
  for (int u = 0; u <= 2 * M; u += 3)
    for (int v = 0; v <= u; ++v) {
      const double x = 0.5 * u * h, t = 0.5 * v * h;
      const Mat2 want = 0.5 * (0.2 * rot(kPi * (x - t) / 2) + 0.2 * rot(kPi * (x + t) / 2) * kJ);
      EXPECT_LE(max_abs(F.at_half(u, v) - want), 1e-12);
    }
}

TEST(BuildF, ZeroAndSymmetric) {
  const ToeplitzSlice H0 = build_H(free_data(8), 32, Summation::raw);
  const FKernel F0 = build_F(H0, Grid::uniform(32));
  const ToeplitzSlice H = build_H(constant_data(1.0, 32), 32, Summation::raw);
  const FKernel F = build_F(H, Grid::uniform(32));
  for (int u = 0; u <= 64; ++u)
    for (int v = 0; v <= 64; ++v) {
      EXPECT_EQ(max_abs(F0.at_half(u, v)), 0.0);
      EXPECT_LE(max_abs(F.at_half(u, v) - F.at_half(v, u).transpose()), 1e-10);
    }
}

TEST(Positivity, ZeroKernelHasUnitSpectrum) {
  const ToeplitzSlice H = build_H(free_data(8), 16, Summation::raw);
  const PositivityReport r = check_positivity(build_F(H, Grid::uniform(16)));
  EXPECT_NEAR(r.min_eigenvalue, 1.0, 1e-14);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.first_failing_block, -1);
}

TEST(Positivity, MatchesIndependentEigenvalues) {
  const int M = 24;
  const ToeplitzSlice H = build_H(constant_data(1.0, 64), M, Summation::raw);
  const FKernel F = build_F(H, Grid::uniform(M));
  const PositivityReport r = check_positivity(F);
  ASSERT_TRUE(r.pass);
  EXPECT_GT(r.min_eigenvalue, 0.0);
  // I + h F(t_k, t_j) with F(x,t) = [H((x-t)/2) + H((x+t)/2)J]/2 on cell midpoints
  const double h = 1.0 / M;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2 * M, 2 * M);
  for (int k = 0; k < M; ++k)
    for (int j = 0; j < M; ++j) {
      const int x = 2 * k + 1, t = 2 * j + 1;  // half-steps
      const Mat2 f = 0.5 * (H.at(x - t) + H.at(x + t) * kJ);
      Mat2 blk = h * f;
      if (k == j) blk += kI;
      put(A, k, j, blk);
    }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
  EXPECT_NEAR(r.min_eigenvalue, es.eigenvalues().minCoeff(), 1e-12);
}

TEST(Positivity, ScaledKernelFailsWithLocatedBlock) {
  const int M = 32;
  const ToeplitzSlice H = build_H(direct_data(step_q(), 32), M, Summation::raw);
  const FKernel F = build_F(H, Grid::uniform(M));
  const PositivityReport ok = check_positivity(F);
  ASSERT_TRUE(ok.pass);
  const PositivityReport bad = check_positivity(F.scaled(-2.0 / ok.min_eigenvalue));
  EXPECT_FALSE(bad.pass);
  EXPECT_LT(bad.min_eigenvalue, 0.0);
  EXPECT_GE(bad.first_failing_block, 0);
  EXPECT_LT(bad.first_failing_block, M);
  try {
    require_positive(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.condition(), "NotPositive");
    EXPECT_EQ(e.index(), bad.first_failing_block);
  }
}

TEST(Positivity, MonotoneInPerturbationMass) {
  double prev = 1.0 + 1e-12;
  for (double eps : {0.0, 0.2, 0.4, 0.6, 0.8}) {
    const ToeplitzSlice H = build_H(single_term(1.0 - eps, 16), 32, Summation::raw);
    const PositivityReport r = check_positivity(build_F(H, Grid::uniform(32)));
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.min_eigenvalue, prev) << eps;
    prev = r.min_eigenvalue;
  }
}

TEST(Krein, ZeroDataGiveZeroSolution) {
  const ToeplitzSlice H = build_H(free_data(16), 32, Summation::raw);
  const KreinSolution s = solve_krein(H, Grid::uniform(32));
  EXPECT_EQ(s.R_tilde.max_abs(), 0.0);
  for (const Mat2& d : s.diag) EXPECT_EQ(max_abs(d), 0.0);
}

TEST(Krein, MatchesIndependentDenseSolve) {
  const int M = 24;
  const double h = 1.0 / M;
  for (const NormingData& d : {single_term(1.2, 16), constant_data(1.0, 32)}) {
    const ToeplitzSlice H = build_H(d, M, Summation::raw);
    const KreinSolution dense = solve_krein(H, Grid::uniform(M));
    const KreinSolution lev = solve_krein(H, Grid::uniform(M), {KreinMethod::levinson, DiagonalRule::nystrom});
    for (int i = 1; i <= M; ++i) {
      // sum_j R_j (delta_jk + h H(t_j - t_k)) = -H(x_i - t_k), k < i
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * i, 2 * i);
      Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(2, 2 * i);
      for (int j = 0; j < i; ++j)
        for (int k = 0; k < i; ++k) {
          Mat2 blk = h * H.at(4 * (j - k));
          if (j == k) blk += kI;
          put(A, j, k, blk);
        }
      for (int k = 0; k < i; ++k) {
        const Mat2 y = -1.0 * H.at(4 * i - 4 * k - 2);
        Y(0, 2 * k) = y.a11;
        Y(0, 2 * k + 1) = y.a12;
        Y(1, 2 * k) = y.a21;
        Y(1, 2 * k + 1) = y.a22;
      }
      const Eigen::MatrixXd X = A.transpose().fullPivLu().solve(Y.transpose()).transpose();
      for (int k = 0; k < i; ++k) {
        const Mat2 want{X(0, 2 * k), X(0, 2 * k + 1), X(1, 2 * k), X(1, 2 * k + 1)};
        EXPECT_LE(max_abs(dense.R_tilde.at(i, k) - want), 1e-12) << i << ' ' << k;
        EXPECT_LE(max_abs(lev.R_tilde.at(i, k) - want), 1e-10) << i << ' ' << k;
      }
    }
    EXPECT_LE(dense.residual_norm, 1e-12);
  }
}

TEST(Krein, ParallelRowsAreBitwiseEqual) {
  const ToeplitzSlice H = build_H(constant_data(1.0, 32), 48, Summation::raw);
  const KreinSolution a = solve_krein(H, Grid::uniform(48));
  const KreinSolution b = solve_krein(H, Grid::uniform(48), {}, Executor(4));
  EXPECT_EQ(max_diff(a.R_tilde, b.R_tilde), 0.0);
}

TEST(Krein, RejectsMismatchedGrid) {
  const ToeplitzSlice H = build_H(free_data(8), 32, Summation::raw);
  EXPECT_THROW(solve_krein(H, Grid::uniform(16)), Error);
  EXPECT_THROW(build_H(free_data(8), 8, Summation::raw), Error);
}

TEST(Glm, ZeroKernel) {
  const ToeplitzSlice H = build_H(free_data(8), 16, Summation::raw);
  const FKernel F = build_F(H, Grid::uniform(16));
  EXPECT_EQ(solve_glm(F, Grid::uniform(16)).max_abs(), 0.0);
  const Factorization f = discrete_factorization(F, Grid::uniform(16));
  EXPECT_EQ(f.K_plus.max_abs(), 0.0);
  EXPECT_EQ(f.K_minus.max_abs(), 0.0);
  EXPECT_EQ(f.identity_defect, 0.0);
}

TEST(Glm, KreinKernelSatisfiesGlm) {
  const int M = 256;
  for (const NormingData& d : {single_term(1.2, 16), constant_data(1.0, 64)}) {
    const ToeplitzSlice H = build_H(d, M, Summation::raw);
    const FKernel F = build_F(H, Grid::uniform(M));
    const KreinSolution s = solve_krein(H, Grid::uniform(M));
    const TriKernel k_mid = kernel_from_krein(s, TLayout::midpoints);
    const GlmResidual r = glm_residual(k_mid, F);
    EXPECT_LE(r.sup_l1, 1e-3);
    EXPECT_LE(max_diff(k_mid, solve_glm(F, Grid::uniform(M))), 1e-3);
  }
}

TEST(Glm, FactorizationMatchesGlmSolve) {
  const int M = 48;
  const ToeplitzSlice H = build_H(constant_data(1.0, 64), M, Summation::raw);
  const FKernel F = build_F(H, Grid::uniform(M));
  const TriKernel K = solve_glm(F, Grid::uniform(M));
  const Factorization f = discrete_factorization(F, Grid::uniform(M));
  EXPECT_LE(max_diff(f.K_plus, K), 1e-6);
  EXPECT_LE(glm_residual(K, F).max_abs, 1e-12);
  for (int i = 0; i <= M; ++i)
    for (std::size_t j = 0; j < f.K_plus.row_size(i); ++j)
      EXPECT_EQ(f.K_minus.at(i, static_cast<int>(j)), f.K_plus.at(i, static_cast<int>(j)).transpose());
  const Factorization g = discrete_factorization(F, Grid::uniform(M));
  EXPECT_EQ(max_diff(f.K_plus, g.K_plus), 0.0);
  EXPECT_TRUE(f.positivity.pass);
}

TEST(Glm, NodeKernelMatchesForwardKernel) {
  // constant data: the GLM kernel against the transmutation kernel of the true Q
  const int M = 128;
  const Potential q = Potential::constant(1.0, 0.0);
  const ToeplitzSlice H = build_H(constant_data(1.0, 128), M, Summation::raw);
  const FKernel F = build_F(H, Grid::uniform(M));
  const TriKernel K = glm_on_nodes(solve_glm(F, Grid::uniform(M)), F);
  const PSeries ps = build_P_series(q, 12, Grid::uniform(M));
  const TriKernel Kq = assemble_K(ps, q).K;
  // row L1 norms: the truncated data only see |n| <= 128
  double worst = 0.0;
  for (int i = 1; i <= M; ++i) {
    double row = 0.0;
    for (int j = 0; j <= i; ++j) row += max_abs(K.at(i, j) - Kq.at(i, j)) / M;
    worst = std::max(worst, row);
  }
  EXPECT_LE(worst, 2e-2);
}

TEST(Reconstruct, FreeDataGiveZeroPotential) {
  ReconstructionOptions opt;
  opt.cells = 64;
  const Reconstruction r = reconstruct(free_data(32), opt);
  EXPECT_LE(lp_norm(r.recovered.potential, 1.0), 1e-12);
  EXPECT_NEAR(r.positivity.min_eigenvalue, 1.0, 1e-12);
}

TEST(Reconstruct, ConstantPotentialRoundTrip) {
  ReconstructionOptions opt;
  opt.cells = 256;
  const Reconstruction r = reconstruct(constant_data(1.0, 64), opt);
  EXPECT_LE(l1_distance(r.recovered.potential, Potential::constant(1.0, 0.0)), 5e-2);
  EXPECT_TRUE(r.positivity.pass);
  EXPECT_LE(r.recovered.asymmetry, 1e-6);
}

TEST(Reconstruct, DiagonalRulesAgree) {
  ReconstructionOptions a;
  a.cells = 128;
  ReconstructionOptions b = a;
  b.krein.diagonal = DiagonalRule::extrapolate;
  const NormingData d = constant_data(1.0, 64);
  const Reconstruction ra = reconstruct(d, a);
  const Reconstruction rb = reconstruct(d, b);
  EXPECT_LE(l1_distance(ra.recovered.potential, rb.recovered.potential), 2e-2);
}

TEST(Reconstruct, OrthogonalityAndGreenFormula) {
  const Potential q = step_q();
  const NormingData d = direct_data(q, 64);
  // the Green defect is O(h^2) in the grid: 2.4e-4 at M = 256, 5.6e-5 at M = 512
  ReconstructionOptions opt;
  opt.cells = 512;
  const Reconstruction r = reconstruct(d, opt);
  const TriKernel K = kernel_from_krein(r.krein, TLayout::nodes);
  const int M = opt.cells;
  std::vector<std::vector<std::array<double, 2>>> c;
  for (int k = -8; k <= 8; ++k) c.push_back(apply_transform(K, d.lambda[k]));
  for (int k = -8; k <= 8; ++k)
    for (int l = -8; l <= 8; ++l) {
      const auto& ck = c[static_cast<std::size_t>(k + 8)];
      const auto& cl = c[static_cast<std::size_t>(l + 8)];
      std::vector<double> f(static_cast<std::size_t>(M) + 1);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = ck[i][0] * cl[i][0] + ck[i][1] * cl[i][1];
      const double ip = trapezoid(f, 1.0 / M);
      EXPECT_NEAR(ip, k == l ? 1.0 / d.alpha[k] : 0.0, 1e-3) << k << ' ' << l;
    }
  for (int k = -8; k <= 8; ++k)
    for (int n = -8; n <= 8; ++n) {
      const CharValues a = char_values(r.recovered.potential, d.lambda[k]);
      const CharValues b = char_values(r.recovered.potential, d.lambda[n]);
      EXPECT_LE(std::abs(a.psi * b.phi - a.phi * b.psi), 1e-4) << k << ' ' << n;
    }
}
