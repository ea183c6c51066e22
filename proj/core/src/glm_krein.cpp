#include "diracspec/glm_krein.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "diracspec/errors.hpp"

namespace dirac {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxCond = 1e12;

void put(Eigen::MatrixXd& m, int r, int c, const Mat2& v) {
  m(2 * r, 2 * c) = v.a11;
  m(2 * r, 2 * c + 1) = v.a12;
  m(2 * r + 1, 2 * c) = v.a21;
  m(2 * r + 1, 2 * c + 1) = v.a22;
}

Mat2 get(const Eigen::MatrixXd& m, int r, int c) {
  return {m(2 * r, 2 * c), m(2 * r, 2 * c + 1), m(2 * r + 1, 2 * c), m(2 * r + 1, 2 * c + 1)};
}

Mat2 inverse(const Mat2& m) {
  const double d = m.det();
  return {m.a22 / d, -m.a12 / d, -m.a21 / d, m.a11 / d};
}

bool positive_definite(const Mat2& m) {
  const double off = 0.5 * (m.a12 + m.a21);
  return m.a11 > 0.0 && m.a11 * m.a22 - off * off > 0.0;
}

void check_grid(const Grid& grid, int cells, const char* who) {
  if (!grid.is_uniform() || grid.cells() != cells)
    throw Error("glm_krein", "InvalidGrid",
                std::string(who) + " needs a uniform grid with the same cell count as H");
}

// Block LDL^T of the symmetric block matrix S given block-wise. Stops at the
// first non-positive pivot when `stop_on_failure`.
struct BlockLdl {
  int n = 0;
  std::vector<Mat2> L;  // n x n, lower, unit diagonal
  std::vector<Mat2> D;
  int first_failure = -1;

  const Mat2& l(int i, int j) const { return L[static_cast<std::size_t>(i) * n + j]; }
  Mat2& l(int i, int j) { return L[static_cast<std::size_t>(i) * n + j]; }
};

template <class BlockFn>
BlockLdl block_ldl(int n, BlockFn S, bool stop_on_failure) {
  BlockLdl f;
  f.n = n;
  f.L.assign(static_cast<std::size_t>(n) * n, Mat2::zero());
  f.D.assign(static_cast<std::size_t>(n), Mat2::zero());
  std::vector<Mat2> w(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    // w_j = D_j L_kj^T
    for (int j = 0; j < k; ++j) w[static_cast<std::size_t>(j)] = f.D[static_cast<std::size_t>(j)] * f.l(k, j).transpose();
    Mat2 d = S(k, k);
    for (int j = 0; j < k; ++j) d -= f.l(k, j) * w[static_cast<std::size_t>(j)];
    d.a12 = d.a21 = 0.5 * (d.a12 + d.a21);
    f.D[static_cast<std::size_t>(k)] = d;
    f.l(k, k) = kI;
    if (!positive_definite(d) && f.first_failure < 0) {
      f.first_failure = k;
      if (stop_on_failure) return f;
    }
    const Mat2 dinv = inverse(d);
    for (int i = k + 1; i < n; ++i) {
      Mat2 t = S(i, k);
      for (int j = 0; j < k; ++j) t -= f.l(i, j) * w[static_cast<std::size_t>(j)];
      f.l(i, k) = t * dinv;
    }
  }
  return f;
}

}  // namespace

// ---------------------------------------------------------------- H and F

Summation summation_policy(double p, std::optional<bool> cesaro) {
  if (cesaro.has_value()) return *cesaro ? Summation::fejer : Summation::raw;
  return p == 1.0 ? Summation::fejer : Summation::raw;
}

ToeplitzSlice::ToeplitzSlice(int cells, Summation summation, int cesaro_order)
    : M_(cells), summation_(summation), cesaro_order_(cesaro_order) {
  if (cells < 1) throw Error("glm_krein", "InvalidGrid", "H needs at least one cell");
  a_.assign(static_cast<std::size_t>(8 * cells + 1), 0.0);
  b_.assign(static_cast<std::size_t>(8 * cells + 1), 0.0);
}

ToeplitzSlice build_H(const NormingData& data, int cells, Summation summation, const Executor& ex) {
  if (cells < 16) throw Error("glm_krein", "InvalidArgument", "M must be at least 16");
  const IndexedSeq& lam = data.lambda;
  const IndexedSeq& alpha = data.alpha;
  if (lam.n_min != alpha.n_min || lam.n_max != alpha.n_max)
    throw Error("glm_krein", "InvalidArgument", "lambda and alpha must share an index range");
  if (!lam.symmetric())
    throw Error("glm_krein", "AsymmetricRange",
                "reconstruction needs a symmetric index range [-N, N]");
  for (int n = alpha.n_min; n <= alpha.n_max; ++n) {
    if (!(alpha[n] > 0.0)) throw Error("glm_krein", "NonPositiveAlpha", "alpha must be positive", n);
  }
  const int N = lam.n_max;
  const std::size_t terms = lam.size();
  std::vector<double> w(terms);
  std::vector<double> two_lam(terms);
  std::vector<double> free_freq(terms);
  for (int n = -N; n <= N; ++n) {
    const auto k = static_cast<std::size_t>(n + N);
    w[k] = summation == Summation::fejer ? 1.0 - std::abs(n) / static_cast<double>(N + 1) : 1.0;
    two_lam[k] = 2.0 * lam[n];
    free_freq[k] = kPi * (2 * n + 1);
  }
  ToeplitzSlice H(cells, summation, summation == Summation::fejer ? N : 0);
  const int L = 4 * cells;
  ex.for_each(static_cast<std::size_t>(2 * L + 1), [&](std::size_t idx) {
    const int m = static_cast<int>(idx) - L;
    const double s = m / static_cast<double>(L);
    std::vector<double> ta(terms);
    std::vector<double> tb(terms);
    for (std::size_t k = 0; k < terms; ++k) {
      const double al = alpha.v[k];
      const double u = two_lam[k] * s;
      const double v = free_freq[k] * s;
      ta[k] = w[k] * (al * std::cos(u) - std::cos(v));
      tb[k] = -w[k] * (al * std::sin(u) - std::sin(v));
    }
    H.set(m, pairwise_sum(ta), pairwise_sum(tb));
  });
  return H;
}

FKernel build_F(const ToeplitzSlice& H, const Grid& grid) {
  check_grid(grid, H.cells(), "build_F");
  return FKernel(H);
}

// ---------------------------------------------------------------- positivity

PositivityReport check_positivity(const FKernel& F) {
  const int M = F.cells();
  const double h = F.step();
  auto block = [&](int k, int j) {
    Mat2 v = h * F.at_half(2 * k + 1, 2 * j + 1);
    if (k == j) v += kI;
    return v;
  };
  Eigen::MatrixXd S(2 * M, 2 * M);
  for (int k = 0; k < M; ++k)
    for (int j = 0; j < M; ++j) put(S, k, j, block(k, j));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  PositivityReport rep;
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  const BlockLdl f = block_ldl(M, block, true);
  rep.first_failing_block = f.first_failure;
  rep.pass = rep.min_eigenvalue > 0.0 && f.first_failure < 0;
  return rep;
}

void require_positive(const PositivityReport& rep) {
  if (rep.pass) return;
  const long idx = rep.first_failing_block;
  throw Error("glm_krein", "NotPositive",
              "I + F is not positive: min eigenvalue " + std::to_string(rep.min_eigenvalue) +
                  (idx >= 0 ? ", first failing principal block " + std::to_string(idx) : ""),
              idx >= 0 ? idx : Error::kNoIndex);
}

// ---------------------------------------------------------------- Krein

Mat2 KreinSolution::interpolant(int i, int m) const {
  const double h = H.step();
  Mat2 r = -H.at(4 * i - m);
  const Mat2* row = R_tilde.row(i);
  for (int k = 0; k < i; ++k) r -= h * (row[k] * H.at(4 * k + 2 - m));
  return r;
}

namespace {

void krein_dense_row(const ToeplitzSlice& H, int i, Mat2* out, double& rcond) {
  const double h = H.step();
  Eigen::MatrixXd S(2 * i, 2 * i);
  Eigen::MatrixXd Y(2 * i, 2);
  for (int j = 0; j < i; ++j) {
    for (int k = 0; k < i; ++k) {
      Mat2 v = h * H.at(4 * (j - k));
      if (j == k) v += kI;
      put(S, j, k, v);
    }
    const Mat2 rhs = -H.at(4 * i - (4 * j + 2)).transpose();
    Y(2 * j, 0) = rhs.a11;
    Y(2 * j, 1) = rhs.a12;
    Y(2 * j + 1, 0) = rhs.a21;
    Y(2 * j + 1, 1) = rhs.a22;
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(S);
  rcond = lu.rcond();
  const Eigen::MatrixXd X = lu.solve(Y);
  for (int k = 0; k < i; ++k) out[k] = get(X, k, 0).transpose();
}

// Block Levinson on the reversed systems, whose right-hand sides
// -H((j+1/2)h)^T are nested in the size.
void krein_levinson(const ToeplitzSlice& H, TriKernel& R) {
  const int M = H.cells();
  const double h = H.step();
  auto tau = [&](int d) {
    Mat2 v = h * H.at(-4 * d);
    if (d == 0) v += kI;
    return v;
  };
  auto y = [&](int j) { return -H.at(4 * j + 2).transpose(); };
  const Mat2 t0inv = inverse(tau(0));
  std::vector<Mat2> f{t0inv};
  std::vector<Mat2> b{t0inv};
  std::vector<Mat2> x{t0inv * y(0)};
  R.at(1, 0) = x[0].transpose();
  for (int n = 1; n < M; ++n) {
    Mat2 ef = Mat2::zero();
    Mat2 eb = Mat2::zero();
    Mat2 e = Mat2::zero();
    for (int j = 0; j < n; ++j) {
      const auto k = static_cast<std::size_t>(j);
      ef += tau(n - j) * f[k];
      eb += tau(-1 - j) * b[k];
      e += tau(n - j) * x[k];
    }
    const Mat2 X = inverse(kI - eb * ef);
    const Mat2 W = inverse(kI - ef * eb);
    const Mat2 fy = -(ef * X);
    const Mat2 bz = -(eb * W);
    std::vector<Mat2> fn(static_cast<std::size_t>(n) + 1);
    std::vector<Mat2> bn(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
      const auto k = static_cast<std::size_t>(j);
      const Mat2 fj = j < n ? f[k] : Mat2::zero();
      const Mat2 bj = j > 0 ? b[k - 1] : Mat2::zero();
      fn[k] = fj * X + bj * fy;
      bn[k] = fj * bz + bj * W;
    }
    f.swap(fn);
    b.swap(bn);
    const Mat2 delta = y(n) - e;
    x.push_back(Mat2::zero());
    for (int j = 0; j <= n; ++j) x[static_cast<std::size_t>(j)] += b[static_cast<std::size_t>(j)] * delta;
    // row i = n + 1; unknown k sits at reversed position i - 1 - k
    const int i = n + 1;
    for (int k = 0; k < i; ++k) R.at(i, k) = x[static_cast<std::size_t>(i - 1 - k)].transpose();
  }
}

double krein_row_residual(const ToeplitzSlice& H, const TriKernel& R, int i) {
  const double h = H.step();
  const Mat2* r = R.row(i);
  double worst = 0.0;
  for (int j = 0; j < i; ++j) {
    Mat2 res = r[j] + H.at(4 * i - (4 * j + 2));
    for (int k = 0; k < i; ++k) res += h * (r[k] * H.at(4 * (k - j)));
    worst = std::max(worst, max_abs(res));
  }
  return worst;
}

}  // namespace

KreinSolution solve_krein(const ToeplitzSlice& H, const Grid& grid, const KreinOptions& opt,
                          const Executor& ex) {
  const int M = H.cells();
  check_grid(grid, M, "solve_krein");
  KreinSolution sol;
  sol.H = H;
  sol.R_tilde = TriKernel(M, TLayout::midpoints);
  std::vector<double> rc(static_cast<std::size_t>(M) + 1, 1.0);
  if (opt.method == KreinMethod::dense) {
    ex.for_each(static_cast<std::size_t>(M), [&](std::size_t k) {
      const int i = static_cast<int>(k) + 1;
      krein_dense_row(H, i, sol.R_tilde.row(i), rc[static_cast<std::size_t>(i)]);
    });
    for (int i = 1; i <= M; ++i) {
      if (rc[static_cast<std::size_t>(i)] < 1.0 / kMaxCond)
        throw Error("glm_krein", "SingularSystem",
                    "Krein system at row " + std::to_string(i) + " is numerically singular", i);
    }
    sol.min_rcond = *std::min_element(rc.begin(), rc.end());
  } else {
    krein_levinson(H, sol.R_tilde);
  }
  std::vector<double> res(static_cast<std::size_t>(M) + 1, 0.0);
  ex.for_each(static_cast<std::size_t>(M), [&](std::size_t k) {
    const int i = static_cast<int>(k) + 1;
    res[static_cast<std::size_t>(i)] = krein_row_residual(H, sol.R_tilde, i);
  });
  sol.residual_norm = *std::max_element(res.begin(), res.end());
  if (!std::isfinite(sol.residual_norm))
    throw Error("glm_krein", "SingularSystem", "Krein solve produced non-finite values");

  sol.diag.resize(static_cast<std::size_t>(M) + 1);
  sol.diag[0] = -H.at(0);
  for (int i = 1; i <= M; ++i) {
    Mat2& d = sol.diag[static_cast<std::size_t>(i)];
    if (opt.diagonal == DiagonalRule::nystrom || i == 1) {
      d = opt.diagonal == DiagonalRule::nystrom ? sol.interpolant(i, 0) : sol.R_tilde.at(1, 0);
    } else {
      d = 1.5 * sol.R_tilde.at(i, 0) - 0.5 * sol.R_tilde.at(i, 1);
    }
  }
  return sol;
}

namespace {

// Catmull-Rom refinement of node values, clamped at the ends.
std::vector<double> refine_cubic(const std::vector<double>& v, int up) {
  const int M = static_cast<int>(v.size()) - 1;
  auto g = [&](int k) { return v[static_cast<std::size_t>(std::clamp(k, 0, M))]; };
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(M * up + 1));
  for (int i = 0; i < M; ++i) {
    const double p0 = g(i - 1), p1 = g(i), p2 = g(i + 1), p3 = g(i + 2);
    for (int u = 0; u < up; ++u) {
      const double t = static_cast<double>(u) / up;
      out.push_back(p1 + 0.5 * t * ((p2 - p0) + t * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                                                     t * (3.0 * (p1 - p2) + p3 - p0))));
    }
  }
  out.push_back(v.back());
  return out;
}

}  // namespace

RecoveredPotential recover_potential(const KreinSolution& sol, double p, int upsample) {
  if (upsample < 1) throw Error("glm_krein", "InvalidArgument", "upsample must be >= 1");
  const int M = sol.H.cells();
  std::vector<double> x(static_cast<std::size_t>(M) + 1);
  std::vector<double> q1(x.size());
  std::vector<double> q2(x.size());
  double asym = 0.0;
  for (int i = 0; i <= M; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const Mat2 Q = sol.diag[k] * kJ * kB;
    asym = std::max(asym, std::abs(Q.a12 - Q.a21) + std::abs(Q.a11 + Q.a22));
    x[k] = static_cast<double>(i) / M;
    q1[k] = 0.5 * (Q.a11 - Q.a22);
    q2[k] = 0.5 * (Q.a12 + Q.a21);
  }
  x.back() = 1.0;
  if (asym > 1e-3)
    throw Error("glm_krein", "StructureViolation",
                "recovered Q is not symmetric trace-free (defect " + std::to_string(asym) + ")");
  if (upsample > 1) {
    const int n = M * upsample;
    x.resize(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) x[static_cast<std::size_t>(k)] = static_cast<double>(k) / n;
    q1 = refine_cubic(q1, upsample);
    q2 = refine_cubic(q2, upsample);
  }
  return {Potential::sampled(std::move(x), std::move(q1), std::move(q2), p), asym};
}

// ---------------------------------------------------------------- GLM

TriKernel solve_glm(const FKernel& F, const Grid& grid, const Executor& ex) {
  const int M = F.cells();
  check_grid(grid, M, "solve_glm");
  const double h = F.step();
  TriKernel K(M, TLayout::midpoints);
  std::vector<double> rc(static_cast<std::size_t>(M) + 1, 1.0);
  ex.for_each(static_cast<std::size_t>(M), [&](std::size_t kk) {
    const int i = static_cast<int>(kk) + 1;
    Eigen::MatrixXd S(2 * i, 2 * i);
    Eigen::MatrixXd Y(2 * i, 2);
    for (int j = 0; j < i; ++j) {
      for (int k = 0; k < i; ++k) {
        Mat2 v = h * F.at_half(2 * j + 1, 2 * k + 1);
        if (j == k) v += kI;
        put(S, j, k, v);
      }
      const Mat2 rhs = -F.at_half(2 * i, 2 * j + 1).transpose();
      Y(2 * j, 0) = rhs.a11;
      Y(2 * j, 1) = rhs.a12;
      Y(2 * j + 1, 0) = rhs.a21;
      Y(2 * j + 1, 1) = rhs.a22;
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(S);
    rc[static_cast<std::size_t>(i)] = lu.rcond();
    const Eigen::MatrixXd X = lu.solve(Y);
    Mat2* row = K.row(i);
    for (int k = 0; k < i; ++k) row[k] = get(X, k, 0).transpose();
  });
  for (int i = 1; i <= M; ++i) {
    if (rc[static_cast<std::size_t>(i)] < 1.0 / kMaxCond)
      throw Error("glm_krein", "SingularSystem",
                  "GLM system at row " + std::to_string(i) + " is numerically singular", i);
  }
  return K;
}

TriKernel glm_on_nodes(const TriKernel& K_mid, const FKernel& F) {
  const int M = K_mid.cells();
  const double h = K_mid.step();
  TriKernel out(M, TLayout::nodes);
  for (int i = 0; i <= M; ++i) {
    const Mat2* row = K_mid.row(i);
    for (int j = 0; j <= i; ++j) {
      Mat2 v = -F.at_half(2 * i, 2 * j);
      for (int k = 0; k < i; ++k) v -= h * (row[k] * F.at_half(2 * k + 1, 2 * j));
      out.at(i, j) = v;
    }
  }
  return out;
}

TriKernel kernel_from_krein(const KreinSolution& sol, TLayout layout) {
  const int M = sol.H.cells();
  TriKernel out(M, layout);
  for (int i = 0; i <= M; ++i) {
    const int n = static_cast<int>(out.row_size(i));
    for (int j = 0; j < n; ++j) {
      const int tq = layout == TLayout::nodes ? 4 * j : 4 * j + 2;  // t in units of h/4
      const Mat2 plus = sol.interpolant(i, (4 * i + tq) / 2);
      const Mat2 minus = sol.interpolant(i, (4 * i - tq) / 2);
      out.at(i, j) = 0.5 * (plus + minus * kJ);
    }
  }
  return out;
}

GlmResidual glm_residual(const TriKernel& K_mid, const FKernel& F) {
  if (K_mid.layout() != TLayout::midpoints)
    throw Error("glm_krein", "InvalidArgument", "glm_residual expects a midpoint-layout kernel");
  const int M = K_mid.cells();
  const double h = K_mid.step();
  GlmResidual out;
  for (int i = 1; i <= M; ++i) {
    const Mat2* row = K_mid.row(i);
    double l1 = 0.0;
    for (int j = 0; j < i; ++j) {
      Mat2 res = row[j] + F.at_half(2 * i, 2 * j + 1);
      for (int k = 0; k < i; ++k) res += h * (row[k] * F.at_half(2 * k + 1, 2 * j + 1));
      l1 += h * op_norm(res);
      out.max_abs = std::max(out.max_abs, max_abs(res));
    }
    out.sup_l1 = std::max(out.sup_l1, l1);
  }
  return out;
}

// ---------------------------------------------------------------- factorization

Factorization discrete_factorization(const FKernel& F, const Grid& grid) {
  const int M = F.cells();
  check_grid(grid, M, "discrete_factorization");
  const double h = F.step();
  auto block = [&](int k, int j) {
    Mat2 v = h * F.at_half(2 * k + 1, 2 * j + 1);
    if (k == j) v += kI;
    return v;
  };
  const BlockLdl f = block_ldl(M, block, true);
  Factorization out;
  out.positivity = check_positivity(F);
  require_positive(out.positivity);
  out.D = f.D;
  for (const Mat2& d : f.D) out.identity_defect = std::max(out.identity_defect, max_abs(d - kI));

  out.K_plus = TriKernel(M, TLayout::midpoints);
  out.K_minus = TriKernel(M, TLayout::midpoints);
  std::vector<Mat2> dinv(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) dinv[static_cast<std::size_t>(k)] = inverse(f.D[static_cast<std::size_t>(k)]);
  std::vector<Mat2> Y(static_cast<std::size_t>(M));
  for (int i = 1; i <= M; ++i) {
    // K S_i = -f with S_i = L D L^T on the leading i blocks
    for (int j = 0; j < i; ++j) {
      Mat2 y = -F.at_half(2 * i, 2 * j + 1);
      for (int k = 0; k < j; ++k) y -= Y[static_cast<std::size_t>(k)] * f.l(j, k).transpose();
      Y[static_cast<std::size_t>(j)] = y;
    }
    Mat2* row = out.K_plus.row(i);
    for (int j = i - 1; j >= 0; --j) {
      Mat2 z = Y[static_cast<std::size_t>(j)] * dinv[static_cast<std::size_t>(j)];
      for (int k = j + 1; k < i; ++k) z -= row[k] * f.l(k, j);
      row[j] = z;
    }
    Mat2* adj = out.K_minus.row(i);
    for (int j = 0; j < i; ++j) adj[j] = row[j].transpose();
  }
  return out;
}

// ---------------------------------------------------------------- pipeline

Reconstruction reconstruct(const NormingData& data, const ReconstructionOptions& opt,
                           const Executor& ex) {
  Reconstruction out;
  out.H = build_H(data, opt.cells, summation_policy(data.p, opt.cesaro), ex);
  if (opt.check_positivity) {
    out.positivity = check_positivity(FKernel(out.H));
    require_positive(out.positivity);
  } else {
    out.positivity.pass = true;
    out.positivity.min_eigenvalue = std::nan("");
  }
  out.krein = solve_krein(out.H, Grid::uniform(opt.cells), opt.krein, ex);
  out.recovered = recover_potential(out.krein, data.p, opt.upsample);
  return out;
}

}  // namespace dirac
