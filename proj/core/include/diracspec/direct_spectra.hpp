#pragma once

#include <array>
#include <vector>

#include "diracspec/executor.hpp"
#include "diracspec/potential.hpp"

namespace dirac {

// Real sequence indexed n_min..n_max.
struct IndexedSeq {
  int n_min = 0;
  int n_max = -1;
  std::vector<double> v;

  IndexedSeq() = default;
  IndexedSeq(int lo, int hi) : n_min(lo), n_max(hi), v(static_cast<std::size_t>(hi - lo + 1), 0.0) {}
  IndexedSeq(int lo, std::vector<double> values)
      : n_min(lo), n_max(lo + static_cast<int>(values.size()) - 1), v(std::move(values)) {}

  std::size_t size() const { return v.size(); }
  bool contains(int n) const { return n >= n_min && n <= n_max; }
  double& operator[](int n) { return v[static_cast<std::size_t>(n - n_min)]; }
  double operator[](int n) const { return v[static_cast<std::size_t>(n - n_min)]; }
  bool symmetric() const { return n_min == -n_max; }
};

struct SpectrumPair {
  IndexedSeq lambda;  // zeros of phi (boundary u2(0) = u1(1) = 0)
  IndexedSeq mu;      // zeros of psi (boundary u2(0) = u2(1) = 0)
  double p = 2.0;
};

struct NormingData {
  IndexedSeq lambda;
  IndexedSeq alpha;
  double p = 2.0;
};

enum class Boundary { A1, A2 };

struct EigenOptions {
  int scan_points = 32;
  int widenings = 2;  // retries at 64 and 128 points with a wider window
  double bisect_tol = 1e-12;
  double duplicate_tol = 1e-9;
};

// Roots of phi (A1) or psi (A2) indexed so that lambda_n is near pi(n + 1/2)
// and mu_n near pi n. The index comes from the Pruefer angle of c(1, .), which
// makes the enumeration the sorted, interlacing one.
IndexedSeq find_eigenvalues(const Potential& q, Boundary boundary, int n_min, int n_max,
                            const Executor& ex = Executor::serial(), const EigenOptions& opt = {});

SpectrumPair compute_spectra(const Potential& q, int n_min, int n_max,
                             const Executor& ex = Executor::serial(), const EigenOptions& opt = {});

// alpha_n = 1 / int_0^1 |c(x, lambda_n)|^2 dx.
NormingData norming_quadrature(const Potential& q, const IndexedSeq& lambda,
                               const Executor& ex = Executor::serial());

enum class ResidualKind { lambda, mu, alpha };

struct ResidualReport {
  IndexedSeq r;
  double sum_sq = 0.0;
  // max |r_n| over the outer quarter of the index range on each side
  double outer_max = 0.0;
  // max |r_n| by distance from the range centre, innermost first
  std::array<double, 4> quartile_max{};
};

ResidualReport asymptotic_residuals(const IndexedSeq& seq, ResidualKind kind);

// Quartile of index n in its range: 0 innermost, 3 outermost.
int index_quartile(int n, int n_min, int n_max);

}  // namespace dirac
