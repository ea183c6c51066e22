#pragma once

#include <optional>
#include <vector>

#include "diracspec/direct_spectra.hpp"
#include "diracspec/executor.hpp"

namespace dirac {

enum class ProductKind { phi, psi };

// phi(l) = cos l * prod_n (lambda_n - l) / (pi(n+1/2) - l)
// psi(l) = sin l * (l - mu_0)/l * prod'_n (mu_n - l) / (pi n - l)
// The product runs over |n| <= n_tail. Indices past the stored data use the
// model zero pi s + A/s, A fitted to the odd part of the outer quarter of the
// residuals (A = 0 when the data are too short to fit); the rest of the tail
// beyond n_tail contributes exp(2A / (pi n_tail)). The free zero nearest to l
// is paired with the cos (sin) prefactor through sin(d)/d, so the evaluation
// is finite for every real l.
class ProductEvaluator {
 public:
  ProductEvaluator(IndexedSeq zeros, ProductKind kind, int n_tail = 2048, bool fit_tail = true);

  double operator()(double l) const { return eval(l, std::nullopt); }
  // The product with the numerator of index `omit` removed.
  double eval(double l, std::optional<int> omit) const;
  // phi'(lambda_k); kind must be phi.
  double derivative_at_zero(int k) const;

  const IndexedSeq& zeros() const { return zeros_; }
  ProductKind kind() const { return kind_; }
  // stored zeros that enter the product
  int n_lo() const { return lo_; }
  int n_hi() const { return hi_; }
  double tail_coefficient() const { return tail_a_; }

 private:
  double zero(int n) const;
  double free_zero(int n) const;

  IndexedSeq zeros_;
  ProductKind kind_;
  int lo_;
  int hi_;
  int ext_lo_;
  int ext_hi_;
  double tail_a_ = 0.0;
  double remainder_ = 1.0;
};

double eval_phi(const IndexedSeq& zeros, double l);
double eval_psi(const IndexedSeq& mu, double l);
double phi_dot_at_zero(const IndexedSeq& zeros, int k);

// alpha_n = -1 / (phi'(lambda_n) psi(lambda_n)).
NormingData norming_from_two_spectra(const SpectrumPair& sp, int n_tail = 2048,
                                     const Executor& ex = Executor::serial());

struct SdReport {
  bool interlacing = true;
  std::vector<int> violations;  // indices n where lambda_{n-1} < mu_n < lambda_n fails
  ResidualReport lambda_res;
  ResidualReport mu_res;
  double threshold = 0.5;
  bool outer_ok = true;     // outer-quartile maxima below threshold
  bool monotone_ok = true;  // quartile maxima non-increasing outward, 10% slack
  bool pass = true;

  std::optional<int> first_violation() const {
    if (violations.empty()) return std::nullopt;
    return violations.front();
  }
};

SdReport validate_sd(const SpectrumPair& sp, double threshold = 0.5);

}  // namespace dirac
