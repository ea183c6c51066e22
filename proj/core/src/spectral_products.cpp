#include "diracspec/spectral_products.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "diracspec/errors.hpp"

namespace dirac {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double d) { return d == 0.0 ? 1.0 : std::sin(d) / d; }
double parity(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

ProductEvaluator::ProductEvaluator(IndexedSeq zeros, ProductKind kind, int n_tail, bool fit_tail)
    : zeros_(std::move(zeros)), kind_(kind) {
  if (n_tail < 0) throw Error("spectral_products", "InvalidArgument", "n_tail must be >= 0");
  const int shift = kind_ == ProductKind::phi ? 1 : 0;  // mirror of n is -n - shift
  lo_ = std::max(zeros_.n_min, -n_tail - shift);
  hi_ = std::min(zeros_.n_max, n_tail);
  ext_lo_ = lo_;
  ext_hi_ = hi_;
  if (zeros_.size() == 0 || hi_ < lo_)
    throw Error("spectral_products", "InvalidArgument", "no zeros inside the truncation range");
  for (int n = zeros_.n_min + 1; n <= zeros_.n_max; ++n) {
    if (!(zeros_[n] > zeros_[n - 1]))
      throw Error("spectral_products", "InvalidArgument", "zeros must strictly increase", n);
  }

  const int edge = std::min(hi_, -lo_ - shift);
  if (!fit_tail || edge < 8) return;
  double acc = 0.0;
  int count = 0;
  for (int n = edge - edge / 4; n <= edge; ++n) {
    const int m = -n - shift;
    const double odd = 0.5 * ((zeros_[n] - free_zero(n)) - (zeros_[m] - free_zero(m)));
    acc += free_zero(n) / kPi * odd;
    ++count;
  }
  tail_a_ = acc / count;
  ext_lo_ = -n_tail - shift;
  ext_hi_ = n_tail;
  const bool ordered = (hi_ == ext_hi_ || zero(hi_ + 1) > zeros_[hi_]) &&
                       (lo_ == ext_lo_ || zero(lo_ - 1) < zeros_[lo_]);
  if (!ordered) {
    tail_a_ = 0.0;
    ext_lo_ = lo_;
    ext_hi_ = hi_;
    return;
  }
  remainder_ = std::exp(2.0 * tail_a_ / (kPi * (n_tail + 0.5)));
}

double ProductEvaluator::free_zero(int n) const {
  return kind_ == ProductKind::phi ? kPi * (n + 0.5) : kPi * n;
}

double ProductEvaluator::zero(int n) const {
  if (n >= lo_ && n <= hi_) return zeros_[n];
  const double f = free_zero(n);
  return f == 0.0 ? f : f + tail_a_ * kPi / f;
}

double ProductEvaluator::eval(double l, std::optional<int> omit) const {
  const int om = omit.value_or(ext_hi_ + 1);
  double pref = remainder_;
  int paired = ext_hi_ + 1;  // index whose free denominator is absorbed in pref
  int skip = ext_hi_ + 1;    // index excluded from the product altogether
  if (kind_ == ProductKind::phi) {
    const int k = static_cast<int>(std::lround(l / kPi - 0.5));
    if (k >= ext_lo_ && k <= ext_hi_) {
      // cos l / (pi(k+1/2) - l) = (-1)^k sinc(l - pi(k+1/2))
      pref *= parity(k) * sinc(l - kPi * (k + 0.5));
      paired = k;
    } else {
      pref *= std::cos(l);
    }
  } else {
    const int k = static_cast<int>(std::lround(l / kPi));
    const bool has0 = lo_ <= 0 && 0 <= hi_;
    if (k == 0) {
      pref *= sinc(l);
    } else if (k >= ext_lo_ && k <= ext_hi_) {
      // sin l / (pi k - l) = -(-1)^k sinc(l - pi k)
      pref *= -parity(k) * sinc(l - kPi * k) / l;
      paired = k;
    } else {
      pref *= std::sin(l) / l;
    }
    // leading factor (l - mu_0), or l for a free mu_0 = 0
    if (!has0) {
      pref *= l;
    } else if (om != 0) {
      pref *= l - zeros_[0];
    }
    skip = 0;
  }
  double prod = pref;
  for (int n = ext_lo_; n <= ext_hi_; ++n) {
    if (n == skip) continue;
    const double num = n == om ? 1.0 : zero(n) - l;
    const double den = n == paired ? 1.0 : free_zero(n) - l;
    prod *= num / den;
  }
  return prod;
}

double ProductEvaluator::derivative_at_zero(int k) const {
  if (kind_ != ProductKind::phi)
    throw Error("spectral_products", "InvalidArgument", "derivative_at_zero is defined for phi");
  if (k < lo_ || k > hi_) throw Error("spectral_products", "InvalidArgument", "index out of range", k);
  return -eval(zeros_[k], k);
}

double eval_phi(const IndexedSeq& zeros, double l) {
  return ProductEvaluator(zeros, ProductKind::phi, std::max(-zeros.n_min, zeros.n_max))(l);
}

double eval_psi(const IndexedSeq& mu, double l) {
  return ProductEvaluator(mu, ProductKind::psi, std::max(-mu.n_min, mu.n_max))(l);
}

double phi_dot_at_zero(const IndexedSeq& zeros, int k) {
  return ProductEvaluator(zeros, ProductKind::phi, std::max(-zeros.n_min, zeros.n_max))
      .derivative_at_zero(k);
}

NormingData norming_from_two_spectra(const SpectrumPair& sp, int n_tail, const Executor& ex) {
  if (sp.lambda.n_min != sp.mu.n_min || sp.lambda.n_max != sp.mu.n_max)
    throw Error("spectral_products", "InvalidArgument", "lambda and mu must share an index range");
  const ProductEvaluator phi(sp.lambda, ProductKind::phi, n_tail);
  const ProductEvaluator psi(sp.mu, ProductKind::psi, n_tail);
  NormingData out;
  out.p = sp.p;
  out.lambda = IndexedSeq(phi.n_lo(), phi.n_hi());
  out.alpha = IndexedSeq(phi.n_lo(), phi.n_hi());
  ex.for_each(out.alpha.size(), [&](std::size_t k) {
    const int n = phi.n_lo() + static_cast<int>(k);
    const double l = sp.lambda[n];
    out.lambda.v[k] = l;
    out.alpha.v[k] = -1.0 / (phi.derivative_at_zero(n) * psi(l));
  });
  for (int n = out.alpha.n_min; n <= out.alpha.n_max; ++n) {
    if (!(out.alpha[n] > 0.0) || !std::isfinite(out.alpha[n]))
      throw Error("spectral_products", "NonPositiveAlpha",
                  "norming constant " + std::to_string(n) +
                      " is not positive; the enumeration or interlacing is corrupt",
                  n);
  }
  return out;
}

SdReport validate_sd(const SpectrumPair& sp, double threshold) {
  if (sp.lambda.n_min != sp.mu.n_min || sp.lambda.n_max != sp.mu.n_max)
    throw Error("spectral_products", "InvalidArgument", "lambda and mu must share an index range");
  SdReport rep;
  rep.threshold = threshold;
  for (int n = sp.lambda.n_min; n <= sp.lambda.n_max; ++n) {
    const bool left = n == sp.lambda.n_min || sp.lambda[n - 1] < sp.mu[n];
    const bool right = sp.mu[n] < sp.lambda[n];
    if (!(left && right)) rep.violations.push_back(n);
  }
  rep.interlacing = rep.violations.empty();
  rep.lambda_res = asymptotic_residuals(sp.lambda, ResidualKind::lambda);
  rep.mu_res = asymptotic_residuals(sp.mu, ResidualKind::mu);
  rep.outer_ok = rep.lambda_res.outer_max <= threshold && rep.mu_res.outer_max <= threshold;
  for (const ResidualReport* r : {&rep.lambda_res, &rep.mu_res}) {
    for (std::size_t q = 1; q < 4; ++q) {
      if (r->quartile_max[q] > 1.1 * r->quartile_max[q - 1] + 1e-12) rep.monotone_ok = false;
    }
  }
  rep.pass = rep.interlacing && rep.outer_ok && rep.monotone_ok;
  return rep;
}

}  // namespace dirac
