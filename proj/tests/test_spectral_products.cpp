#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <utility>

#include "diracspec/cauchy.hpp"
#include "diracspec/errors.hpp"
#include "diracspec/spectral_products.hpp"

using namespace dirac;

namespace {

constexpr double kPi = std::numbers::pi;

SpectrumPair free_pair(int N) {
  SpectrumPair sp{IndexedSeq(-N, N), IndexedSeq(-N, N), 2.0};
  for (int n = -N; n <= N; ++n) {
    sp.lambda[n] = kPi * (n + 0.5);
    sp.mu[n] = kPi * n;
  }
  return sp;
}

SpectrumPair constant_pair(double c, int N) {
  SpectrumPair sp{IndexedSeq(-N, N), IndexedSeq(-N, N), 2.0};
  for (int n = -N; n <= N; ++n) {
    const double s = n + 0.5;
    sp.lambda[n] = (s > 0 ? 1.0 : -1.0) * std::sqrt(c * c + kPi * kPi * s * s);
    sp.mu[n] = n == 0 ? c : (n > 0 ? 1.0 : -1.0) * std::sqrt(c * c + kPi * kPi * n * n);
  }
  return sp;
}

Potential step_q() { return Potential::piecewise({0.0, 0.5, 1.0}, {1.0, 0.0}, {0.5, 0.5}); }

}  // namespace

TEST(Products, FreeZerosGiveCosAndSin) {
  const SpectrumPair sp = free_pair(40);
  for (double l : {-3.0, -1e-9, 0.0, 0.4, kPi / 2, kPi, 2.0 * kPi + 1e-8, 17.3}) {
    EXPECT_NEAR(eval_phi(sp.lambda, l), std::cos(l), 1e-13) << l;
    EXPECT_NEAR(eval_psi(sp.mu, l), std::sin(l), 1e-13) << l;
  }
}

TEST(Products, VanishAtTheirZeros) {
  const SpectrumPair sp = constant_pair(1.0, 64);
  for (int k : {-64, -5, 0, 3, 64}) {
    EXPECT_NEAR(eval_phi(sp.lambda, sp.lambda[k]), 0.0, 1e-10) << k;
    EXPECT_NEAR(eval_psi(sp.mu, sp.mu[k]), 0.0, 1e-10) << k;
  }
}

TEST(Products, ConstantPotentialMatchesPropagation) {
  const Potential c = Potential::constant(1.0, 0.0);
  const SpectrumPair sp = constant_pair(1.0, 2048);
  for (double l : {-4.1, 0.3, 2.5, 9.0}) {
    const CharValues v = char_values(c, l);
    EXPECT_NEAR(eval_phi(sp.lambda, l), v.phi, 1e-4) << l;
    EXPECT_NEAR(eval_psi(sp.mu, l), v.psi, 1e-4) << l;
  }
  EXPECT_NEAR(phi_dot_at_zero(sp.lambda, 3), phi_dot(c, sp.lambda[3]), 1e-4);
}

TEST(Products, TailModelHandlesShortData) {
  // only |n| <= 32 stored; the fitted tail supplies the rest
  const Potential c = Potential::constant(1.0, 0.0);
  const SpectrumPair sp = constant_pair(1.0, 32);
  const ProductEvaluator phi(sp.lambda, ProductKind::phi);
  EXPECT_NEAR(phi.tail_coefficient(), 1.0 / (2.0 * kPi), 1e-3);
  for (double l : {-4.1, 0.3, 2.5}) EXPECT_NEAR(phi(l), char_values(c, l).phi, 1e-5) << l;
  const ProductEvaluator raw(sp.lambda, ProductKind::phi, 2048, false);
  EXPECT_EQ(raw.tail_coefficient(), 0.0);
  EXPECT_GT(std::abs(raw(0.3) - char_values(c, 0.3).phi), 1e-3);
}

TEST(Products, TruncationConverges) {
  const Potential q = step_q();
  const SpectrumPair sp = compute_spectra(q, -128, 128);
  const double target = char_values(q, 1.7).phi;
  double prev = 1e300;
  for (int N : {16, 32, 64, 128}) {
    IndexedSeq z(-N - 1, N);
    for (int n = -N - 1; n <= N; ++n) z[n] = sp.lambda.contains(n) ? sp.lambda[n] : kPi * (n + 0.5);
    const double err = std::abs(ProductEvaluator(z, ProductKind::phi, N, false)(1.7) - target);
    EXPECT_LT(err, prev) << N;
    prev = err;
  }
}

TEST(PhiDot, FreeZeros) {
  const SpectrumPair sp = free_pair(20);
  EXPECT_NEAR(phi_dot_at_zero(sp.lambda, 0), -1.0, 1e-14);
  EXPECT_NEAR(phi_dot_at_zero(sp.lambda, -1), 1.0, 1e-14);
  EXPECT_THROW(phi_dot_at_zero(sp.lambda, 21), Error);
}

TEST(PhiDot, SignPattern) {
  // (-1)^n phi'(lambda_n) < 0 and (-1)^n psi(lambda_n) > 0; free case: -sin, sin at pi(n+1/2)
  const SpectrumPair sp = compute_spectra(step_q(), -24, 24);
  const ProductEvaluator phi(sp.lambda, ProductKind::phi);
  const ProductEvaluator psi(sp.mu, ProductKind::psi);
  for (int n = -24; n <= 24; ++n) {
    const double sg = n % 2 == 0 ? 1.0 : -1.0;
    EXPECT_LT(sg * phi.derivative_at_zero(n), 0.0) << n;
    EXPECT_GT(sg * psi(sp.lambda[n]), 0.0) << n;
  }
}

TEST(Norming, FreeSpectraGiveOne) {
  const NormingData nd = norming_from_two_spectra(free_pair(16));
  for (int n = -16; n <= 16; ++n) EXPECT_NEAR(nd.alpha[n], 1.0, 1e-13);
}

TEST(Norming, ConstantPotentialMatchesQuadrature) {
  const Potential c = Potential::constant(1.0, 0.0);
  const SpectrumPair sp = compute_spectra(c, -64, 64);
  const NormingData prod = norming_from_two_spectra(sp);
  const NormingData quad = norming_quadrature(c, sp.lambda);
  for (int n = -64; n <= 64; ++n) EXPECT_NEAR(prod.alpha[n] / quad.alpha[n], 1.0, 1e-4) << n;
}

TEST(Norming, StepPotentialMatchesQuadrature) {
  const Potential q = step_q();
  const SpectrumPair sp = compute_spectra(q, -64, 64);
  const NormingData prod = norming_from_two_spectra(sp);
  const NormingData quad = norming_quadrature(q, sp.lambda);
  for (int n = -64; n <= 64; ++n) EXPECT_NEAR(prod.alpha[n], quad.alpha[n], 2e-3) << n;
}

TEST(Norming, ShiftedFreeLambdaStaysPositive) {
  SpectrumPair sp = free_pair(64);
  sp.lambda[0] += 0.1;
  const NormingData nd = norming_from_two_spectra(sp);
  double edge = 0.0;
  for (int n = -64; n <= 64; ++n) {
    EXPECT_GT(nd.alpha[n], 0.0);
    if (std::abs(n) > 48) edge = std::max(edge, std::abs(nd.alpha[n] - 1.0));
  }
  EXPECT_LT(edge, std::abs(nd.alpha[0] - 1.0));
  EXPECT_LT(edge, 1e-3);
}

TEST(Norming, CorruptEnumerationIsReported) {
  SpectrumPair sp = free_pair(8);
  sp.mu[1] = sp.lambda[1] + 0.1;  // still increasing, but mu_1 > lambda_1
  try {
    norming_from_two_spectra(sp);
    FAIL() << "expected NonPositiveAlpha";
  } catch (const Error& e) {
    EXPECT_EQ(e.condition(), "NonPositiveAlpha");
    ASSERT_TRUE(e.has_index());
    EXPECT_EQ(e.index(), 1);
  }
}

TEST(Norming, MismatchedRangesAreRejected) {
  SpectrumPair sp = free_pair(4);
  sp.mu = IndexedSeq(-3, std::vector<double>{-3 * kPi, -2 * kPi, -kPi, 0.0, kPi, 2 * kPi, 3 * kPi});
  EXPECT_THROW(norming_from_two_spectra(sp), Error);
  EXPECT_THROW(ProductEvaluator(IndexedSeq(0, std::vector<double>{1.0, 0.5}), ProductKind::phi), Error);
}

TEST(ValidateSd, FreeSpectraPass) {
  const SdReport r = validate_sd(free_pair(16));
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(r.first_violation().has_value());
  EXPECT_LE(r.lambda_res.outer_max + r.mu_res.outer_max, 1e-15);
}

TEST(ValidateSd, SwappedMuFailsAtZeroAndOne) {
  SpectrumPair sp = free_pair(8);
  std::swap(sp.mu[0], sp.mu[1]);
  const SdReport r = validate_sd(sp);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.interlacing);
  ASSERT_EQ(r.violations.size(), 2u);
  EXPECT_EQ(r.violations[0], 0);
  EXPECT_EQ(r.violations[1], 1);
  EXPECT_EQ(r.first_violation().value(), 0);
}

TEST(ValidateSd, ConstantPotentialPasses) {
  const SdReport r = validate_sd(constant_pair(1.0, 64));
  EXPECT_TRUE(r.interlacing);
  EXPECT_TRUE(r.outer_ok);
  EXPECT_TRUE(r.monotone_ok);
  EXPECT_TRUE(r.pass);
}

TEST(ValidateSd, LargeOuterResidualsFail) {
  SpectrumPair sp = free_pair(8);
  sp.lambda[8] += 1.0;
  const SdReport r = validate_sd(sp, 0.5);
  EXPECT_TRUE(r.interlacing);
  EXPECT_FALSE(r.outer_ok);
  EXPECT_FALSE(r.pass);
}
