#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "diracspec/errors.hpp"
#include "diracspec/fourier_algebra.hpp"

using namespace dirac;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI1{0.0, 1.0};

Samples sample(int size, const auto& f) {
  std::vector<cplx> v(static_cast<std::size_t>(size));
  for (int k = 0; k < size; ++k) v[static_cast<std::size_t>(k)] = f(static_cast<double>(k) / size);
  return Samples(v);
}

Samples step_cells(int size) {
  std::vector<double> v(static_cast<std::size_t>(size), 0.0);
  for (int k = 0; k < size / 2; ++k) v[static_cast<std::size_t>(k)] = 1.0;
  return Samples::from_real(v, SampleLayout::cell);
}

cplx step_coeff(int n) {
  if (n == 0) return 0.5;
  return (1.0 - (n % 2 == 0 ? 1.0 : -1.0)) / (2.0 * kPi * kI1 * static_cast<double>(n));
}

// trig polynomial sum_{|n|<=8} c_n e^{2 pi i n x} with random coefficients
std::vector<cplx> random_coeffs(std::mt19937& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> c(17);
  for (auto& z : c) z = {g(rng), g(rng)};
  return c;
}

Samples trig(const std::vector<cplx>& c, int size) {
  return sample(size, [&](double x) {
    cplx s = 0.0;
    for (int n = -8; n <= 8; ++n) s += c[static_cast<std::size_t>(n + 8)] * std::exp(2.0 * kPi * kI1 * (n * x));
    return s;
  });
}

}  // namespace

TEST(FourierCoeff, Basics) {
  const Samples one = sample(32, [](double) { return cplx(1.0); });
  EXPECT_NEAR(std::abs(fourier_coeff(one, 0) - 1.0), 0.0, 1e-15);
  for (int n : {-5, 1, 7}) EXPECT_LE(std::abs(fourier_coeff(one, n)), 1e-15);
  const Samples e1 = sample(32, [](double x) { return std::exp(2.0 * kPi * kI1 * x); });
  EXPECT_LE(std::abs(fourier_coeff(e1, 1) - 1.0), 1e-14);
  EXPECT_LE(std::abs(fourier_coeff(e1, -1)), 1e-14);
  EXPECT_LE(std::abs(fourier_coeff(e1, 0)), 1e-14);
}

TEST(FourierCoeff, StepFunctionCellsAreExact) {
  const Samples f = step_cells(256);
  const CoeffSeq c = fourier_coeffs(f, -64, 64);
  for (int n = -64; n <= 64; ++n) EXPECT_LE(std::abs(c[n] - step_coeff(n)), 1e-8) << n;
}

TEST(FourierCoeff, AliasRisk) {
  try {
    fourier_coeff(Samples(std::vector<cplx>(16, 1.0)), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.condition(), "AliasRisk");
  }
  EXPECT_NO_THROW(fourier_coeff(Samples(std::vector<cplx>(16, 1.0)), 4));
}

TEST(Convolution, CoefficientHomomorphism) {
  std::mt19937 rng(17);
  for (int t = 0; t < 5; ++t) {
    const auto cf = random_coeffs(rng);
    const auto cg = random_coeffs(rng);
    const Samples f = trig(cf, 64), g = trig(cg, 64);
    const Samples fg = circ_conv(f, g);
    for (int n = -16; n <= 16; ++n) {
      const cplx want = std::abs(n) <= 8 ? cf[static_cast<std::size_t>(n + 8)] * cg[static_cast<std::size_t>(n + 8)] : 0.0;
      EXPECT_LE(std::abs(fourier_coeff(fg, n) - fourier_coeff(f, n) * fourier_coeff(g, n)), 1e-10);
      EXPECT_LE(std::abs(fourier_coeff(fg, n) - want), 1e-10);
    }
  }
}

TEST(Convolution, WithConstantKeepsOnlyTheMean) {
  const Samples f = sample(32, [](double x) { return cplx(std::sin(2 * kPi * x) + 0.25); });
  const Samples one = sample(32, [](double) { return cplx(1.0); });
  const Samples fg = circ_conv(f, one);
  for (std::size_t k = 0; k < fg.size(); ++k) EXPECT_LE(std::abs(fg.v[k] - 0.25), 1e-14);
}

TEST(Convolution, YoungInequality) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<cplx> a(48), b(48);
    for (auto& z : a) z = {u(rng), u(rng)};
    for (auto& z : b) z = {u(rng), 0.0};
    const Samples f(a), g(b);
    for (double p : {1.0, 2.0}) EXPECT_LE(lp_norm(circ_conv(f, g), p), lp_norm(f, p) * lp_norm(g, p) + 1e-15);
  }
}

TEST(Convolution, RejectsMismatchedSizes) {
  EXPECT_THROW(circ_conv(Samples(std::vector<cplx>(8)), Samples(std::vector<cplx>(9))), Error);
}

TEST(Fejer, ConstantIsReproduced) {
  CoeffSeq c(-10, 10);
  c[0] = 1.0;
  const std::vector<double> x{0.0, 0.3, 0.77};
  for (const cplx& v : fejer_sum(c, x)) EXPECT_LE(std::abs(v - 1.0), 1e-15);
  for (const cplx& v : synthesize(c, x)) EXPECT_LE(std::abs(v - 1.0), 1e-15);
}

TEST(Fejer, StepFunctionContractionAndConvergence) {
  const int G = 8192;  // midpoint rule for the L1 norms
  std::vector<double> x(G);
  for (int k = 0; k < G; ++k) x[static_cast<std::size_t>(k)] = (k + 0.5) / G;
  const CoeffSeq all = fourier_coeffs(step_cells(1024), -128, 128);
  double prev = 1e300;
  for (int N : {16, 32, 64, 128}) {
    CoeffSeq c(-N, N);
    for (int n = -N; n <= N; ++n) c[n] = all[n];
    const auto s = fejer_sum(c, x);
    double err = 0.0, norm = 0.0;
    for (int k = 0; k < G; ++k) {
      const double f = x[static_cast<std::size_t>(k)] < 0.5 ? 1.0 : 0.0;
      err += std::abs(s[static_cast<std::size_t>(k)] - f) / G;
      norm += std::abs(s[static_cast<std::size_t>(k)]) / G;
    }
    EXPECT_LT(err, prev) << N;
    EXPECT_LE(norm, 0.5 + 1e-12) << N;
    prev = err;
  }
}

TEST(Wiener, TrivialCases) {
  const WienerResult z = wiener_invert(Samples(std::vector<cplx>(32, 0.0)));
  for (const cplx& v : z.g.v) EXPECT_EQ(std::abs(v), 0.0);
  const WienerResult h = wiener_invert(Samples(std::vector<cplx>(32, 1.0)));
  for (const cplx& v : h.g.v) EXPECT_LE(std::abs(v + 0.5), 1e-15);
  try {
    wiener_invert(Samples(std::vector<cplx>(32, -1.0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.condition(), "NearZeroSymbol");
    EXPECT_EQ(e.index(), 0);
  }
}

TEST(Wiener, CosineIdentityResidual) {
  const Samples f = sample(256, [](double x) { return cplx(0.3 * std::cos(2 * kPi * x)); });
  const WienerResult r = wiener_invert(f);
  EXPECT_GE(r.n_check, 64);
  EXPECT_LE(r.residual, 1e-8);
  // independent division oracle: 1 + e_n(g) = 1 / (1 + e_n(f))
  const CoeffSeq cf = fourier_coeffs(f, -64, 64);
  const CoeffSeq cg = fourier_coeffs(r.g, -64, 64);
  for (int n = -64; n <= 64; ++n) EXPECT_LE(std::abs((1.0 + cf[n]) * (1.0 + cg[n]) - 1.0), 1e-8) << n;
}

TEST(Wiener, Involution) {
  std::mt19937 rng(9);
  for (int t = 0; t < 4; ++t) {
    auto c = random_coeffs(rng);
    for (auto& z : c) z *= 0.03;
    const Samples f = trig(c, 128);
    const Samples back = wiener_invert(wiener_invert(f).g).g;
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_LE(std::abs(back.v[k] - f.v[k]), 1e-7);
  }
}

TEST(Norms, DiscreteLp) {
  const Samples f(std::vector<cplx>{3.0, cplx(0.0, 4.0)});
  EXPECT_DOUBLE_EQ(lp_norm(f, 1.0), 3.5);
  EXPECT_DOUBLE_EQ(lp_norm(f, 2.0), std::sqrt(12.5));
}
