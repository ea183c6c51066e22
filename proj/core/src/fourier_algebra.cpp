#include "diracspec/fourier_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "diracspec/errors.hpp"

namespace dirac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e^{-2 pi i n k / s}, with the phase reduced exactly in integers
cplx twiddle(long n, long k, long s) {
  long r = (n * k) % s;
  if (r < 0) r += s;
  const double a = -kTwoPi * static_cast<double>(r) / static_cast<double>(s);
  return {std::cos(a), std::sin(a)};
}

// pairwise sum of complex terms
cplx csum(const cplx* v, std::size_t n) {
  if (n <= 8) {
    cplx s{};
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return csum(v, h) + csum(v + h, n - h);
}

}  // namespace

Samples Samples::from_real(const std::vector<double>& f, SampleLayout l) {
  std::vector<cplx> v(f.begin(), f.end());
  return Samples(std::move(v), l);
}

cplx fourier_coeff(const Samples& f, int n) {
  const auto s = static_cast<long>(f.size());
  if (s == 0) throw Error("fourier_algebra", "InvalidArgument", "no samples");
  if (s < 4L * std::abs(n))
    throw Error("fourier_algebra", "AliasRisk",
                "coefficient " + std::to_string(n) + " needs at least " + std::to_string(4L * std::abs(n)) +
                    " samples",
                n);
  std::vector<cplx> terms(static_cast<std::size_t>(s));
  for (long k = 0; k < s; ++k) terms[static_cast<std::size_t>(k)] = f.v[static_cast<std::size_t>(k)] * twiddle(n, k, s);
  cplx sum = csum(terms.data(), terms.size()) / static_cast<double>(s);
  if (f.layout == SampleLayout::cell && n != 0) {
    // exact integral of e^{-2 pi i n x} over a cell, relative to the left end
    const double w = kTwoPi * n / static_cast<double>(s);
    sum *= (1.0 - std::polar(1.0, -w)) / cplx(0.0, w);
  }
  return sum;
}

CoeffSeq fourier_coeffs(const Samples& f, int n_min, int n_max) {
  CoeffSeq out(n_min, n_max);
  for (int n = n_min; n <= n_max; ++n) out[n] = fourier_coeff(f, n);
  return out;
}

Samples circ_conv(const Samples& f, const Samples& g) {
  if (f.size() != g.size())
    throw Error("fourier_algebra", "InvalidArgument", "circ_conv needs equal sample counts");
  if (f.layout != SampleLayout::point || g.layout != SampleLayout::point)
    throw Error("fourier_algebra", "InvalidArgument", "circ_conv expects point samples");
  const std::size_t s = f.size();
  std::vector<cplx> out(s);
  std::vector<cplx> terms(s);
  for (std::size_t k = 0; k < s; ++k) {
    for (std::size_t j = 0; j < s; ++j) terms[j] = f.v[(k + s - j) % s] * g.v[j];
    out[k] = csum(terms.data(), s) / static_cast<double>(s);
  }
  return Samples(std::move(out), SampleLayout::point);
}

namespace {

std::vector<cplx> weighted_synthesis(const CoeffSeq& c, const std::vector<double>& x, bool fejer) {
  const int N = std::max(std::abs(c.n_min), std::abs(c.n_max));
  std::vector<cplx> out(x.size());
  std::vector<cplx> terms(c.c.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int n = c.n_min; n <= c.n_max; ++n) {
      const double w = fejer ? 1.0 - std::abs(n) / static_cast<double>(N + 1) : 1.0;
      const double xr = x[i] - std::floor(x[i]);
      terms[static_cast<std::size_t>(n - c.n_min)] = w * c[n] * std::polar(1.0, kTwoPi * n * xr);
    }
    out[i] = csum(terms.data(), terms.size());
  }
  return out;
}

}  // namespace

std::vector<cplx> synthesize(const CoeffSeq& c, const std::vector<double>& x) {
  return weighted_synthesis(c, x, false);
}

std::vector<cplx> fejer_sum(const CoeffSeq& c, const std::vector<double>& x) {
  return weighted_synthesis(c, x, true);
}

double lp_norm(const Samples& f, double p) {
  if (!(p >= 1.0)) throw Error("fourier_algebra", "InvalidArgument", "p must be >= 1");
  if (f.size() == 0) return 0.0;
  double s = 0.0;
  for (const cplx& z : f.v) s += std::pow(std::abs(z), p);
  return std::pow(s / static_cast<double>(f.size()), 1.0 / p);
}

WienerResult wiener_invert(const Samples& f) {
  if (f.layout != SampleLayout::point)
    throw Error("fourier_algebra", "InvalidArgument", "wiener_invert expects point samples");
  const int s = static_cast<int>(f.size());
  if (s < 4) throw Error("fourier_algebra", "InvalidArgument", "wiener_invert needs at least 4 samples");
  WienerResult out;
  out.n_check = s / 2 - 1;
  const int N = out.n_check;
  // Nyquist guard: coefficients up to s/2 - 1 are resolved but exceed the
  // 4|n| alias rule, so take them straight from the DFT here
  CoeffSeq ef(-N, N);
  std::vector<cplx> terms(static_cast<std::size_t>(s));
  for (int n = -N; n <= N; ++n) {
    for (int k = 0; k < s; ++k) terms[static_cast<std::size_t>(k)] = f.v[static_cast<std::size_t>(k)] * twiddle(n, k, s);
    ef[n] = csum(terms.data(), terms.size()) / static_cast<double>(s);
  }
  CoeffSeq eg(-N, N);
  for (int n = -N; n <= N; ++n) {
    const cplx sym = 1.0 + ef[n];
    if (std::abs(sym) < 1e-8)
      throw Error("fourier_algebra", "NearZeroSymbol",
                  "1 + e_n(f) vanishes at n = " + std::to_string(n), n);
    eg[n] = 1.0 / sym - 1.0;
  }
  std::vector<double> x(static_cast<std::size_t>(s));
  for (int k = 0; k < s; ++k) x[static_cast<std::size_t>(k)] = static_cast<double>(k) / s;
  out.g = Samples(synthesize(eg, x), SampleLayout::point);
  for (int n = -N; n <= N; ++n) {
    for (int k = 0; k < s; ++k) terms[static_cast<std::size_t>(k)] = out.g.v[static_cast<std::size_t>(k)] * twiddle(n, k, s);
    const cplx gn = csum(terms.data(), terms.size()) / static_cast<double>(s);
    out.residual = std::max(out.residual, std::abs((1.0 + ef[n]) * (1.0 + gn) - 1.0));
  }
  return out;
}

}  // namespace dirac
