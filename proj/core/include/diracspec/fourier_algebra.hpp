#pragma once

#include <complex>
#include <vector>

namespace dirac {

using cplx = std::complex<double>;

// Periodic samples of a function on [0,1). `point` holds f(k/n); `cell` holds
// the value of a function that is constant on [k/n, (k+1)/n), and its
// coefficients are integrated exactly.
enum class SampleLayout { point, cell };

struct Samples {
  std::vector<cplx> v;
  SampleLayout layout = SampleLayout::point;

  Samples() = default;
  Samples(std::vector<cplx> values, SampleLayout l = SampleLayout::point)
      : v(std::move(values)), layout(l) {}
  static Samples from_real(const std::vector<double>& f, SampleLayout l = SampleLayout::point);

  std::size_t size() const { return v.size(); }
  double x(std::size_t k) const {
    return (static_cast<double>(k) + (layout == SampleLayout::cell ? 0.5 : 0.0)) / static_cast<double>(v.size());
  }
};

struct CoeffSeq {
  int n_min = 0;
  int n_max = -1;
  std::vector<cplx> c;

  CoeffSeq() = default;
  CoeffSeq(int lo, int hi) : n_min(lo), n_max(hi), c(static_cast<std::size_t>(hi - lo + 1)) {}

  cplx& operator[](int n) { return c[static_cast<std::size_t>(n - n_min)]; }
  cplx operator[](int n) const { return c[static_cast<std::size_t>(n - n_min)]; }
  bool contains(int n) const { return n >= n_min && n <= n_max; }
};

// e_n(f) = int_0^1 f(x) e^{-2 pi i n x} dx. AliasRisk when size < 4|n|.
cplx fourier_coeff(const Samples& f, int n);
CoeffSeq fourier_coeffs(const Samples& f, int n_min, int n_max);

// (f*g)(x) = int_0^1 f(x-y) g(y) dy with periodic extension; point layout.
Samples circ_conv(const Samples& f, const Samples& g);

// sum_n c_n e^{2 pi i n x}
std::vector<cplx> synthesize(const CoeffSeq& c, const std::vector<double>& x);
// Fejer mean with weights 1 - |n|/(N+1), N the larger end of the range.
std::vector<cplx> fejer_sum(const CoeffSeq& c, const std::vector<double>& x);

// (mean |f_k|^p)^{1/p}
double lp_norm(const Samples& f, double p);

struct WienerResult {
  Samples g;
  int n_check = 0;
  double residual = 0.0;  // max_{|n| <= n_check} |(1 + e_n(f))(1 + e_n(g)) - 1|
};

// g with (1 + e_n(f))^{-1} = 1 + e_n(g) for |n| <= size/2 - 1, built by
// division in the coefficient domain and synthesis on the sample points.
// NearZeroSymbol(n) when |1 + e_n(f)| < 1e-8.
WienerResult wiener_invert(const Samples& f);

}  // namespace dirac
