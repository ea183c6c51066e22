#include "diracspec/direct_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "diracspec/cauchy.hpp"
#include "diracspec/errors.hpp"
#include "diracspec/grid.hpp"

namespace dirac {

namespace {

constexpr double kPi = std::numbers::pi;

struct Root {
  double value;
  int index;
};

double center(Boundary b, int n) { return b == Boundary::A1 ? kPi * (n + 0.5) : kPi * n; }

double pick(Boundary b, const CharState& s) { return b == Boundary::A1 ? s.phi : s.psi; }
double pick_dot(Boundary b, const CharState& s) { return b == Boundary::A1 ? s.phi_dot : s.psi_dot; }

int index_of(Boundary b, double theta) {
  const double u = theta / kPi - (b == Boundary::A1 ? 0.5 : 0.0);
  return static_cast<int>(std::lround(u));
}

Root refine(const Potential& q, Boundary b, double lo, double hi, double flo, double tol) {
  for (int it = 0; it < 300 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = pick(b, char_state(q, mid, false));
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double mid = 0.5 * (lo + hi);
  const CharState st = char_state(q, mid, true);
  double root = mid;
  const double d = pick_dot(b, st);
  if (d != 0.0) {
    const double newton = mid - pick(b, st) / d;
    if (newton >= lo - tol && newton <= hi + tol) root = newton;
  }
  return {root, index_of(b, st.theta)};
}

std::vector<Root> scan_window(const Potential& q, Boundary b, double c, double half, int pts,
                              double tol) {
  std::vector<Root> out;
  std::vector<double> x(static_cast<std::size_t>(pts));
  std::vector<double> f(static_cast<std::size_t>(pts));
  for (int k = 0; k < pts; ++k) {
    x[static_cast<std::size_t>(k)] = c - half + 2.0 * half * k / (pts - 1);
    f[static_cast<std::size_t>(k)] = pick(b, char_state(q, x[static_cast<std::size_t>(k)], false));
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (f[k] == 0.0) {
      const CharState st = char_state(q, x[k], false);
      out.push_back({x[k], index_of(b, st.theta)});
      continue;
    }
    if (k + 1 < x.size() && f[k + 1] != 0.0 && (f[k] < 0.0) != (f[k + 1] < 0.0))
      out.push_back(refine(q, b, x[k], x[k + 1], f[k], tol));
  }
  return out;
}

}  // namespace

IndexedSeq find_eigenvalues(const Potential& q, Boundary boundary, int n_min, int n_max,
                            const Executor& ex, const EigenOptions& opt) {
  if (n_max < n_min) throw Error("direct_spectra", "InvalidArgument", "n_max must be >= n_min");
  const double w0 = 0.5 * kPi + std::min(0.5 * kPi, l1_norm(q));
  std::map<int, double> accepted;
  std::vector<int> pending;
  for (int n = n_min; n <= n_max; ++n) pending.push_back(n);

  for (int attempt = 0; attempt <= opt.widenings && !pending.empty(); ++attempt) {
    const int pts = opt.scan_points << attempt;
    const double half = w0 * (1 + attempt);
    std::vector<std::vector<Root>> found(pending.size());
    ex.for_each(pending.size(), [&](std::size_t k) {
      found[k] = scan_window(q, boundary, center(boundary, pending[k]), half, pts, opt.bisect_tol);
    });
    // de-duplication in a fixed order, independent of the thread count
    for (const auto& roots : found) {
      for (const Root& r : roots) {
        if (r.index < n_min || r.index > n_max) continue;
        const auto it = accepted.find(r.index);
        if (it == accepted.end()) {
          accepted.emplace(r.index, r.value);
        } else if (std::abs(it->second - r.value) > opt.duplicate_tol) {
          throw Error("direct_spectra", "DuplicateRoot",
                      "two distinct roots carry index " + std::to_string(r.index), r.index);
        }
      }
    }
    std::vector<int> still;
    for (int n : pending)
      if (!accepted.count(n)) still.push_back(n);
    pending.swap(still);
  }
  if (!pending.empty()) {
    throw Error("direct_spectra", "RootNotBracketed",
                "no root found for index " + std::to_string(pending.front()) +
                    " after widening the scan",
                pending.front());
  }
  IndexedSeq out(n_min, n_max);
  for (int n = n_min; n <= n_max; ++n) out[n] = accepted.at(n);
  return out;
}

SpectrumPair compute_spectra(const Potential& q, int n_min, int n_max, const Executor& ex,
                             const EigenOptions& opt) {
  SpectrumPair sp;
  sp.lambda = find_eigenvalues(q, Boundary::A1, n_min, n_max, ex, opt);
  sp.mu = find_eigenvalues(q, Boundary::A2, n_min, n_max, ex, opt);
  sp.p = q.p();
  return sp;
}

NormingData norming_quadrature(const Potential& q, const IndexedSeq& lambda, const Executor& ex) {
  NormingData out;
  out.lambda = lambda;
  out.alpha = IndexedSeq(lambda.n_min, lambda.n_max);
  out.p = q.p();
  ex.for_each(lambda.size(), [&](std::size_t k) {
    const double lam = lambda.v[k];
    // at least 512 cells and about 32 nodes per period of c; multiple of 64 so
    // dyadic breakpoints fall on Simpson pair boundaries
    const double want = std::max(512.0, 5.1 * std::abs(lam));
    const int cells = 64 * static_cast<int>(std::ceil(want / 64.0));
    const CauchySolution sol = propagate(q, lam, Grid::uniform(cells));
    std::vector<double> f(sol.U.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = sol.c1(i) * sol.c1(i) + sol.c2(i) * sol.c2(i);
    out.alpha.v[k] = 1.0 / trapezoid_richardson(f, 1.0 / cells);
  });
  return out;
}

int index_quartile(int n, int n_min, int n_max) {
  const double half = 0.5 * (n_max - n_min);
  if (half <= 0.0) return 0;
  const double d = std::abs(n - 0.5 * (n_min + n_max)) / half;
  const int qi = static_cast<int>(std::ceil(4.0 * d - 1e-12)) - 1;
  return std::clamp(qi, 0, 3);
}

ResidualReport asymptotic_residuals(const IndexedSeq& seq, ResidualKind kind) {
  ResidualReport rep;
  rep.r = IndexedSeq(seq.n_min, seq.n_max);
  std::vector<double> sq(seq.size());
  for (int n = seq.n_min; n <= seq.n_max; ++n) {
    double r = 0.0;
    switch (kind) {
      case ResidualKind::lambda: r = seq[n] - kPi * (n + 0.5); break;
      case ResidualKind::mu: r = seq[n] - kPi * n; break;
      case ResidualKind::alpha: r = seq[n] - 1.0; break;
    }
    rep.r[n] = r;
    sq[static_cast<std::size_t>(n - seq.n_min)] = r * r;
    const int qi = index_quartile(n, seq.n_min, seq.n_max);
    rep.quartile_max[static_cast<std::size_t>(qi)] =
        std::max(rep.quartile_max[static_cast<std::size_t>(qi)], std::abs(r));
  }
  rep.sum_sq = pairwise_sum(sq);
  rep.outer_max = rep.quartile_max[3];
  return rep;
}

}  // namespace dirac
