#include "diracspec/transform_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "diracspec/errors.hpp"

namespace dirac {

TriKernel::TriKernel(int cells, TLayout layout) : cells_(cells), layout_(layout) {
  if (cells < 1) throw Error("transform_kernel", "InvalidGrid", "kernel needs at least one cell");
  const auto m = static_cast<std::size_t>(cells);
  const std::size_t n = layout == TLayout::nodes ? (m + 1) * (m + 2) / 2 : (m + 1) * m / 2;
  data_.assign(n, Mat2::zero());
}

Mat2 TriKernel::interp(int i, double t) const {
  const std::size_t n = row_size(i);
  if (n == 0) return Mat2::zero();
  const double h = step();
  const double u = layout_ == TLayout::nodes ? t / h : t / h - 0.5;
  if (u <= 0.0) return at(i, 0);
  if (u >= static_cast<double>(n - 1)) return at(i, static_cast<int>(n - 1));
  const int j = static_cast<int>(std::floor(u));
  const double w = u - j;
  return (1.0 - w) * at(i, j) + w * at(i, j + 1);
}

TriKernel& TriKernel::operator+=(const TriKernel& o) {
  if (o.cells_ != cells_ || o.layout_ != layout_)
    throw Error("transform_kernel", "InvalidArgument", "kernel shapes differ");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

double TriKernel::max_abs() const {
  double m = 0.0;
  for (const Mat2& v : data_) m = std::max(m, dirac::max_abs(v));
  return m;
}

namespace {

// Weight of sample j on row i when integrating over t in [0, x_i].
double row_weight(const TriKernel& k, int i, int j) {
  const double h = k.step();
  if (k.layout() == TLayout::midpoints) return h;
  if (i == 0) return 0.0;
  return (j == 0 || j == i) ? 0.5 * h : h;
}

double row_lp(const TriKernel& k, int i, double p) {
  double acc = 0.0;
  const std::size_t n = k.row_size(i);
  for (std::size_t j = 0; j < n; ++j) {
    const int jj = static_cast<int>(j);
    acc += row_weight(k, i, jj) * std::pow(op_norm(k.at(i, jj)), p);
  }
  return std::pow(acc, 1.0 / p);
}

double col_lp(const TriKernel& k, int j, double p) {
  const int first = k.layout() == TLayout::nodes ? j : j + 1;
  const int last = k.cells();
  if (last <= first) return 0.0;
  const double h = k.step();
  double acc = 0.0;
  for (int i = first; i <= last; ++i) {
    const double w = (i == first || i == last) ? 0.5 * h : h;
    acc += w * std::pow(op_norm(k.at(i, j)), p);
  }
  return std::pow(acc, 1.0 / p);
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

double max_row_lp(const TriKernel& k, double p) {
  double m = 0.0;
  for (int i = 0; i <= k.cells(); ++i) m = std::max(m, row_lp(k, i, p));
  return m;
}

double gp_norm(const TriKernel& k, double p) {
  if (!(p >= 1.0)) throw Error("transform_kernel", "InvalidArgument", "G_p norm requires p >= 1");
  double m = max_row_lp(k, p);
  const int cols = k.layout() == TLayout::nodes ? k.cells() + 1 : k.cells();
  for (int j = 0; j < cols; ++j) m = std::max(m, col_lp(k, j, p));
  return m;
}

int auto_n_max(double q_l1, double tol) {
  int n = 1;
  while (n < 200 && std::pow(q_l1, n) / factorial(n - 1) >= tol) ++n;
  return n;
}

PSeries build_P_series(const Potential& q, int n_max, const Grid& grid, const Executor& ex) {
  if (n_max < 1) throw Error("transform_kernel", "InvalidArgument", "n_max must be >= 1");
  if (!grid.is_uniform())
    throw Error("transform_kernel", "InvalidGrid", "the P recursion needs a uniform grid");
  const int M = grid.cells();
  const double h = grid.step();
  const double p = q.p();

  // Node values (breakpoint mean) are what P_1 stores; the panels of the
  // trapezoid use the one-sided limits from inside the panel instead, so a
  // jump sitting on a node costs O(h^2) rather than O(h).
  std::vector<Mat2> bq(static_cast<std::size_t>(M) + 1);
  std::vector<Mat2> bq_right(static_cast<std::size_t>(M) + 1);
  std::vector<Mat2> bq_left(static_cast<std::size_t>(M) + 1);
  for (int k = 0; k <= M; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double x = grid.nodes()[kk];
    bq[kk] = kB * q.at(x);
    bq_right[kk] = k < M ? kB * q.at(std::nextafter(x, 1.0)) : bq[kk];
    bq_left[kk] = k > 0 ? kB * q.at(std::nextafter(x, 0.0)) : bq[kk];
  }

  PSeries out;
  out.n_max = n_max;
  out.P_plus = TriKernel(M, TLayout::nodes);
  out.P_minus = TriKernel(M, TLayout::nodes);

  TriKernel cur(M, TLayout::nodes);
  for (int i = 0; i <= M; ++i)
    for (int j = 0; j <= i; ++j) cur.at(i, j) = bq[static_cast<std::size_t>(j)];

  for (int n = 1;; ++n) {
    out.gp.push_back(gp_norm(cur, p));
    out.row_max.push_back(max_row_lp(cur, p));
    (n % 2 == 0 ? out.P_plus : out.P_minus) += cur;
    if (n == n_max) break;
    TriKernel next(M, TLayout::nodes);
    // Column s = x_j: cumulative trapezoid in eta over [x_j, x_i].
    // P_1 is the only discontinuous term; its panel ends are one-sided too.
    const bool first = n == 1;
    ex.for_each(static_cast<std::size_t>(M) + 1, [&](std::size_t jj) {
      const int j = static_cast<int>(jj);
      Mat2 acc = Mat2::zero();
      next.at(j, j) = acc;
      for (int i = j + 1; i <= M; ++i) {
        const auto a = static_cast<std::size_t>(i - 1);
        const auto b = static_cast<std::size_t>(i);
        const auto da = static_cast<std::size_t>(i - 1 - j);
        const auto db = static_cast<std::size_t>(i - j);
        const Mat2 ga = bq_right[a] * (first ? bq_right[da] : cur.at(i - 1, i - 1 - j));
        const Mat2 gb = bq_left[b] * (first ? bq_left[db] : cur.at(i, i - j));
        acc += (0.5 * h) * (ga + gb);
        next.at(i, j) = acc;
      }
    });
    cur = std::move(next);
  }
  out.last_increment = out.gp.back();
  out.bound = std::pow(lp_norm(q, p), n_max) / factorial(n_max - 1);
  out.warning = out.row_max.back() > 10.0 * out.bound + 1e-300;
  return out;
}

namespace {

// R(x_i, u h / 2) on the node layout.
Mat2 half_arg(const TriKernel& R, int i, int u) {
  if (u % 2 == 0) return R.at(i, u / 2);
  return 0.5 * (R.at(i, (u - 1) / 2) + R.at(i, (u + 1) / 2));
}

KernelPair assemble(const TriKernel& P_plus, const TriKernel& P_minus, const Potential* q) {
  if (P_plus.cells() != P_minus.cells() || P_plus.layout() != TLayout::nodes ||
      P_minus.layout() != TLayout::nodes)
    throw Error("transform_kernel", "InvalidArgument", "P+ and P- must share a node grid");
  const int M = P_plus.cells();
  const double h = P_plus.step();
  KernelPair out{TriKernel(M, TLayout::nodes), TriKernel(M, TLayout::nodes)};
  for (int i = 0; i <= M; ++i)
    for (int j = 0; j <= i; ++j) out.R.at(i, j) = P_plus.at(i, j) + P_minus.at(i, j) * kJ;

  // With Q given, R = BQ(s)J + (continuous rest): only the rest is interpolated,
  // so jumps of Q do not leak into the half-step values.
  // At s = x (t = x) the limit from below is needed, not the breakpoint mean.
  std::vector<Mat2> first;
  std::vector<Mat2> first_left;
  TriKernel rest;
  if (q != nullptr) {
    first.resize(2 * static_cast<std::size_t>(M) + 1);
    first_left.resize(static_cast<std::size_t>(M) + 1);
    for (int u = 0; u <= 2 * M; ++u) first[static_cast<std::size_t>(u)] = kB * q->at(0.5 * u * h) * kJ;
    for (int i = 1; i <= M; ++i)
      first_left[static_cast<std::size_t>(i)] = kB * q->at(std::nextafter(i * h, 0.0)) * kJ;
    rest = out.R;
    for (int i = 0; i <= M; ++i)
      for (int j = 0; j <= i; ++j) rest.at(i, j) -= first[2 * static_cast<std::size_t>(j)];
  }
  auto r_at = [&](int i, int u) {
    if (q != nullptr && i > 0 && u == 2 * i) return first_left[static_cast<std::size_t>(i)] + rest.at(i, i);
    if (q == nullptr || u % 2 == 0) return half_arg(out.R, i, u);
    return first[static_cast<std::size_t>(u)] + half_arg(rest, i, u);
  };
  for (int i = 0; i <= M; ++i)
    for (int j = 0; j <= i; ++j) out.K.at(i, j) = 0.5 * (r_at(i, i - j) + r_at(i, i + j) * kJ);
  return out;
}

}  // namespace

KernelPair assemble_K(const TriKernel& P_plus, const TriKernel& P_minus) {
  return assemble(P_plus, P_minus, nullptr);
}

KernelPair assemble_K(const PSeries& ps, const Potential& q) { return assemble(ps.P_plus, ps.P_minus, &q); }

std::vector<std::array<double, 2>> free_solution(int cells, double lambda) {
  std::vector<std::array<double, 2>> c(static_cast<std::size_t>(cells) + 1);
  for (int j = 0; j <= cells; ++j) {
    const double x = static_cast<double>(j) / cells;
    c[static_cast<std::size_t>(j)] = {std::cos(lambda * x), std::sin(lambda * x)};
  }
  return c;
}

std::vector<std::array<double, 2>> apply_transform(const TriKernel& K, double lambda) {
  if (K.layout() != TLayout::nodes)
    throw Error("transform_kernel", "InvalidArgument", "apply_transform needs a node-layout kernel");
  const int M = K.cells();
  const auto c0 = free_solution(M, lambda);
  std::vector<std::array<double, 2>> c = c0;
  std::vector<double> t1(static_cast<std::size_t>(M) + 1);
  std::vector<double> t2(static_cast<std::size_t>(M) + 1);
  for (int i = 1; i <= M; ++i) {
    for (int j = 0; j <= i; ++j) {
      const Mat2& k = K.at(i, j);
      const auto& v = c0[static_cast<std::size_t>(j)];
      const double w = row_weight(K, i, j);
      t1[static_cast<std::size_t>(j)] = w * (k.a11 * v[0] + k.a12 * v[1]);
      t2[static_cast<std::size_t>(j)] = w * (k.a21 * v[0] + k.a22 * v[1]);
    }
    c[static_cast<std::size_t>(i)][0] += pairwise_sum(t1.data(), static_cast<std::size_t>(i) + 1);
    c[static_cast<std::size_t>(i)][1] += pairwise_sum(t2.data(), static_cast<std::size_t>(i) + 1);
  }
  return c;
}

void write_kernel_csv(std::ostream& os, const TriKernel& k) {
  const auto prec = os.precision(17);
  os << "x,t,k11,k12,k21,k22\n";
  for (int i = 0; i <= k.cells(); ++i) {
    const double x = i * k.step();
    for (std::size_t j = 0; j < k.row_size(i); ++j) {
      const Mat2& v = k.at(i, static_cast<int>(j));
      os << x << ',' << k.t(static_cast<int>(j)) << ',' << v.a11 << ',' << v.a12 << ',' << v.a21
         << ',' << v.a22 << '\n';
    }
  }
  os.precision(prec);
}

}  // namespace dirac
