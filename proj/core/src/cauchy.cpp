#include "diracspec/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "diracspec/errors.hpp"

namespace dirac {

namespace {

constexpr double kCapConstant = 1.0;
constexpr double kCapSampled = 0.5;
constexpr double kMaxSubsteps = 5e7;
constexpr double kPi = std::numbers::pi;

// Q is linear on [x0, x1] (constant for piecewise potentials).
struct Piece {
  double x0;
  double x1;
  Mat2 q0;
  Mat2 q1;
  bool constant;
};

std::vector<Piece> make_pieces(const Potential& q, const std::vector<double>& extra) {
  std::vector<double> x = q.points();
  x.insert(x.end(), extra.begin(), extra.end());
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  std::vector<Piece> out;
  out.reserve(x.size());
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double a = x[k];
    const double b = x[k + 1];
    if (q.kind() == PotentialKind::piecewise) {
      const Mat2 m = q.at(0.5 * (a + b));
      out.push_back({a, b, m, m, true});
    } else {
      const Mat2 ma = q.at(a);
      const Mat2 mb = q.at(b);
      out.push_back({a, b, ma, mb, ma == mb});
    }
  }
  return out;
}

Mat2 generator(double lambda, const Mat2& qm) { return -lambda * kB + kB * qm; }

long substeps(double norm_times_len, double cap, int refine) {
  const double n = std::max(1.0, std::ceil(norm_times_len / cap)) * refine;
  if (!(n <= kMaxSubsteps))
    throw Error("cauchy", "StepUnderflow",
                "propagation would need " + std::to_string(n) + " substeps");
  return static_cast<long>(n);
}

double wrap_pi(double d) {
  while (d > kPi) d -= 2.0 * kPi;
  while (d <= -kPi) d += 2.0 * kPi;
  return d;
}

struct State {
  Mat2 U = kI;
  Mat2 V = Mat2::zero();
  double theta = 0.0;
  double angle = 0.0;  // atan2 of the current first column
};

void track(State& s) {
  const double a = std::atan2(s.U.a21, s.U.a11);
  s.theta += wrap_pi(a - s.angle);
  s.angle = a;
}

void apply(State& s, const Mat2& E, const Mat2* D, bool with_angle) {
  if (D != nullptr) s.V = (*D) * s.U + E * s.V;
  s.U = E * s.U;
  if (with_angle) track(s);
}

// Magnus 4th-order step with two Gauss points; Q linear on the piece.
struct MagnusStep {
  Mat2 omega;
  Mat2 domega;
};

MagnusStep magnus(double lambda, const Piece& pc, double x, double h) {
  constexpr double g = 0.28867513459481287;  // sqrt(3)/6
  const double len = pc.x1 - pc.x0;
  auto qat = [&](double y) {
    const double t = (y - pc.x0) / len;
    return (1.0 - t) * pc.q0 + t * pc.q1;
  };
  const Mat2 a1 = generator(lambda, qat(x + (0.5 - g) * h));
  const Mat2 a2 = generator(lambda, qat(x + (0.5 + g) * h));
  const double c = std::sqrt(3.0) / 12.0 * h * h;
  MagnusStep st;
  st.omega = 0.5 * h * (a1 + a2) + c * commutator(a2, a1);
  const Mat2 mb = -kB;
  st.domega = -h * kB + c * (commutator(mb, a1) + commutator(a2, mb));
  return st;
}

void advance(State& s, double lambda, const Piece& pc, bool deriv, bool with_angle, int refine) {
  const double len = pc.x1 - pc.x0;
  if (pc.constant) {
    const Mat2 A = generator(lambda, pc.q0);
    const long n = substeps(op_norm(A) * len, kCapConstant, refine);
    const double h = len / static_cast<double>(n);
    if (deriv) {
      const ExpWithDerivative ed = mat2_exp_derivative(h * A, -h * kB);
      for (long k = 0; k < n; ++k) apply(s, ed.value, &ed.derivative, with_angle);
    } else {
      const Mat2 E = mat2_exp(h * A);
      for (long k = 0; k < n; ++k) apply(s, E, nullptr, with_angle);
    }
    return;
  }
  const double norm = std::max(op_norm(generator(lambda, pc.q0)), op_norm(generator(lambda, pc.q1)));
  const long n = substeps(norm * len, kCapSampled, refine);
  const double h = len / static_cast<double>(n);
  for (long k = 0; k < n; ++k) {
    const double x = pc.x0 + static_cast<double>(k) * h;
    const MagnusStep st = magnus(lambda, pc, x, h);
    if (deriv) {
      const ExpWithDerivative ed = mat2_exp_derivative(st.omega, st.domega);
      apply(s, ed.value, &ed.derivative, with_angle);
    } else {
      apply(s, mat2_exp(st.omega), nullptr, with_angle);
    }
  }
}

// Constant piece with lambda^2 > q1^2 + q2^2: the flow is periodic with period
// 2pi/omega and c turns once per period, so whole periods are skipped.
bool advance_periodic(State& s, double lambda, const Piece& pc, bool deriv) {
  const double qn2 = pc.q0.a11 * pc.q0.a11 + pc.q0.a12 * pc.q0.a12;
  const double w2 = lambda * lambda - qn2;
  if (!(w2 > 0.0)) return false;
  const double len = pc.x1 - pc.x0;
  const double period = 2.0 * kPi / std::sqrt(w2);
  const double turns = std::floor(len / period);
  if (turns < 1.0) return false;
  const Mat2 A = generator(lambda, pc.q0);
  const double rem = len - turns * period;
  const Piece tail{pc.x0, pc.x0 + rem, pc.q0, pc.q0, true};
  if (!deriv) {
    advance(s, lambda, tail, false, true, 1);
    s.theta += (lambda > 0.0 ? 2.0 : -2.0) * kPi * turns;
    return true;
  }
  State probe = s;
  advance(probe, lambda, tail, false, true, 1);
  const ExpWithDerivative ed = mat2_exp_derivative(len * A, -len * kB);
  s.V = ed.derivative * s.U + ed.value * s.V;
  s.U = ed.value * s.U;
  s.theta = probe.theta + (lambda > 0.0 ? 2.0 : -2.0) * kPi * turns;
  s.angle = std::atan2(s.U.a21, s.U.a11);
  return true;
}

void check_lambda(double lambda) {
  if (!std::isfinite(lambda)) throw Error("cauchy", "NonFinite", "lambda must be finite");
}

CauchySolution propagate_once(const Potential& q, double lambda, const Grid& grid, int refine) {
  const std::vector<Piece> pieces = make_pieces(q, grid.nodes());
  CauchySolution sol{lambda, grid, {}, 0.0};
  sol.U.reserve(grid.size());
  sol.U.push_back(kI);
  State s;
  std::size_t gi = 1;
  for (const Piece& pc : pieces) {
    advance(s, lambda, pc, false, false, refine);
    if (gi < grid.size() && pc.x1 == grid.nodes()[gi]) {
      sol.U.push_back(s.U);
      ++gi;
    }
  }
  return sol;
}

}  // namespace

CauchySolution propagate(const Potential& q, double lambda, const Grid& grid) {
  check_lambda(lambda);
  if (q.kind() == PotentialKind::piecewise) return propagate_once(q, lambda, grid, 1);
  const CauchySolution coarse = propagate_once(q, lambda, grid, 1);
  CauchySolution fine = propagate_once(q, lambda, grid, 2);
  fine.error_estimate = max_abs(fine.U.back() - coarse.U.back()) / 15.0;
  return fine;
}

CharState char_state(const Potential& q, double lambda, bool with_derivative) {
  check_lambda(lambda);
  const std::vector<Piece> pieces = make_pieces(q, {});
  State s;
  for (const Piece& pc : pieces) {
    if (pc.constant && advance_periodic(s, lambda, pc, with_derivative)) continue;
    advance(s, lambda, pc, with_derivative, true, 1);
  }
  CharState out;
  out.phi = s.U.a11;
  out.psi = s.U.a21;
  out.phi_dot = s.V.a11;
  out.psi_dot = s.V.a21;
  out.theta = s.theta;
  return out;
}

CharValues char_values(const Potential& q, double lambda) {
  const CharState st = char_state(q, lambda, false);
  return {st.phi, st.psi};
}

double phi_dot(const Potential& q, double lambda) { return char_state(q, lambda, true).phi_dot; }

void write_trajectory_csv(std::ostream& os, const CauchySolution& sol) {
  const auto prec = os.precision(17);
  os << "x,u11,u12,u21,u22\n";
  for (std::size_t i = 0; i < sol.U.size(); ++i) {
    const Mat2& u = sol.U[i];
    os << sol.grid.nodes()[i] << ',' << u.a11 << ',' << u.a12 << ',' << u.a21 << ',' << u.a22
       << '\n';
  }
  os.precision(prec);
}

}  // namespace dirac
