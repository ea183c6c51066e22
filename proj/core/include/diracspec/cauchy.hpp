#pragma once

#include <iosfwd>
#include <vector>

#include "diracspec/grid.hpp"
#include "diracspec/mat2.hpp"
#include "diracspec/potential.hpp"

namespace dirac {

// U(x, lambda) solving U' = -B(lambda I - Q(x)) U, U(0) = I, at the grid nodes.
// Column 0 is c = (c1, c2), column 1 is s = (s1, s2).
struct CauchySolution {
  double lambda = 0.0;
  Grid grid;
  std::vector<Mat2> U;
  // Richardson estimate |U_h - U_{h/2}|/15 at x = 1 for sampled potentials; 0 for
  // piecewise-constant ones, which are propagated exactly.
  double error_estimate = 0.0;

  double c1(std::size_t i) const { return U[i].a11; }
  double c2(std::size_t i) const { return U[i].a21; }
};

CauchySolution propagate(const Potential& q, double lambda, const Grid& grid);

struct CharValues {
  double phi;  // c1(1, lambda)
  double psi;  // c2(1, lambda)
};
CharValues char_values(const Potential& q, double lambda);

// dphi/dlambda from the variational system V' = -B(lambda - Q)V - BU, V(0) = 0.
double phi_dot(const Potential& q, double lambda);

// Everything the root finders need from a single sweep. theta is the
// continuous polar angle of c(1, lambda) with theta(0) = 0; it increases with
// lambda, and phi vanishes iff theta = pi(n + 1/2), psi iff theta = pi n.
struct CharState {
  double phi = 0.0;
  double psi = 0.0;
  double phi_dot = 0.0;
  double psi_dot = 0.0;
  double theta = 0.0;
};
CharState char_state(const Potential& q, double lambda, bool with_derivative);

void write_trajectory_csv(std::ostream& os, const CauchySolution& sol);

}  // namespace dirac
