#pragma once

#include <cstddef>
#include <vector>

namespace dirac {

// Nodes on [0,1] with trapezoid weights.
class Grid {
 public:
  static Grid uniform(int cells);
  static Grid from_nodes(std::vector<double> nodes);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }
  int cells() const { return static_cast<int>(nodes_.size()) - 1; }
  bool is_uniform() const { return uniform_; }
  // Uniform grids only.
  double step() const;

 private:
  Grid(std::vector<double> nodes, bool uniform);

  std::vector<double> nodes_;
  std::vector<double> weights_;
  bool uniform_ = false;
};

// Sum in a fixed binary-tree order.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

// Composite trapezoid over equally spaced samples.
double trapezoid(const std::vector<double>& f, double h);
// One Richardson step on the trapezoid rule (Simpson); needs an even number of cells.
double trapezoid_richardson(const std::vector<double>& f, double h);

}  // namespace dirac
