#include "diracspec/grid.hpp"

#include <cmath>
#include <string>

#include "diracspec/errors.hpp"

namespace dirac {

Grid::Grid(std::vector<double> nodes, bool uniform) : nodes_(std::move(nodes)), uniform_(uniform) {
  const std::size_t n = nodes_.size();
  weights_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = nodes_[i + 1] - nodes_[i];
    weights_[i] += 0.5 * h;
    weights_[i + 1] += 0.5 * h;
  }
}

Grid Grid::uniform(int cells) {
  if (cells < 1) throw Error("core", "InvalidGrid", "grid needs at least one cell");
  std::vector<double> x(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) x[static_cast<std::size_t>(i)] = static_cast<double>(i) / cells;
  return Grid(std::move(x), true);
}

Grid Grid::from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 2) throw Error("core", "InvalidGrid", "grid needs at least two nodes");
  if (nodes.front() != 0.0 || nodes.back() != 1.0)
    throw Error("core", "InvalidGrid", "grid must start at 0 and end at 1");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1]))
      throw Error("core", "InvalidGrid", "grid nodes must strictly increase",
                  static_cast<long>(i));
  }
  const double h = 1.0 / static_cast<double>(nodes.size() - 1);
  bool uniform = true;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (std::abs(nodes[i] - static_cast<double>(i) * h) > 1e-14) {
      uniform = false;
      break;
    }
  }
  return Grid(std::move(nodes), uniform);
}

double Grid::step() const {
  if (!uniform_) throw Error("core", "InvalidGrid", "step() requires a uniform grid");
  return 1.0 / static_cast<double>(cells());
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t m = n / 2;
  return pairwise_sum(v, m) + pairwise_sum(v + m, n - m);
}

double trapezoid(const std::vector<double>& f, double h) {
  if (f.size() < 2) return 0.0;
  double s = pairwise_sum(f.data() + 1, f.size() - 2);
  s += 0.5 * (f.front() + f.back());
  return h * s;
}

double trapezoid_richardson(const std::vector<double>& f, double h) {
  const std::size_t cells = f.size() - 1;
  if (cells < 2 || cells % 2 != 0)
    throw Error("core", "InvalidGrid", "Richardson trapezoid needs an even number of cells");
  std::vector<double> coarse;
  coarse.reserve(cells / 2 + 1);
  for (std::size_t i = 0; i <= cells; i += 2) coarse.push_back(f[i]);
  const double fine = trapezoid(f, h);
  const double crude = trapezoid(coarse, 2.0 * h);
  return (4.0 * fine - crude) / 3.0;
}

}  // namespace dirac
