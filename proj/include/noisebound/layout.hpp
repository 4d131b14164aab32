#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "noisebound/errors.hpp"

namespace noisebound {

enum class Metric { euclidean, manhattan };

// Finite register of system qubits, optionally embedded at lattice
// coordinates. Distances feed the spatial decay kernels of parametric
// coupling specs; table specs never need positions.
struct QubitLayout {
  int count = 0;
  std::vector<std::vector<double>> positions;  // empty, or one point per qubit
  Metric metric = Metric::euclidean;

  bool has_positions() const { return !positions.empty(); }

  double distance(int i, int j) const {
    if (i < 0 || i >= count || j < 0 || j >= count)
      throw input_error("distance: qubit index out of range");
    if (!has_positions())
      throw input_error("distance: layout has no positions");
    const auto& a = positions[static_cast<std::size_t>(i)];
    const auto& b = positions[static_cast<std::size_t>(j)];
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
      const double diff = a[d] - b[d];
      acc += metric == Metric::euclidean ? diff * diff : std::abs(diff);
    }
    return metric == Metric::euclidean ? std::sqrt(acc) : acc;
  }

  // Max pairwise distance over the set; 0 for singletons.
  double diameter(std::span<const int> qubits) const {
    double best = 0.0;
    for (std::size_t a = 0; a < qubits.size(); ++a)
      for (std::size_t b = a + 1; b < qubits.size(); ++b)
        best = std::max(best, distance(qubits[a], qubits[b]));
    return best;
  }
};

}  // namespace noisebound
