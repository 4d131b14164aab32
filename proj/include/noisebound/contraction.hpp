#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "noisebound/errors.hpp"
#include "noisebound/numeric.hpp"

namespace noisebound {

inline constexpr int kDefaultPartitionBudget = 20;

// Per-k bounds on the strength of a k-contraction: a single coupling term
// producing the first insertion at k of the r marked locations at once.
// eta[0] (k = 1) is independent of r; every higher entry carries the r/2k
// prefactor and so scales linearly in r.
struct ContractionStrengths {
  int r = 0;
  std::vector<double> eta;  // eta[k-1] for k = 1..r

  double of(int k) const {
    if (k < 1 || k > static_cast<int>(eta.size()))
      throw input_error("ContractionStrengths: k out of range");
    return eta[static_cast<std::size_t>(k - 1)];
  }
};

// Synthesizes eta_k for k = 1..r from the one-location components
// eta1_components[j-1] = eta_1^(j):
//   eta_1 = sum_j eta_1^(j)
//   eta_k = (r/2k) sum_{j>=k} 2^j eta_1^(j)   for k > 1.
inline ContractionStrengths contraction_strengths(
    int r, std::span<const double> eta1_components) {
  if (r < 1) throw input_error("contraction_strengths: r must be >= 1");
  for (double c : eta1_components)
    if (!(c >= 0.0) || !std::isfinite(c))
      throw input_error(
          "contraction_strengths: components must be nonnegative and finite");

  const int j_max = static_cast<int>(eta1_components.size());
  ContractionStrengths out;
  out.r = r;
  out.eta.assign(static_cast<std::size_t>(r), 0.0);

  double one_contraction = 0.0;
  for (double c : eta1_components) one_contraction += c;
  out.eta[0] = one_contraction;

  for (int k = 2; k <= r; ++k) {
    double weighted = 0.0;
    for (int j = j_max; j >= k; --j)
      weighted += std::ldexp(eta1_components[static_cast<std::size_t>(j - 1)], j);
    out.eta[static_cast<std::size_t>(k - 1)] =
        weighted * static_cast<double>(r) / (2.0 * k);
  }
  return out;
}

namespace detail {

// Recursion over the largest part: choose the multiplicity of part `part`,
// recurse on the remainder with smaller parts only.
inline double partition_sum_rec(int remaining, int part,
                                std::span<const double> eta) {
  if (remaining == 0) return 1.0;
  if (part == 0) return 0.0;
  const double eta_part = eta[static_cast<std::size_t>(part - 1)];
  double total = 0.0;
  double power_over_fact = 1.0;  // eta_part^count / count!
  for (int count = 0; count * part <= remaining; ++count) {
    if (count > 0) power_over_fact *= eta_part / count;
    total += power_over_fact *
             partition_sum_rec(remaining - count * part, part - 1, eta);
    if (eta_part == 0.0) break;  // higher counts contribute nothing
  }
  return total;
}

}  // namespace detail

// Exact enumeration of sum over multiplicity vectors (r_1, r_2, ...) with
// sum_k k r_k = r of prod_k eta_k^(r_k) / r_k!. Equivalently the x^r
// coefficient of exp(sum_k eta_k x^k).
inline double exact_partition_sum(int r, std::span<const double> eta,
                                  int budget_r = kDefaultPartitionBudget) {
  if (r < 1) throw input_error("exact_partition_sum: r must be >= 1");
  if (r > budget_r)
    throw resource_error("exact_partition_sum: r exceeds enumeration budget (" +
                         std::to_string(budget_r) + ")");
  if (static_cast<int>(eta.size()) < r)
    throw input_error("exact_partition_sum: eta shorter than r");
  for (double e : eta.subspan(0, static_cast<std::size_t>(r)))
    if (!(e >= 0.0) || !std::isfinite(e))
      throw input_error("exact_partition_sum: eta entries must be nonnegative and finite");
  return detail::partition_sum_rec(r, r, eta);
}

// (2 alpha exp(sum_k g_k/(2 k!)))^r over the supplied finite g list; the
// constraint-relaxed product form that dominates the partition sum.
inline double relaxed_product_bound(int r, double alpha,
                                    std::span<const double> g) {
  if (r < 1) throw input_error("relaxed_product_bound: r must be >= 1");
  if (!(alpha >= 0.0))
    throw input_error("relaxed_product_bound: alpha must be nonnegative");
  if (2.0 * alpha >= 1.0)
    throw divergence_error("C(alpha) undefined: 2*alpha >= 1");
  double exponent = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i]))
      throw input_error("relaxed_product_bound: g entries must be finite");
    exponent += g[i] / (2.0 * factorial(static_cast<int>(i) + 1));
  }
  if (!std::isfinite(exponent))
    throw divergence_error("relaxed_product_bound: exponent sum diverged");
  return std::pow(2.0 * alpha * std::exp(exponent), r);
}

}  // namespace noisebound
