#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "noisebound/errors.hpp"
#include "noisebound/layout.hpp"
#include "noisebound/numeric.hpp"

namespace noisebound {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

enum class KernelType { exponential, power_law };

// Spatial decay factor applied to the diameter of a qubit set.
// exponential: exp(-mu * d); power_law: (1 + d)^(-q). Both satisfy
// kernel(0) = 1, so singletons always pick up the bare amplitude.
struct DecayKernel {
  KernelType type = KernelType::exponential;
  double parameter = 0.0;  // mu or q; >= 0

  double operator()(double d) const {
    return type == KernelType::exponential
               ? std::exp(-parameter * d)
               : std::pow(1.0 + d, -parameter);
  }

  // A zero-rate kernel is constant, so set geometry never matters.
  bool needs_distances() const { return parameter > 0.0; }
};

// Declared upper bounds on the operator norms of the k-body system-bath
// coupling terms. Norms are functions of the unordered qubit set; sets with
// more than k_max qubits carry no terms by definition.
struct CouplingSpec {
  enum class Variant { table, parametric };

  Variant variant = Variant::table;
  int k_max = 1;

  // table: explicit per-set norm bounds (keys are sorted distinct indices).
  std::map<std::vector<int>, double> table;

  // parametric: norm({q...}) = amplitudes[k-1] * kernel(diameter).
  std::vector<double> amplitudes;
  DecayKernel kernel;
};

// A noise declaration: who the qubits are, how strongly sets of them couple
// to the bath, and the longest time window t0 any circuit location spans.
// Norm values are time-independent upper bounds; abstracting a time-dependent
// device into such bounds is the caller's responsibility.
struct NoiseModel {
  QubitLayout layout;
  CouplingSpec coupling;
  double t0 = 1.0;
};

// Per-anchor-qubit coupling-strength sums, the basic one-location noise
// measures. eta_tilde[k-1] is the ordered-tuple sum (max over anchors),
// eta_set[k-1] the unordered-set sum; the two differ by exactly (k-1)!.
struct EtaProfile {
  int k_max = 0;
  std::vector<double> eta_tilde;
  std::vector<double> eta_set;

  double tilde(int k) const {
    if (k < 1 || k > k_max) throw input_error("EtaProfile: k out of range");
    return eta_tilde[static_cast<std::size_t>(k - 1)];
  }
  double set_sum(int k) const {
    if (k < 1 || k > k_max) throw input_error("EtaProfile: k out of range");
    return eta_set[static_cast<std::size_t>(k - 1)];
  }
};

namespace detail {

inline std::vector<int> canonical_set(std::span<const int> qubits,
                                      int qubit_count) {
  std::vector<int> s(qubits.begin(), qubits.end());
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] >= qubit_count)
      throw input_error("term_norm: qubit index out of range");
    if (i > 0 && s[i] == s[i - 1])
      throw input_error("term_norm: repeated qubit index");
  }
  return s;
}

}  // namespace detail

// Declared norm bound for the coupling term on one qubit set. Sets larger
// than k_max carry no term and report 0.
inline double term_norm(const NoiseModel& model, std::span<const int> qubits) {
  if (qubits.empty()) throw input_error("term_norm: empty qubit set");
  const auto key = detail::canonical_set(qubits, model.layout.count);
  const int k = static_cast<int>(key.size());
  if (k > model.coupling.k_max) return 0.0;

  if (model.coupling.variant == CouplingSpec::Variant::table) {
    const auto it = model.coupling.table.find(key);
    return it == model.coupling.table.end() ? 0.0 : it->second;
  }

  if (k > static_cast<int>(model.coupling.amplitudes.size())) return 0.0;
  const double amplitude =
      model.coupling.amplitudes[static_cast<std::size_t>(k - 1)];
  if (amplitude == 0.0) return 0.0;
  if (k == 1) return amplitude;  // diameter 0, kernel(0) = 1
  if (model.coupling.kernel.needs_distances() && !model.layout.has_positions())
    throw input_error("term_norm: parametric kernel requires positions");
  const double d = model.coupling.kernel.needs_distances()
                       ? model.layout.diameter(key)
                       : 0.0;
  return amplitude * model.coupling.kernel(d);
}

// Computes eta_set[k] = max over anchor qubits of the sum of term norms over
// all k-sets containing the anchor, times t0, for k = 1..k_max;
// eta_tilde[k] = (k-1)! * eta_set[k]. Parametric specs enumerate subsets and
// are subject to the evaluation budget; table specs walk their entries.
inline EtaProfile eta_profile(
    const NoiseModel& model, int k_max,
    std::uint64_t enumeration_budget = kDefaultEnumerationBudget) {
  if (k_max < 1) throw input_error("eta_profile: k_max must be >= 1");
  if (k_max > model.coupling.k_max)
    throw input_error("eta_profile: k_max exceeds the coupling's k_max");
  const int n = model.layout.count;
  if (n < 1) throw input_error("eta_profile: empty layout");

  EtaProfile profile;
  profile.k_max = k_max;
  profile.eta_set.assign(static_cast<std::size_t>(k_max), 0.0);
  profile.eta_tilde.assign(static_cast<std::size_t>(k_max), 0.0);

  for (int k = 1; k <= k_max; ++k) {
    std::vector<double> anchor_sum(static_cast<std::size_t>(n), 0.0);

    if (model.coupling.variant == CouplingSpec::Variant::table) {
      for (const auto& [set, norm] : model.coupling.table) {
        if (static_cast<int>(set.size()) != k) continue;
        for (int q : set) {
          if (q < 0 || q >= n)
            throw input_error("eta_profile: table entry index out of range");
          anchor_sum[static_cast<std::size_t>(q)] += norm;
        }
      }
    } else {
      const std::uint64_t work =
          static_cast<std::uint64_t>(n) *
          binomial_u64(n - 1, k - 1);
      if (work > enumeration_budget)
        throw resource_error("eta_profile: enumeration budget exceeded at k=" +
                             std::to_string(k));
      std::vector<int> others(static_cast<std::size_t>(n - 1));
      std::vector<int> set(static_cast<std::size_t>(k));
      for (int anchor = 0; anchor < n; ++anchor) {
        others.clear();
        for (int q = 0; q < n; ++q)
          if (q != anchor) others.push_back(q);
        double sum = 0.0;
        for_each_subset(others, k - 1, [&](std::span<const int> rest) {
          set.assign(rest.begin(), rest.end());
          set.push_back(anchor);
          sum += term_norm(model, set);
        });
        anchor_sum[static_cast<std::size_t>(anchor)] = sum;
      }
    }

    const double peak =
        *std::max_element(anchor_sum.begin(), anchor_sum.end());
    profile.eta_set[static_cast<std::size_t>(k - 1)] = peak * model.t0;
    profile.eta_tilde[static_cast<std::size_t>(k - 1)] =
        factorial(k - 1) * profile.eta_set[static_cast<std::size_t>(k - 1)];
  }
  return profile;
}

// Structural diagnostics; an empty list means the model is usable. Never
// throws: callers decide whether findings are fatal.
inline std::vector<std::string> validate(const NoiseModel& model) {
  std::vector<std::string> out;
  const int n = model.layout.count;

  if (n < 1) out.push_back("layout.count: must be positive");
  if (!(model.t0 > 0.0) || !std::isfinite(model.t0))
    out.push_back("t0: must be positive and finite");
  if (model.layout.has_positions()) {
    if (static_cast<int>(model.layout.positions.size()) != n) {
      out.push_back("layout.positions: length must equal layout.count");
    } else {
      const std::size_t dim = model.layout.positions.front().size();
      for (const auto& p : model.layout.positions)
        if (p.size() != dim) {
          out.push_back("layout.positions: inconsistent dimensions");
          break;
        }
    }
  }
  if (model.coupling.k_max < 1) out.push_back("coupling.k_max: must be >= 1");

  if (model.coupling.variant == CouplingSpec::Variant::table) {
    std::size_t idx = 0;
    for (const auto& [set, norm] : model.coupling.table) {
      const std::string tag = "coupling.table[" + std::to_string(idx) + "]";
      if (set.empty()) out.push_back(tag + ": empty qubit set");
      for (std::size_t i = 0; i < set.size(); ++i) {
        if (set[i] < 0 || set[i] >= n) {
          out.push_back(tag + ": qubit index out of range");
          break;
        }
        if (i > 0 && set[i] <= set[i - 1]) {
          out.push_back(tag + ": qubit set must be sorted and distinct");
          break;
        }
      }
      if (static_cast<int>(set.size()) > model.coupling.k_max)
        out.push_back(tag + ": set larger than coupling.k_max");
      if (!(norm >= 0.0) || !std::isfinite(norm))
        out.push_back(tag + ": norm must be nonnegative and finite");
      ++idx;
    }
  } else {
    if (static_cast<int>(model.coupling.amplitudes.size()) !=
        model.coupling.k_max)
      out.push_back("coupling.lambda: length must equal coupling.k_max");
    for (double a : model.coupling.amplitudes)
      if (!(a >= 0.0) || !std::isfinite(a)) {
        out.push_back("coupling.lambda: entries must be nonnegative and finite");
        break;
      }
    if (model.coupling.kernel.parameter < 0.0)
      out.push_back("coupling.kernel: rate must be nonnegative");
    bool multi_qubit_amplitude = false;
    for (std::size_t i = 1; i < model.coupling.amplitudes.size(); ++i)
      if (model.coupling.amplitudes[i] > 0.0) multi_qubit_amplitude = true;
    if (model.coupling.kernel.needs_distances() && multi_qubit_amplitude &&
        !model.layout.has_positions())
      out.push_back("layout.positions: positions required by parametric kernel");
  }
  return out;
}

}  // namespace noisebound
