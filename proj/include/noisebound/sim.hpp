#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisebound/bound.hpp"
#include "noisebound/errors.hpp"
#include "noisebound/linalg.hpp"
#include "noisebound/noise_model.hpp"
#include "noisebound/pauli.hpp"

namespace noisebound {

inline constexpr int kMaxSimDimension = 1024;
inline constexpr int kMaxSystemQubits = 6;
inline constexpr int kMaxBathQubits = 4;
inline constexpr int kFaultQueryHardCap = 12;  // 2^r masked evolutions
inline constexpr int kDefaultMaxR = 3;
inline constexpr std::size_t kMaxCouplingTerms = 64;  // activity masks
inline constexpr std::size_t kMaxVerifyQueries = 200'000;

// One bath-only Hamiltonian term: coeff * (Pauli string over all bath qubits).
struct BathTerm {
  double coeff = 0.0;
  std::string paulis;
};

// One system-bath coupling term: coeff * (system Pauli string on the listed
// qubits) x (bath Pauli string over all bath qubits). Real coefficients and
// Pauli tensors keep every term Hermitian by construction.
struct CouplingTerm {
  double coeff = 0.0;
  std::vector<int> sys_qubits;  // sorted, distinct
  std::string sys_pauli;        // aligned with sys_qubits; 'I' not allowed
  std::string bath_pauli;       // over all bath qubits; may be all 'I'
};

// Ideal gate applied at a step boundary. Gates realize the circuit; noise
// acts continuously during the step, so masking never touches them.
struct Gate {
  std::string name;
  std::vector<int> qubits;  // system qubits
};

struct Step {
  double duration = 1.0;
  std::vector<std::vector<int>> locations;  // disjoint system qubit sets
  std::vector<Gate> gates;                  // applied after the evolution
};

// An explicit small system+bath model with a step schedule. The full
// register orders system qubits first (bits 0..n_sys-1), then bath qubits.
struct SimInstance {
  int n_sys = 1;
  int n_bath = 0;
  std::vector<BathTerm> bath_h;
  std::vector<CouplingTerm> sb_terms;
  std::vector<Step> steps;

  int total_qubits() const { return n_sys + n_bath; }
  Eigen::Index dim() const { return Eigen::Index{1} << total_qubits(); }
};

struct LocationRef {
  int step = 0;
  int loc = 0;
  friend auto operator<=>(const LocationRef&, const LocationRef&) = default;
};

// A set of marked circuit locations; the fault operator collects every
// expansion term faulty at all of them.
struct FaultQuery {
  std::vector<LocationRef> locations;
  int r() const { return static_cast<int>(locations.size()); }
};

struct FaultOperatorResult {
  FaultQuery query;
  double norm = 0.0;       // spectral norm of the fault operator
  double epsilon_r = 0.0;  // eps^r from the instance's own norms
  double margin = 0.0;     // epsilon_r - norm
  bool conclusive = true;  // false when eps >= 1 (the bound is vacuous)
};

// Structural diagnostics; empty means usable.
inline std::vector<std::string> validate_instance(const SimInstance& inst) {
  std::vector<std::string> out;
  if (inst.n_sys < 1 || inst.n_sys > kMaxSystemQubits)
    out.push_back("n_sys: must be in 1.." + std::to_string(kMaxSystemQubits));
  if (inst.n_bath < 0 || inst.n_bath > kMaxBathQubits)
    out.push_back("n_bath: must be in 0.." + std::to_string(kMaxBathQubits));
  if (inst.total_qubits() > 10)
    out.push_back("n_sys + n_bath: Hilbert dimension cap 1024 exceeded");

  for (std::size_t i = 0; i < inst.bath_h.size(); ++i) {
    const std::string tag = "bath_h[" + std::to_string(i) + "]";
    const auto& term = inst.bath_h[i];
    if (!std::isfinite(term.coeff)) out.push_back(tag + ".coeff: not finite");
    if (static_cast<int>(term.paulis.size()) != inst.n_bath)
      out.push_back(tag + ".pauli: length must equal n_bath");
    else if (!is_pauli_string(term.paulis))
      out.push_back(tag + ".pauli: must be over {I, X, Y, Z}");
  }

  if (inst.sb_terms.size() > kMaxCouplingTerms)
    out.push_back("sb_terms: at most " + std::to_string(kMaxCouplingTerms) +
                  " terms supported");
  for (std::size_t i = 0; i < inst.sb_terms.size(); ++i) {
    const std::string tag = "sb_terms[" + std::to_string(i) + "]";
    const auto& term = inst.sb_terms[i];
    if (!std::isfinite(term.coeff)) out.push_back(tag + ".coeff: not finite");
    if (term.sys_qubits.empty())
      out.push_back(tag + ".qubits: must be nonempty");
    for (std::size_t q = 0; q < term.sys_qubits.size(); ++q) {
      if (term.sys_qubits[q] < 0 || term.sys_qubits[q] >= inst.n_sys) {
        out.push_back(tag + ".qubits: index out of range");
        break;
      }
      if (q > 0 && term.sys_qubits[q] <= term.sys_qubits[q - 1]) {
        out.push_back(tag + ".qubits: must be sorted and distinct");
        break;
      }
    }
    if (term.sys_pauli.size() != term.sys_qubits.size())
      out.push_back(tag + ".sys_pauli: length must equal qubit count");
    else if (!is_pauli_string(term.sys_pauli))
      out.push_back(tag + ".sys_pauli: must be over {I, X, Y, Z}");
    else if (term.sys_pauli.find('I') != std::string::npos)
      out.push_back(tag + ".sys_pauli: 'I' not allowed, term must act on its qubit set");
    if (static_cast<int>(term.bath_pauli.size()) != inst.n_bath)
      out.push_back(tag + ".bath_pauli: length must equal n_bath");
    else if (!is_pauli_string(term.bath_pauli))
      out.push_back(tag + ".bath_pauli: must be over {I, X, Y, Z}");
  }

  for (std::size_t s = 0; s < inst.steps.size(); ++s) {
    const std::string tag = "steps[" + std::to_string(s) + "]";
    const auto& step = inst.steps[s];
    if (!(step.duration > 0.0) || !std::isfinite(step.duration))
      out.push_back(tag + ".duration: must be positive and finite");
    std::vector<bool> used(static_cast<std::size_t>(std::max(inst.n_sys, 0)),
                           false);
    for (std::size_t l = 0; l < step.locations.size(); ++l) {
      const std::string ltag = tag + ".locations[" + std::to_string(l) + "]";
      const auto& loc = step.locations[l];
      if (loc.empty()) out.push_back(ltag + ": empty qubit set");
      for (int q : loc) {
        if (q < 0 || q >= inst.n_sys) {
          out.push_back(ltag + ": index out of range");
          break;
        }
        if (used[static_cast<std::size_t>(q)]) {
          out.push_back(ltag + ": locations within a step must be disjoint");
          break;
        }
        used[static_cast<std::size_t>(q)] = true;
      }
    }
    for (std::size_t gi = 0; gi < step.gates.size(); ++gi) {
      const std::string gtag = tag + ".gates[" + std::to_string(gi) + "]";
      const auto& gate = step.gates[gi];
      Eigen::Index arity = 0;
      try {
        arity = standard_gate(gate.name).rows();
      } catch (const input_error&) {
        out.push_back(gtag + ".name: unknown gate '" + gate.name + "'");
        continue;
      }
      if ((Eigen::Index{1} << gate.qubits.size()) != arity)
        out.push_back(gtag + ".qubits: wrong count for gate '" + gate.name + "'");
      for (std::size_t a = 0; a < gate.qubits.size(); ++a) {
        if (gate.qubits[a] < 0 || gate.qubits[a] >= inst.n_sys) {
          out.push_back(gtag + ".qubits: index out of range");
          break;
        }
        for (std::size_t b = a + 1; b < gate.qubits.size(); ++b)
          if (gate.qubits[a] == gate.qubits[b]) {
            out.push_back(gtag + ".qubits: repeated qubit");
            break;
          }
      }
    }
  }
  return out;
}

namespace detail {

inline void require_valid(const SimInstance& inst) {
  auto issues = validate_instance(inst);
  if (!issues.empty())
    throw input_error("SimInstance: " + issues.front());
}

inline void require_query_valid(const SimInstance& inst,
                                std::span<const LocationRef> locations) {
  for (std::size_t i = 0; i < locations.size(); ++i) {
    const auto& ref = locations[i];
    if (ref.step < 0 || ref.step >= static_cast<int>(inst.steps.size()))
      throw input_error("FaultQuery: step index out of range");
    const auto& step = inst.steps[static_cast<std::size_t>(ref.step)];
    if (ref.loc < 0 || ref.loc >= static_cast<int>(step.locations.size()))
      throw input_error("FaultQuery: location index out of range");
    for (std::size_t j = i + 1; j < locations.size(); ++j)
      if (locations[j] == ref)
        throw input_error("FaultQuery: repeated location");
  }
}

}  // namespace detail

// Builds exact per-step propagators with selected coupling terms disabled,
// memoizing on (step, active-term mask). Instances are immutable while an
// evolver exists; the cache is not synchronized, so use one evolver per
// thread.
class MaskedEvolver {
 public:
  explicit MaskedEvolver(const SimInstance& inst) : inst_(&inst) {
    detail::require_valid(inst);
    const Eigen::Index dim = inst.dim();
    if (dim > kMaxSimDimension)
      throw resource_error("SimInstance: Hilbert dimension cap exceeded");

    bath_qubits_.resize(static_cast<std::size_t>(inst.n_bath));
    for (int b = 0; b < inst.n_bath; ++b)
      bath_qubits_[static_cast<std::size_t>(b)] = inst.n_sys + b;

    // Boundary gates are mask-independent; build them once per step.
    step_gate_.reserve(inst.steps.size());
    for (const auto& step : inst.steps) {
      ComplexMatrix g = ComplexMatrix::Identity(dim, dim);
      for (const auto& gate : step.gates)
        g = embed_unitary(inst.total_qubits(), gate.qubits,
                          standard_gate(gate.name)) *
            g;
      step_gate_.push_back(std::move(g));
    }
  }

  const SimInstance& instance() const { return *inst_; }

  // Time-ordered product over steps of exp(-i H_step duration), with the
  // step's ideal gates applied at its closing boundary. A coupling term is
  // inactive in a step iff its qubit set meets any masked location there.
  ComplexMatrix evolve(std::span<const LocationRef> masked) const {
    detail::require_query_valid(*inst_, masked);
    const Eigen::Index dim = inst_->dim();
    ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
    for (std::size_t s = 0; s < inst_->steps.size(); ++s) {
      const std::uint64_t inactive = inactive_terms(static_cast<int>(s), masked);
      u = step_gate_[s] * step_unitary(static_cast<int>(s), inactive) * u;
    }
    return u;
  }

 private:
  std::uint64_t inactive_terms(int step,
                               std::span<const LocationRef> masked) const {
    std::uint64_t masked_qubits = 0;
    for (const auto& ref : masked) {
      if (ref.step != step) continue;
      const auto& loc = inst_->steps[static_cast<std::size_t>(ref.step)]
                            .locations[static_cast<std::size_t>(ref.loc)];
      for (int q : loc) masked_qubits |= std::uint64_t{1} << q;
    }
    if (masked_qubits == 0) return 0;
    std::uint64_t inactive = 0;
    for (std::size_t t = 0; t < inst_->sb_terms.size(); ++t) {
      for (int q : inst_->sb_terms[t].sys_qubits)
        if ((masked_qubits >> q) & 1) {
          inactive |= std::uint64_t{1} << t;
          break;
        }
    }
    return inactive;
  }

  const ComplexMatrix& step_unitary(int step, std::uint64_t inactive) const {
    const auto key = std::make_pair(step, inactive);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    const Eigen::Index dim = inst_->dim();
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    for (const auto& term : inst_->bath_h)
      add_pauli_term(h, term.coeff, inst_->total_qubits(), bath_qubits_,
                     term.paulis);
    for (std::size_t t = 0; t < inst_->sb_terms.size(); ++t) {
      if ((inactive >> t) & 1) continue;
      const auto& term = inst_->sb_terms[t];
      std::vector<int> qubits = term.sys_qubits;
      qubits.insert(qubits.end(), bath_qubits_.begin(), bath_qubits_.end());
      add_pauli_term(h, term.coeff, inst_->total_qubits(), qubits,
                     term.sys_pauli + term.bath_pauli);
    }
    ComplexMatrix u = hermitian_propagator(
        h, inst_->steps[static_cast<std::size_t>(step)].duration);
    return cache_.emplace(key, std::move(u)).first->second;
  }

  const SimInstance* inst_;
  std::vector<int> bath_qubits_;
  std::vector<ComplexMatrix> step_gate_;
  mutable std::map<std::pair<int, std::uint64_t>, ComplexMatrix> cache_;
};

// Exact evolution with every coupling term touching a masked location
// disabled for that step: the computational form of evolving under a
// modified Hamiltonian with those terms turned off.
inline ComplexMatrix evolve_masked(const SimInstance& inst,
                                   std::span<const LocationRef> masked) {
  return MaskedEvolver(inst).evolve(masked);
}

namespace detail {

// E(I_r) = sum over subsets S of I_r of (-1)^|S| U_masked(S).
//
// Why this equals the fault-path sum: expand each masked evolution as a
// Dyson series in coupling-term insertions. A given fault path appears in
// U_masked(S) iff it touches no location of S, so its net coefficient in
// the alternating sum is sum over S disjoint from its touched set of
// (-1)^|S|, which vanishes unless the path touches every location of I_r.
// What survives is exactly the sum of fault paths faulty at all marked
// locations, with no perturbative truncation. A location counts as touched
// when a coupling term overlapping its qubits acts anywhere in its step,
// i.e. step-resolved faultiness.
inline ComplexMatrix fault_operator_with(const MaskedEvolver& evolver,
                                         const FaultQuery& query) {
  const SimInstance& inst = evolver.instance();
  const int r = query.r();
  if (r > kFaultQueryHardCap)
    throw resource_error("fault_operator: r exceeds the hard cap of " +
                         std::to_string(kFaultQueryHardCap));
  require_query_valid(inst, query.locations);

  const Eigen::Index dim = inst.dim();
  ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
  std::vector<LocationRef> subset;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << r); ++bits) {
    subset.clear();
    for (int i = 0; i < r; ++i)
      if ((bits >> i) & 1)
        subset.push_back(query.locations[static_cast<std::size_t>(i)]);
    const int sign = (std::popcount(bits) & 1) ? -1 : 1;
    e += static_cast<double>(sign) * evolver.evolve(subset);
  }
  return e;
}

}  // namespace detail

inline ComplexMatrix fault_operator(const SimInstance& inst,
                                    const FaultQuery& query) {
  MaskedEvolver evolver(inst);
  return detail::fault_operator_with(evolver, query);
}

// Per-anchor coupling-strength sums of the instance itself. The norm bound
// for a qubit set is the spectral norm of the full summed term on that set
// (just |coeff| for a single Pauli term); t0 is the longest step duration.
inline EtaProfile instance_eta_profile(const SimInstance& inst) {
  detail::require_valid(inst);

  std::map<std::vector<int>, std::vector<const CouplingTerm*>> by_set;
  for (const auto& term : inst.sb_terms)
    by_set[term.sys_qubits].push_back(&term);

  int k_max = 1;
  for (const auto& [set, terms] : by_set)
    k_max = std::max(k_max, static_cast<int>(set.size()));

  double t0 = 0.0;
  for (const auto& step : inst.steps) t0 = std::max(t0, step.duration);
  if (inst.steps.empty()) t0 = 1.0;

  std::map<std::vector<int>, double> set_norm;
  for (const auto& [set, terms] : by_set) {
    if (terms.size() == 1) {
      set_norm[set] = std::abs(terms.front()->coeff);
      continue;
    }
    // Distinct Pauli strings on the same set: take the exact norm of the sum.
    const int local_qubits = static_cast<int>(set.size()) + inst.n_bath;
    const Eigen::Index local_dim = Eigen::Index{1} << local_qubits;
    ComplexMatrix h = ComplexMatrix::Zero(local_dim, local_dim);
    std::vector<int> local(set.size() + static_cast<std::size_t>(inst.n_bath));
    for (std::size_t i = 0; i < local.size(); ++i)
      local[i] = static_cast<int>(i);
    for (const CouplingTerm* term : terms)
      add_pauli_term(h, term->coeff, local_qubits, local,
                     term->sys_pauli + term->bath_pauli);
    set_norm[set] = spectral_norm(h);
  }

  EtaProfile profile;
  profile.k_max = k_max;
  profile.eta_set.assign(static_cast<std::size_t>(k_max), 0.0);
  profile.eta_tilde.assign(static_cast<std::size_t>(k_max), 0.0);
  for (int k = 1; k <= k_max; ++k) {
    double peak = 0.0;
    for (int anchor = 0; anchor < inst.n_sys; ++anchor) {
      double sum = 0.0;
      for (const auto& [set, norm] : set_norm) {
        if (static_cast<int>(set.size()) != k) continue;
        if (std::find(set.begin(), set.end(), anchor) != set.end())
          sum += norm;
      }
      peak = std::max(peak, sum);
    }
    profile.eta_set[static_cast<std::size_t>(k - 1)] = peak * t0;
    profile.eta_tilde[static_cast<std::size_t>(k - 1)] =
        factorial(k - 1) * profile.eta_set[static_cast<std::size_t>(k - 1)];
  }
  return profile;
}

inline int instance_max_location_size(const SimInstance& inst) {
  int m = 1;
  for (const auto& step : inst.steps)
    for (const auto& loc : step.locations)
      m = std::max(m, static_cast<int>(loc.size()));
  return m;
}

// Constant-envelope bound evaluated from the instance's own norms, with
// m = the largest location in the schedule.
inline BoundReport instance_bound(const SimInstance& inst,
                                  const BoundOptions& opt = {}) {
  return constant_envelope_bound(instance_eta_profile(inst),
                                 instance_max_location_size(inst), opt);
}

// Enumerates every marked set with 1 <= r <= max_r and checks
// norm(E(I_r)) <= eps^r. Results are conclusive only when eps < 1.
inline std::vector<FaultOperatorResult> verify_instance(
    const SimInstance& inst, int max_r = kDefaultMaxR,
    const BoundOptions& opt = {}) {
  if (max_r < 0 || max_r > kFaultQueryHardCap)
    throw resource_error("verify_instance: max_r exceeds the hard cap of " +
                         std::to_string(kFaultQueryHardCap));
  MaskedEvolver evolver(inst);

  const BoundReport bound = instance_bound(inst, opt);
  const double eps = bound.epsilon.value_or(
      std::numeric_limits<double>::infinity());
  const bool conclusive = bound.epsilon.has_value() && eps < 1.0;

  std::vector<LocationRef> all;
  for (std::size_t s = 0; s < inst.steps.size(); ++s)
    for (std::size_t l = 0; l < inst.steps[s].locations.size(); ++l)
      all.push_back({static_cast<int>(s), static_cast<int>(l)});

  std::size_t total = 0;
  for (int r = 1; r <= std::min<int>(max_r, static_cast<int>(all.size())); ++r)
    total += static_cast<std::size_t>(
        binomial_u64(static_cast<int>(all.size()), r));
  if (total > kMaxVerifyQueries)
    throw resource_error("verify_instance: query count exceeds budget");

  std::vector<FaultOperatorResult> results;
  results.reserve(total);
  std::vector<int> index(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) index[i] = static_cast<int>(i);
  for (int r = 1; r <= std::min<int>(max_r, static_cast<int>(all.size())); ++r) {
    for_each_subset(index, r, [&](std::span<const int> pick) {
      FaultQuery query;
      for (int i : pick) query.locations.push_back(all[static_cast<std::size_t>(i)]);
      FaultOperatorResult res;
      res.query = query;
      res.norm = spectral_norm(detail::fault_operator_with(evolver, query));
      res.epsilon_r = std::pow(eps, r);
      res.margin = res.epsilon_r - res.norm;
      res.conclusive = conclusive;
      results.push_back(std::move(res));
    });
  }
  return results;
}

}  // namespace noisebound
