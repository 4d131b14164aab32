#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "noisebound/bound.hpp"
#include "noisebound/envelope.hpp"
#include "noisebound/errors.hpp"
#include "noisebound/noise_model.hpp"
#include "noisebound/numeric.hpp"
#include "noisebound/sim.hpp"

namespace noisebound {

using json = nlohmann::json;

struct SweepSpec {
  std::string parameter;  // "lambda_scale" or "t0"
  std::vector<double> values;
};

struct VerifySpec {
  SimInstance instance;
  int max_r = kDefaultMaxR;
};

// Parsed and validated run configuration. Sections are optional at parse
// time; each command checks for the sections it needs.
struct Config {
  double t0 = 1.0;
  int m = 2;
  double epsilon0 = kDefaultEpsilon0;
  double alpha0 = kDefaultAlpha0;
  std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
  std::optional<QubitLayout> layout;
  std::optional<CouplingSpec> coupling;
  Envelope envelope = Envelope::constant_one();
  std::optional<VerifySpec> verify;
  std::optional<SweepSpec> sweep;
  std::string canonical_hash;  // FNV-1a of the canonical JSON form
};

namespace detail {

[[noreturn]] inline void bad_field(const std::string& field,
                                   const std::string& what) {
  throw config_error(field + ": " + what);
}

inline void check_keys(const json& obj, const std::string& ctx,
                       std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (std::string_view a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known)
      bad_field(ctx.empty() ? key : ctx + "." + key, "unknown field");
  }
}

inline const json* find_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline const json& require_field(const json& obj, const std::string& ctx,
                                 const char* key) {
  const json* f = find_field(obj, key);
  if (!f) bad_field(ctx.empty() ? key : ctx + "." + key, "required field missing");
  return *f;
}

inline double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) bad_field(field, "must be a number");
  return v.get<double>();
}

inline int get_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) bad_field(field, "must be an integer");
  return v.get<int>();
}

inline std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) bad_field(field, "must be a string");
  return v.get<std::string>();
}

inline const json& get_array(const json& v, const std::string& field) {
  if (!v.is_array()) bad_field(field, "must be an array");
  return v;
}

inline const json& get_object(const json& v, const std::string& field) {
  if (!v.is_object()) bad_field(field, "must be an object");
  return v;
}

inline std::vector<int> get_int_list(const json& v, const std::string& field) {
  std::vector<int> out;
  for (const auto& e : get_array(v, field))
    out.push_back(get_int(e, field));
  return out;
}

inline QubitLayout parse_layout(const json& j) {
  get_object(j, "layout");
  check_keys(j, "layout", {"count", "positions", "metric"});
  QubitLayout layout;
  layout.count = get_int(require_field(j, "layout", "count"), "layout.count");
  if (layout.count < 1) bad_field("layout.count", "must be positive");
  if (const json* p = find_field(j, "positions")) {
    for (const auto& point : get_array(*p, "layout.positions")) {
      std::vector<double> coords;
      for (const auto& c : get_array(point, "layout.positions"))
        coords.push_back(get_number(c, "layout.positions"));
      layout.positions.push_back(std::move(coords));
    }
  }
  if (const json* m = find_field(j, "metric")) {
    const std::string name = get_string(*m, "layout.metric");
    if (name == "euclidean")
      layout.metric = Metric::euclidean;
    else if (name == "manhattan")
      layout.metric = Metric::manhattan;
    else
      bad_field("layout.metric", "must be 'euclidean' or 'manhattan'");
  }
  return layout;
}

inline CouplingSpec parse_coupling(const json& j) {
  get_object(j, "coupling");
  check_keys(j, "coupling", {"variant", "k_max", "table", "lambda", "kernel"});
  CouplingSpec spec;
  const std::string variant =
      get_string(require_field(j, "coupling", "variant"), "coupling.variant");
  spec.k_max = get_int(require_field(j, "coupling", "k_max"), "coupling.k_max");
  if (spec.k_max < 1) bad_field("coupling.k_max", "must be >= 1");

  if (variant == "table") {
    spec.variant = CouplingSpec::Variant::table;
    if (find_field(j, "lambda") || find_field(j, "kernel"))
      bad_field("coupling", "lambda/kernel not allowed for the table variant");
    std::size_t idx = 0;
    for (const auto& entry :
         get_array(require_field(j, "coupling", "table"), "coupling.table")) {
      const std::string ctx = "coupling.table[" + std::to_string(idx) + "]";
      get_object(entry, ctx);
      check_keys(entry, ctx, {"qubits", "norm"});
      auto qubits = get_int_list(require_field(entry, ctx, "qubits"),
                                 ctx + ".qubits");
      std::sort(qubits.begin(), qubits.end());
      for (std::size_t i = 1; i < qubits.size(); ++i)
        if (qubits[i] == qubits[i - 1])
          bad_field(ctx + ".qubits", "repeated qubit index");
      const double norm =
          get_number(require_field(entry, ctx, "norm"), ctx + ".norm");
      if (!(norm >= 0.0)) bad_field(ctx + ".norm", "must be nonnegative");
      if (!spec.table.emplace(std::move(qubits), norm).second)
        bad_field(ctx + ".qubits", "duplicate qubit set");
      ++idx;
    }
  } else if (variant == "parametric") {
    spec.variant = CouplingSpec::Variant::parametric;
    if (find_field(j, "table"))
      bad_field("coupling", "table not allowed for the parametric variant");
    for (const auto& a :
         get_array(require_field(j, "coupling", "lambda"), "coupling.lambda")) {
      const double v = get_number(a, "coupling.lambda");
      if (!(v >= 0.0)) bad_field("coupling.lambda", "entries must be nonnegative");
      spec.amplitudes.push_back(v);
    }
    if (static_cast<int>(spec.amplitudes.size()) != spec.k_max)
      bad_field("coupling.lambda", "length must equal k_max");
    if (const json* kj = find_field(j, "kernel")) {
      get_object(*kj, "coupling.kernel");
      const std::string type = get_string(
          require_field(*kj, "coupling.kernel", "type"), "coupling.kernel.type");
      if (type == "exponential") {
        check_keys(*kj, "coupling.kernel", {"type", "mu"});
        spec.kernel.type = KernelType::exponential;
        spec.kernel.parameter = get_number(
            require_field(*kj, "coupling.kernel", "mu"), "coupling.kernel.mu");
      } else if (type == "power_law") {
        check_keys(*kj, "coupling.kernel", {"type", "q"});
        spec.kernel.type = KernelType::power_law;
        spec.kernel.parameter = get_number(
            require_field(*kj, "coupling.kernel", "q"), "coupling.kernel.q");
      } else {
        bad_field("coupling.kernel.type", "must be 'exponential' or 'power_law'");
      }
      if (spec.kernel.parameter < 0.0)
        bad_field("coupling.kernel", "rate must be nonnegative");
    }
  } else {
    bad_field("coupling.variant", "must be 'table' or 'parametric'");
  }
  return spec;
}

inline Envelope parse_envelope(const json& j) {
  get_object(j, "envelope");
  check_keys(j, "envelope", {"variant", "p", "f"});
  const std::string variant =
      get_string(require_field(j, "envelope", "variant"), "envelope.variant");
  try {
    if (variant == "constant_one") {
      return Envelope::constant_one();
    } else if (variant == "factorial_power") {
      return Envelope::factorial_power(
          get_number(require_field(j, "envelope", "p"), "envelope.p"));
    } else if (variant == "explicit") {
      std::vector<double> f;
      for (const auto& v : get_array(require_field(j, "envelope", "f"),
                                     "envelope.f"))
        f.push_back(get_number(v, "envelope.f"));
      return Envelope::explicit_list(std::move(f));
    }
  } catch (const input_error& e) {
    throw config_error("envelope: " + std::string(e.what()));
  }
  bad_field("envelope.variant",
            "must be 'constant_one', 'factorial_power' or 'explicit'");
}

inline VerifySpec parse_verify(const json& j, double default_t0) {
  get_object(j, "verify");
  check_keys(j, "verify",
             {"n_sys", "n_bath", "bath_h", "sb_terms", "steps", "max_r"});
  VerifySpec spec;
  SimInstance& inst = spec.instance;
  inst.n_sys = get_int(require_field(j, "verify", "n_sys"), "verify.n_sys");
  inst.n_bath = get_int(require_field(j, "verify", "n_bath"), "verify.n_bath");

  if (const json* bh = find_field(j, "bath_h")) {
    std::size_t idx = 0;
    for (const auto& entry : get_array(*bh, "verify.bath_h")) {
      const std::string ctx = "verify.bath_h[" + std::to_string(idx) + "]";
      get_object(entry, ctx);
      check_keys(entry, ctx, {"coeff", "pauli"});
      BathTerm term;
      term.coeff = get_number(require_field(entry, ctx, "coeff"), ctx + ".coeff");
      term.paulis =
          get_string(require_field(entry, ctx, "pauli"), ctx + ".pauli");
      inst.bath_h.push_back(std::move(term));
      ++idx;
    }
  }

  std::size_t idx = 0;
  for (const auto& entry : get_array(require_field(j, "verify", "sb_terms"),
                                     "verify.sb_terms")) {
    const std::string ctx = "verify.sb_terms[" + std::to_string(idx) + "]";
    get_object(entry, ctx);
    check_keys(entry, ctx, {"coeff", "qubits", "sys_pauli", "bath_pauli"});
    CouplingTerm term;
    term.coeff = get_number(require_field(entry, ctx, "coeff"), ctx + ".coeff");
    term.sys_qubits =
        get_int_list(require_field(entry, ctx, "qubits"), ctx + ".qubits");
    term.sys_pauli =
        get_string(require_field(entry, ctx, "sys_pauli"), ctx + ".sys_pauli");
    if (const json* bp = find_field(entry, "bath_pauli"))
      term.bath_pauli = get_string(*bp, ctx + ".bath_pauli");
    else if (inst.n_bath > 0)
      bad_field(ctx + ".bath_pauli", "required when n_bath > 0");
    inst.sb_terms.push_back(std::move(term));
    ++idx;
  }

  idx = 0;
  for (const auto& entry :
       get_array(require_field(j, "verify", "steps"), "verify.steps")) {
    const std::string ctx = "verify.steps[" + std::to_string(idx) + "]";
    get_object(entry, ctx);
    check_keys(entry, ctx, {"duration", "locations", "gates"});
    Step step;
    step.duration = find_field(entry, "duration")
                        ? get_number(*find_field(entry, "duration"),
                                     ctx + ".duration")
                        : default_t0;
    for (const auto& loc : get_array(require_field(entry, ctx, "locations"),
                                     ctx + ".locations"))
      step.locations.push_back(get_int_list(loc, ctx + ".locations"));
    if (const json* gates = find_field(entry, "gates")) {
      std::size_t gi = 0;
      for (const auto& g : get_array(*gates, ctx + ".gates")) {
        const std::string gctx = ctx + ".gates[" + std::to_string(gi) + "]";
        get_object(g, gctx);
        check_keys(g, gctx, {"name", "qubits"});
        Gate gate;
        gate.name = get_string(require_field(g, gctx, "name"), gctx + ".name");
        gate.qubits =
            get_int_list(require_field(g, gctx, "qubits"), gctx + ".qubits");
        step.gates.push_back(std::move(gate));
        ++gi;
      }
    }
    inst.steps.push_back(std::move(step));
    ++idx;
  }

  if (const json* mr = find_field(j, "max_r")) {
    spec.max_r = get_int(*mr, "verify.max_r");
    if (spec.max_r < 0) bad_field("verify.max_r", "must be nonnegative");
  }

  const auto issues = validate_instance(inst);
  if (!issues.empty()) throw config_error("verify." + issues.front());
  return spec;
}

inline SweepSpec parse_sweep(const json& j) {
  get_object(j, "sweep");
  check_keys(j, "sweep", {"parameter", "values"});
  SweepSpec spec;
  spec.parameter =
      get_string(require_field(j, "sweep", "parameter"), "sweep.parameter");
  if (spec.parameter != "lambda_scale" && spec.parameter != "t0")
    bad_field("sweep.parameter", "must be 'lambda_scale' or 't0'");
  for (const auto& v :
       get_array(require_field(j, "sweep", "values"), "sweep.values"))
    spec.values.push_back(get_number(v, "sweep.values"));
  if (spec.values.empty()) bad_field("sweep.values", "must be nonempty");
  return spec;
}

}  // namespace detail

inline Config parse_config(const json& j) {
  if (!j.is_object()) throw config_error("config: top level must be an object");
  detail::check_keys(j, "",
                     {"t0", "m", "epsilon0", "alpha0", "enumeration_budget",
                      "layout", "coupling", "envelope", "verify", "sweep"});
  Config cfg;
  if (const json* v = detail::find_field(j, "t0")) {
    cfg.t0 = detail::get_number(*v, "t0");
    if (!(cfg.t0 > 0.0)) detail::bad_field("t0", "must be positive");
  }
  if (const json* v = detail::find_field(j, "m")) {
    cfg.m = detail::get_int(*v, "m");
    if (cfg.m < 1) detail::bad_field("m", "must be >= 1");
  }
  if (const json* v = detail::find_field(j, "epsilon0")) {
    cfg.epsilon0 = detail::get_number(*v, "epsilon0");
    if (!(cfg.epsilon0 > 0.0)) detail::bad_field("epsilon0", "must be positive");
  }
  if (const json* v = detail::find_field(j, "alpha0")) {
    cfg.alpha0 = detail::get_number(*v, "alpha0");
    if (!(cfg.alpha0 > 0.0)) detail::bad_field("alpha0", "must be positive");
  }
  if (const json* v = detail::find_field(j, "enumeration_budget")) {
    const int budget = detail::get_int(*v, "enumeration_budget");
    if (budget < 1) detail::bad_field("enumeration_budget", "must be positive");
    cfg.enumeration_budget = static_cast<std::uint64_t>(budget);
  }
  if (const json* v = detail::find_field(j, "layout"))
    cfg.layout = detail::parse_layout(*v);
  if (const json* v = detail::find_field(j, "coupling"))
    cfg.coupling = detail::parse_coupling(*v);
  if (const json* v = detail::find_field(j, "envelope"))
    cfg.envelope = detail::parse_envelope(*v);
  if (const json* v = detail::find_field(j, "verify"))
    cfg.verify = detail::parse_verify(*v, cfg.t0);
  if (const json* v = detail::find_field(j, "sweep"))
    cfg.sweep = detail::parse_sweep(*v);

  if (cfg.layout && cfg.coupling) {
    NoiseModel model{*cfg.layout, *cfg.coupling, cfg.t0};
    const auto issues = validate(model);
    if (!issues.empty()) throw config_error(issues.front());
  }
  cfg.canonical_hash = fnv1a_hex(j.dump());
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw config_error("config: parse failure: " + std::string(e.what()));
  }
  return parse_config(j);
}

// The analysis model; analyze and sweep need both sections.
inline NoiseModel make_noise_model(const Config& cfg) {
  if (!cfg.layout) throw config_error("layout: section required");
  if (!cfg.coupling) throw config_error("coupling: section required");
  return NoiseModel{*cfg.layout, *cfg.coupling, cfg.t0};
}

}  // namespace noisebound
