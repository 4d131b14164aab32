#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisebound/bound.hpp"
#include "noisebound/noise_model.hpp"
#include "noisebound/sim.hpp"
#include "noisebound/version.hpp"

namespace noisebound {

enum ExitCode {
  kExitOk = 0,
  kExitViolation = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
};

struct SweepRow {
  double value = 0.0;
  std::optional<double> alpha;
  std::optional<double> epsilon;
  Verdict verdict = Verdict::inconclusive;
};

struct VerifySummary {
  EtaProfile profile;
  BoundReport bound;
  std::vector<FaultOperatorResult> results;
};

// One run's structured output. Serialization is deterministic: identical
// configs give byte-identical JSON; a timestamp, when present, is added by
// the front end and excluded from any comparison or hashing.
struct RunReport {
  std::string mode;
  std::string config_hash;
  std::optional<EtaProfile> profile;
  std::optional<BoundReport> bound;
  std::optional<VerifySummary> verify;
  std::string sweep_parameter;
  std::optional<std::vector<SweepRow>> sweep;
};

// A conclusive result whose measured norm exceeds its bound, beyond floating
// slack: the finding that would falsify the implementation or the model
// mapping.
inline bool is_violation(const FaultOperatorResult& res) {
  return res.conclusive &&
         res.norm > res.epsilon_r * (1.0 + 1e-9) + 1e-12;
}

inline bool has_conclusive_violation(
    std::span<const FaultOperatorResult> results) {
  for (const auto& res : results)
    if (is_violation(res)) return true;
  return false;
}

namespace detail {

inline nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline nlohmann::json json_number(const std::optional<double>& v) {
  if (!v.has_value()) return nullptr;
  return json_number(*v);
}

inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline nlohmann::json to_json(const EtaProfile& profile) {
  return {{"k_max", profile.k_max},
          {"eta_tilde", profile.eta_tilde},
          {"eta_set", profile.eta_set}};
}

inline nlohmann::json to_json(const BoundReport& rep) {
  nlohmann::json g = nlohmann::json::array();
  for (const auto& e : rep.g)
    g.push_back({{"k", e.k}, {"value", e.value}, {"tail", e.tail}});
  return {{"alpha", rep.alpha},
          {"m", rep.m},
          {"g", std::move(g)},
          {"exponent_sum",
           {{"value", rep.exponent_sum.value}, {"tail", rep.exponent_sum.tail}}},
          {"epsilon", detail::json_number(rep.epsilon)},
          {"epsilon_series", detail::json_number(rep.epsilon_series)},
          {"epsilon0", rep.epsilon0},
          {"alpha0", rep.alpha0},
          {"alpha_below_alpha0", rep.alpha < rep.alpha0},
          {"verdict", std::string(to_string(rep.verdict))},
          {"caveats", rep.caveats}};
}

inline nlohmann::json to_json(const FaultOperatorResult& res) {
  nlohmann::json locations = nlohmann::json::array();
  for (const auto& ref : res.query.locations)
    locations.push_back({ref.step, ref.loc});
  return {{"locations", std::move(locations)},
          {"r", res.query.r()},
          {"norm", res.norm},
          {"epsilon_r", detail::json_number(res.epsilon_r)},
          {"margin", detail::json_number(res.margin)},
          {"conclusive", res.conclusive},
          {"violation", is_violation(res)}};
}

inline nlohmann::json to_json(const RunReport& rep) {
  nlohmann::json out{{"tool", kToolName},
                     {"version", kVersion},
                     {"mode", rep.mode},
                     {"config_hash", rep.config_hash}};
  if (rep.profile) out["eta_profile"] = to_json(*rep.profile);
  if (rep.bound) out["bound"] = to_json(*rep.bound);
  if (rep.verify) {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& res : rep.verify->results) results.push_back(to_json(res));
    out["verify"] = {{"eta_profile", to_json(rep.verify->profile)},
                     {"bound", to_json(rep.verify->bound)},
                     {"results", std::move(results)},
                     {"violation", has_conclusive_violation(rep.verify->results)}};
  }
  if (rep.sweep) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : *rep.sweep)
      rows.push_back({{"value", row.value},
                      {"alpha", detail::json_number(row.alpha)},
                      {"epsilon", detail::json_number(row.epsilon)},
                      {"verdict", std::string(to_string(row.verdict))}});
    out["sweep"] = {{"parameter", rep.sweep_parameter}, {"rows", std::move(rows)}};
  }
  return out;
}

// Comma-separated sweep table: header row, then one row per parameter value.
// Unavailable cells stay empty.
inline std::string render_sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "value,alpha,epsilon,verdict\n";
  for (const auto& row : rows) {
    out << detail::format_g17(row.value) << ',';
    if (row.alpha) out << detail::format_g17(*row.alpha);
    out << ',';
    if (row.epsilon && std::isfinite(*row.epsilon))
      out << detail::format_g17(*row.epsilon);
    out << ',' << to_string(row.verdict) << '\n';
  }
  return out.str();
}

inline std::string render_text(const RunReport& rep) {
  std::ostringstream out;
  out << kToolName << ' ' << kVersion << " | mode=" << rep.mode
      << " | config=" << rep.config_hash << '\n';
  if (rep.profile) {
    out << "eta_tilde:";
    for (int k = 1; k <= rep.profile->k_max; ++k)
      out << "  k=" << k << ": " << detail::format_g17(rep.profile->tilde(k));
    out << '\n';
  }
  const BoundReport* bound =
      rep.bound ? &*rep.bound : (rep.verify ? &rep.verify->bound : nullptr);
  if (bound) {
    out << "alpha = " << detail::format_g17(bound->alpha)
        << "  (alpha0 = " << detail::format_g17(bound->alpha0) << ")\n";
    if (bound->epsilon)
      out << "epsilon <= " << detail::format_g17(*bound->epsilon);
    else
      out << "epsilon unavailable";
    if (bound->epsilon_series && bound->epsilon &&
        *bound->epsilon_series != *bound->epsilon)
      out << "  (series evaluation: " << detail::format_g17(*bound->epsilon_series)
          << ")";
    out << '\n'
        << "verdict: " << to_string(bound->verdict)
        << "  (epsilon0 = " << detail::format_g17(bound->epsilon0) << ")\n";
    for (const auto& c : bound->caveats) out << "caveat: " << c << '\n';
  }
  if (rep.verify) {
    out << "fault-operator checks (r <= "
        << (rep.verify->results.empty()
                ? 0
                : rep.verify->results.back().query.r())
        << "):\n";
    for (const auto& res : rep.verify->results) {
      out << "  r=" << res.query.r() << " locations=";
      for (std::size_t i = 0; i < res.query.locations.size(); ++i) {
        if (i) out << '+';
        out << res.query.locations[i].step << ':' << res.query.locations[i].loc;
      }
      out << " norm=" << detail::format_g17(res.norm);
      if (res.conclusive)
        out << " bound=" << detail::format_g17(res.epsilon_r)
            << (is_violation(res) ? "  VIOLATION" : "  ok");
      else
        out << " inconclusive";
      out << '\n';
    }
  }
  if (rep.sweep) out << render_sweep_csv(*rep.sweep);
  return out.str();
}

}  // namespace noisebound
