#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noisebound/envelope.hpp"
#include "noisebound/errors.hpp"
#include "noisebound/noise_model.hpp"

namespace noisebound {

inline constexpr double kDefaultEpsilon0 = 1e-4;
inline constexpr double kDefaultAlpha0 = 1e-5;
inline constexpr double kDefaultSeriesRelTol = 1e-12;
// The exponent sum over k truncates at profile.k_max + this, with envelope
// ceilings covering the rest.
inline constexpr int kDefaultTailDepth = 40;
inline constexpr int kDefaultZetaTerms = 1'000'000;

// Truncated value of a nonnegative series together with a certified upper
// bound on the discarded remainder: value <= true sum <= value + tail.
struct Certified {
  double value = 0.0;
  double tail = 0.0;
  double upper() const { return value + tail; }
};

// C(alpha) = (1 - 2 alpha)^-1, the geometric-tail constant.
inline double c_alpha(double alpha) {
  if (!(alpha >= 0.0)) throw input_error("c_alpha: alpha must be nonnegative");
  if (2.0 * alpha >= 1.0)
    throw divergence_error("C(alpha) undefined: 2*alpha >= 1");
  return 1.0 / (1.0 - 2.0 * alpha);
}

namespace detail {

// Sum over l >= 0 of  pref * (k-1)! * f_{k+l} * (2a)^l / (k+l-1)!  where
// pref = 1 (the g_k series) or pref = 1/(2 k!) (the exponent term
// g_k/(2 k!), formed without materializing k! next to f_{k+l} so large k
// stays finite for the factorial_power shape).
//
// Tail certificates are geometric. Writing x = 2a < 1, the term ratio is
//   x / (k+l)                      for constant_one (and explicit lists),
//   x * ((k+l)/(k+l+1))^(p-1) <= x for factorial_power,
// so after the last added term t_L the remainder is at most
// t_L * rho/(1-rho) with rho the ratio bound at l = L.
inline Certified envelope_series(int k, const Envelope& env, double alpha,
                                 double rel_tol, bool normalized) {
  if (k < 1) throw input_error("envelope series: k must be >= 1");
  if (!(rel_tol > 0.0)) throw input_error("envelope series: rel_tol must be positive");
  if (!(alpha >= 0.0)) throw input_error("envelope series: alpha must be nonnegative");
  if (2.0 * alpha >= 1.0)
    throw divergence_error("C(alpha) undefined: 2*alpha >= 1");
  if (k > env.max_k()) return {0.0, 0.0};

  const double x = 2.0 * alpha;
  Certified out;

  if (env.variant() == Envelope::Variant::factorial_power) {
    const double p = env.power();
    // (k-1)! f_{k+l} / (k+l-1)! = (k-1)! (k+l)^(1-p); with pref folded in the
    // l = 0 term is k!/k^p (resp. 1/(2 k^p)).
    double term = (normalized ? 1.0 / (2.0 * k) : factorial(k - 1)) *
                  std::pow(static_cast<double>(k), 1.0 - p);
    for (long l = 0;; ++l) {
      out.value += term;
      if (term == 0.0) {
        out.tail = 0.0;
        break;
      }
      out.tail = term * x / (1.0 - x);
      if (out.tail <= rel_tol * out.value) break;
      term *= x * std::pow(static_cast<double>(k + l) / (k + l + 1), p - 1.0);
      if (l > 2'000'000)
        throw divergence_error("envelope series: no convergence");
    }
    return out;
  }

  // constant_one and explicit_list share the base recurrence
  // base_{l+1} = base_l * x / (k+l), term_l = base_l * f_{k+l}.
  double base = normalized ? 0.5 / (k * factorial(k - 1)) : 1.0;
  for (long l = 0;; ++l) {
    if (k + l > env.max_k()) {
      out.tail = 0.0;  // finitely supported: nothing past the list
      break;
    }
    const double term = base * env.value(static_cast<int>(k + l));
    out.value += term;
    if (base == 0.0) {
      out.tail = 0.0;
      break;
    }
    if (env.variant() == Envelope::Variant::constant_one) {
      const double rho = x / static_cast<double>(k + l);
      out.tail = base * rho / (1.0 - rho);
      if (out.tail <= rel_tol * out.value) break;
    }
    base *= x / static_cast<double>(k + l);
    if (l > 2'000'000)
      throw divergence_error("envelope series: no convergence");
  }
  return out;
}

// Upper bound on sum_{k > beyond} ceiling_k / (2 k!) where ceiling_k is the
// envelope's closed per-k bound on g_k: C(a) for constant_one,
// (k!/k^p) C(a) for factorial_power, zero past an explicit list.
inline double exponent_tail(const Envelope& env, double alpha, int beyond) {
  if (beyond < 1) throw input_error("exponent_tail: beyond must be >= 1");
  switch (env.variant()) {
    case Envelope::Variant::explicit_list:
      if (beyond < env.max_k())
        throw input_error("exponent_tail: explicit list extends past truncation");
      return 0.0;
    case Envelope::Variant::constant_one: {
      // sum_{k>K} 1/k! <= (K+2) / ((K+1)! (K+1))
      double inv_fact = 1.0;  // 1/(K+1)!
      for (int i = 2; i <= beyond + 1; ++i) inv_fact /= static_cast<double>(i);
      const double rest =
          inv_fact * static_cast<double>(beyond + 2) / (beyond + 1);
      return 0.5 * c_alpha(alpha) * rest;
    }
    case Envelope::Variant::factorial_power: {
      const double p = env.power();
      if (p <= 1.0)
        throw divergence_error("exponent sum diverges for p <= 1");
      // sum_{k>K} k^-p <= integral_K^inf x^-p dx = K^(1-p)/(p-1)
      const double rest =
          std::pow(static_cast<double>(beyond), 1.0 - p) / (p - 1.0);
      return 0.5 * c_alpha(alpha) * rest;
    }
  }
  return 0.0;  // unreachable
}

}  // namespace detail

// Smallest alpha with eta_tilde[k] <= f_k alpha^k across the profile:
// max over k with eta_tilde[k] > 0 of (eta_tilde[k]/f_k)^(1/k).
inline double fit_alpha(const EtaProfile& profile, const Envelope& env) {
  if (env.variant() == Envelope::Variant::explicit_list &&
      env.max_k() < profile.k_max)
    throw input_error("fit_alpha: explicit envelope shorter than profile k_max");
  double alpha = 0.0;
  for (int k = 1; k <= profile.k_max; ++k) {
    const double eta = profile.tilde(k);
    if (!(eta >= 0.0) || !std::isfinite(eta))
      throw input_error("fit_alpha: eta_tilde entries must be nonnegative and finite");
    if (eta == 0.0) continue;
    alpha = std::max(alpha, std::pow(eta / env.value(k), 1.0 / k));
  }
  return alpha;
}

// g_k = sum_{l>=0} (k-1)! f_{k+l} (2 alpha)^l / (k+l-1)!, truncated once the
// certified tail drops below rel_tol * value.
inline Certified g_coefficient(int k, const Envelope& env, double alpha,
                               double rel_tol = kDefaultSeriesRelTol) {
  if (k > 170) throw input_error("g_coefficient: k too large for binary64");
  return detail::envelope_series(k, env, alpha, rel_tol, false);
}

// g_k/(2 k!) with the same certificate; safe for large k.
inline Certified exponent_term(int k, const Envelope& env, double alpha,
                               double rel_tol = kDefaultSeriesRelTol) {
  return detail::envelope_series(k, env, alpha, rel_tol, true);
}

// sum_{k=1..k_trunc} g_k/(2 k!) plus envelope ceilings for everything past
// the truncation point. Explicit lists are finite and always summed in full.
inline Certified exponent_sum(const Envelope& env, double alpha, int k_trunc,
                              double rel_tol = kDefaultSeriesRelTol) {
  if (k_trunc < 1) throw input_error("exponent_sum: k_trunc must be >= 1");
  const int last = env.variant() == Envelope::Variant::explicit_list
                       ? env.max_k()
                       : std::min(k_trunc, env.max_k());
  Certified out;
  for (int k = 1; k <= last; ++k) {
    const Certified term = exponent_term(k, env, alpha, rel_tol);
    out.value += term.value;
    out.tail += term.tail;
  }
  if (last < env.max_k())
    out.tail += detail::exponent_tail(env, alpha, last);
  return out;
}

// Partial sum of sum_{k>=1} k^-p with the integral bound on the remainder.
inline Certified zeta_partial(double p, int terms = kDefaultZetaTerms) {
  if (!(p > 1.0)) throw input_error("zeta_partial: p must be > 1");
  if (terms < 1) throw input_error("zeta_partial: terms must be >= 1");
  Certified out;
  for (int k = terms; k >= 1; --k)
    out.value += std::pow(static_cast<double>(k), -p);
  out.tail = std::pow(static_cast<double>(terms), 1.0 - p) / (p - 1.0);
  return out;
}

struct GEntry {
  int k = 0;
  double value = 0.0;
  double tail = 0.0;
};

// eps = 2 m alpha exp(sum_k g_k/(2 k!)) evaluated over the supplied g list,
// with envelope ceilings certifying every k beyond it. Upper bounds of the
// g entries enter the exponent so the result stays a true upper bound.
inline double epsilon_bound(double alpha, std::span<const GEntry> g, int m,
                            const Envelope& env) {
  if (m < 1) throw input_error("epsilon_bound: m must be >= 1");
  if (!(alpha >= 0.0)) throw input_error("epsilon_bound: alpha must be nonnegative");
  if (2.0 * alpha >= 1.0)
    throw divergence_error("C(alpha) undefined: 2*alpha >= 1");
  double exponent = 0.0;
  int last = 0;
  for (const GEntry& e : g) {
    if (e.k > 170) throw input_error("epsilon_bound: k too large for binary64");
    exponent += (e.value + e.tail) / (2.0 * factorial(e.k));
    last = std::max(last, e.k);
  }
  last = std::max(last, 1);
  if (env.variant() == Envelope::Variant::explicit_list) {
    for (int k = last + 1; k <= env.max_k(); ++k)
      exponent += exponent_term(k, env, alpha).value;  // finite, exact
  } else {
    exponent += detail::exponent_tail(env, alpha, last);
  }
  if (!std::isfinite(exponent))
    throw divergence_error("epsilon_bound: exponent sum diverged");
  return 2.0 * m * alpha * std::exp(exponent);
}

enum class Verdict { scalable, not_scalable, inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::scalable: return "scalable";
    case Verdict::not_scalable: return "not_scalable";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

// scalable iff the bound is strictly below the threshold; absent or
// non-finite bounds are inconclusive.
inline Verdict verdict(std::optional<double> epsilon, double epsilon0) {
  if (!(epsilon0 > 0.0)) throw input_error("verdict: epsilon0 must be positive");
  if (!epsilon.has_value() || !std::isfinite(*epsilon))
    return Verdict::inconclusive;
  if (*epsilon < 0.0) throw input_error("verdict: epsilon must be nonnegative");
  return *epsilon < epsilon0 ? Verdict::scalable : Verdict::not_scalable;
}

struct BoundOptions {
  double epsilon0 = kDefaultEpsilon0;
  double alpha0 = kDefaultAlpha0;
  double rel_tol = kDefaultSeriesRelTol;
  int tail_depth = kDefaultTailDepth;
  int zeta_terms = kDefaultZetaTerms;
};

struct BoundReport {
  double alpha = 0.0;
  int m = 1;
  std::vector<GEntry> g;                 // k = 1..profile.k_max
  Certified exponent_sum{};              // the exponent behind `epsilon`
  std::optional<double> epsilon;         // certified bound driving the verdict
  std::optional<double> epsilon_series;  // direct truncated-series evaluation
  double epsilon0 = kDefaultEpsilon0;
  double alpha0 = kDefaultAlpha0;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> caveats;
};

namespace detail {

inline const char* kCaveatAlphaTooLarge =
    "2*alpha >= 1: C(alpha) undefined, the bound gives no information";
inline const char* kCaveatEnvelopeAsserted = "envelope asserted beyond k_max";

inline void fill_g_list(BoundReport& rep, const EtaProfile& profile,
                        const Envelope& env, double rel_tol) {
  for (int k = 1; k <= profile.k_max; ++k) {
    const Certified g = g_coefficient(k, env, rep.alpha, rel_tol);
    rep.g.push_back({k, g.value, g.tail});
  }
}

inline BoundReport bound_report_base(const EtaProfile& profile,
                                     const Envelope& env, int m,
                                     const BoundOptions& opt) {
  if (m < 1) throw input_error("bound report: m must be >= 1");
  BoundReport rep;
  rep.m = m;
  rep.epsilon0 = opt.epsilon0;
  rep.alpha0 = opt.alpha0;
  rep.alpha = fit_alpha(profile, env);
  if (2.0 * rep.alpha >= 1.0) {
    rep.verdict = Verdict::inconclusive;
    rep.caveats.push_back(kCaveatAlphaTooLarge);
    return rep;
  }
  fill_g_list(rep, profile, env, opt.rel_tol);
  if (rep.alpha > 0.0 && env.max_k() > profile.k_max)
    rep.caveats.push_back(kCaveatEnvelopeAsserted);
  return rep;
}

inline Certified series_exponent(const EtaProfile& profile, const Envelope& env,
                                 double alpha, const BoundOptions& opt) {
  const int k_trunc = std::min(profile.k_max + opt.tail_depth, env.max_k());
  return exponent_sum(env, alpha, k_trunc, opt.rel_tol);
}

}  // namespace detail

// Evaluates the bound for an arbitrary envelope: eps is the truncated-series
// exponent with envelope-ceiling tails, no closed form assumed.
inline BoundReport general_envelope_bound(const EtaProfile& profile,
                                          const Envelope& env, int m,
                                          const BoundOptions& opt = {}) {
  BoundReport rep = detail::bound_report_base(profile, env, m, opt);
  if (2.0 * rep.alpha >= 1.0) return rep;
  rep.exponent_sum = detail::series_exponent(profile, env, rep.alpha, opt);
  const double eps = 2.0 * m * rep.alpha * std::exp(rep.exponent_sum.upper());
  rep.epsilon = eps;
  rep.epsilon_series = eps;
  rep.verdict = verdict(rep.epsilon, opt.epsilon0);
  return rep;
}

// f_k = 1 closed form: every g_k is at most C(alpha) and
// sum_k 1/(2 k!) = (e-1)/2, so eps = 2 m alpha exp(C(alpha) (e-1)/2).
// The direct series evaluation is recorded alongside for comparison;
// neither value dominates the other by construction.
inline BoundReport constant_envelope_bound(const EtaProfile& profile, int m,
                                           const BoundOptions& opt = {}) {
  const Envelope env = Envelope::constant_one();
  BoundReport rep = detail::bound_report_base(profile, env, m, opt);
  if (2.0 * rep.alpha >= 1.0) return rep;
  const double exponent =
      c_alpha(rep.alpha) * 0.5 * (std::numbers::e - 1.0);
  rep.exponent_sum = {exponent, 0.0};
  rep.epsilon = 2.0 * m * rep.alpha * std::exp(exponent);
  rep.epsilon_series =
      2.0 * m * rep.alpha *
      std::exp(detail::series_exponent(profile, env, rep.alpha, opt).upper());
  rep.verdict = verdict(rep.epsilon, opt.epsilon0);
  return rep;
}

// f_k = k!/k^p closed form (p > 1): g_k <= (k!/k^p) C(alpha) turns the
// exponent into C(alpha) sum_k 1/(2 k^p), evaluated with the integral tail.
inline BoundReport factorial_power_bound(const EtaProfile& profile, double p,
                                         int m, const BoundOptions& opt = {}) {
  if (!(p > 1.0))
    throw input_error("factorial_power_bound: p must be > 1");
  const Envelope env = Envelope::factorial_power(p);
  BoundReport rep = detail::bound_report_base(profile, env, m, opt);
  if (2.0 * rep.alpha >= 1.0) return rep;
  const Certified zeta = zeta_partial(p, opt.zeta_terms);
  const double c = c_alpha(rep.alpha);
  rep.exponent_sum = {0.5 * c * zeta.value, 0.5 * c * zeta.tail};
  rep.epsilon = 2.0 * m * rep.alpha * std::exp(rep.exponent_sum.upper());
  rep.epsilon_series =
      2.0 * m * rep.alpha *
      std::exp(detail::series_exponent(profile, env, rep.alpha, opt).upper());
  rep.verdict = verdict(rep.epsilon, opt.epsilon0);
  return rep;
}

}  // namespace noisebound
