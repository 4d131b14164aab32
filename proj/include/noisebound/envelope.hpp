#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "noisebound/errors.hpp"
#include "noisebound/numeric.hpp"

namespace noisebound {

// The f_k family hypothesized to dominate the per-anchor noise sums:
// eta_tilde[k] <= f_k * alpha^k. Three shapes are supported:
//   constant_one:    f_k = 1
//   factorial_power: f_k = k!/k^p with p >= 1
//   explicit_list:   user-supplied positive values; finitely supported, so
//                    series treat f_k = 0 beyond the list while direct
//                    queries past the end are rejected.
class Envelope {
 public:
  enum class Variant { constant_one, factorial_power, explicit_list };

  static Envelope constant_one() { return Envelope(Variant::constant_one); }

  static Envelope factorial_power(double p) {
    if (!(p >= 1.0)) throw input_error("Envelope: factorial_power needs p >= 1");
    Envelope e(Variant::factorial_power);
    e.p_ = p;
    return e;
  }

  static Envelope explicit_list(std::vector<double> f) {
    if (f.empty()) throw input_error("Envelope: explicit list is empty");
    for (double v : f)
      if (!(v > 0.0) || !std::isfinite(v))
        throw input_error("Envelope: explicit entries must be positive and finite");
    Envelope e(Variant::explicit_list);
    e.f_ = std::move(f);
    return e;
  }

  Variant variant() const { return variant_; }
  double power() const { return p_; }
  const std::vector<double>& values() const { return f_; }

  // f_k for k >= 1. Explicit lists reject queries past their end.
  double value(int k) const {
    if (k < 1) throw input_error("Envelope: k must be >= 1");
    switch (variant_) {
      case Variant::constant_one:
        return 1.0;
      case Variant::factorial_power:
        return factorial(k) * std::pow(static_cast<double>(k), -p_);
      case Variant::explicit_list:
        if (k > static_cast<int>(f_.size()))
          throw input_error("Envelope: k beyond explicit list");
        return f_[static_cast<std::size_t>(k - 1)];
    }
    return 0.0;  // unreachable
  }

  // Largest k with a declared value; unbounded for the analytic shapes.
  int max_k() const {
    return variant_ == Variant::explicit_list
               ? static_cast<int>(f_.size())
               : std::numeric_limits<int>::max();
  }

 private:
  explicit Envelope(Variant v) : variant_(v) {}

  Variant variant_ = Variant::constant_one;
  double p_ = 0.0;
  std::vector<double> f_;
};

}  // namespace noisebound
