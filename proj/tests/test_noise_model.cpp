#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "noisebound/noise_model.hpp"
#include "support/oracles.hpp"

using namespace noisebound;

namespace {

NoiseModel table_model(int count, std::map<std::vector<int>, double> table,
                       int k_max = 3, double t0 = 1.0) {
  NoiseModel model;
  model.layout.count = count;
  model.coupling.variant = CouplingSpec::Variant::table;
  model.coupling.k_max = k_max;
  model.coupling.table = std::move(table);
  model.t0 = t0;
  return model;
}

NoiseModel random_table_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(2, 6);
  std::uniform_real_distribution<double> norm(0.0, 0.2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = count(rng);
  std::map<std::vector<int>, double> table;
  for (int i = 0; i < n; ++i) {
    if (unit(rng) < 0.8) table[{i}] = norm(rng);
    for (int j = i + 1; j < n; ++j) {
      if (unit(rng) < 0.6) table[{i, j}] = norm(rng);
      for (int k = j + 1; k < n; ++k)
        if (unit(rng) < 0.2) table[{i, j, k}] = norm(rng);
    }
  }
  return table_model(n, std::move(table));
}

}  // namespace

TEST_CASE("term_norm: table lookup and canonicalization") {
  const auto model = table_model(3, {{{0, 1}, 0.01}});
  const std::vector<int> direct{0, 1};
  const std::vector<int> swapped{1, 0};
  CHECK(term_norm(model, direct) == 0.01);
  CHECK(term_norm(model, swapped) == 0.01);  // unordered-set semantics
  const std::vector<int> absent{0, 2};
  CHECK(term_norm(model, absent) == 0.0);
}

TEST_CASE("term_norm: parametric kernel evaluation") {
  NoiseModel model;
  model.layout.count = 3;
  model.layout.positions = {{0.0}, {2.0}, {5.0}};
  model.coupling.variant = CouplingSpec::Variant::parametric;
  model.coupling.k_max = 2;
  model.coupling.amplitudes = {0.005, 0.01};
  model.coupling.kernel = {KernelType::exponential, 1.0};

  const std::vector<int> pair{0, 1};  // distance 2
  CHECK_THAT(term_norm(model, pair),
             Catch::Matchers::WithinRel(0.01 * std::exp(-2.0), 1e-14));

  const std::vector<int> singleton{2};  // diameter 0, kernel(0) = 1
  CHECK(term_norm(model, singleton) == 0.005);

  model.coupling.kernel = {KernelType::power_law, 2.0};
  CHECK_THAT(term_norm(model, pair),
             Catch::Matchers::WithinRel(0.01 / 9.0, 1e-14));
}

TEST_CASE("term_norm: errors and k beyond k_max") {
  const auto model = table_model(3, {{{0, 1}, 0.01}}, 2);
  const std::vector<int> triple{0, 1, 2};
  CHECK(term_norm(model, triple) == 0.0);  // beyond k_max: identically zero
  const std::vector<int> bad{0, 7};
  CHECK_THROWS_AS(term_norm(model, bad), input_error);
  const std::vector<int> repeated{1, 1};
  CHECK_THROWS_AS(term_norm(model, repeated), input_error);
  const std::vector<int> empty;
  CHECK_THROWS_AS(term_norm(model, empty), input_error);
}

TEST_CASE("eta_profile: hand-enumerated pair example") {
  // Anchor sums: q0: 0.01+0.02, q1: 0.01+0.03, q2: 0.02+0.03 -> max 0.05.
  const auto model = table_model(
      3, {{{0, 1}, 0.01}, {{0, 2}, 0.02}, {{1, 2}, 0.03}});
  const auto profile = eta_profile(model, 3);
  CHECK_THAT(profile.set_sum(2), Catch::Matchers::WithinAbs(0.05, 1e-15));
  CHECK_THAT(profile.tilde(2), Catch::Matchers::WithinAbs(0.05, 1e-15));
  CHECK(profile.tilde(1) == 0.0);
  CHECK(profile.tilde(3) == 0.0);
}

TEST_CASE("eta_profile: single 3-set picks up the (k-1)! factor") {
  const auto model = table_model(
      3, {{{0, 1}, 0.01}, {{0, 2}, 0.02}, {{1, 2}, 0.03}, {{0, 1, 2}, 0.001}});
  const auto profile = eta_profile(model, 3);
  CHECK_THAT(profile.set_sum(3), Catch::Matchers::WithinAbs(0.001, 1e-18));
  CHECK_THAT(profile.tilde(3), Catch::Matchers::WithinAbs(0.002, 1e-18));
}

TEST_CASE("eta_profile: all-zero couplings") {
  const auto model = table_model(4, {});
  const auto profile = eta_profile(model, 3);
  for (int k = 1; k <= 3; ++k) CHECK(profile.tilde(k) == 0.0);
}

TEST_CASE("eta_profile: parametric enumeration matches direct summation") {
  NoiseModel model;
  model.layout.count = 4;
  model.layout.positions = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  model.coupling.variant = CouplingSpec::Variant::parametric;
  model.coupling.k_max = 3;
  model.coupling.amplitudes = {0.01, 0.02, 0.005};
  model.coupling.kernel = {KernelType::exponential, 0.7};

  const auto profile = eta_profile(model, 3);
  for (int k = 1; k <= 3; ++k) {
    const double expected = nbtest::ordered_tuple_eta_tilde(model, k);
    CHECK_THAT(profile.tilde(k), Catch::Matchers::WithinRel(expected, 1e-12));
  }
}

TEST_CASE("eta_profile: enumeration budget names the offending k") {
  NoiseModel model;
  model.layout.count = 6;
  model.coupling.variant = CouplingSpec::Variant::parametric;
  model.coupling.k_max = 3;
  model.coupling.amplitudes = {0.01, 0.01, 0.01};
  model.coupling.kernel = {KernelType::exponential, 0.0};
  CHECK_THROWS_WITH(eta_profile(model, 3, 5),
                    Catch::Matchers::ContainsSubstring("k=1"));
  CHECK_THROWS_AS(eta_profile(model, 3, 5), resource_error);
}

TEST_CASE("eta_profile: pre-condition on k_max") {
  const auto model = table_model(3, {}, 2);
  CHECK_THROWS_AS(eta_profile(model, 3), input_error);
}

TEST_CASE("ordered-tuple sum equals (k-1)! times the set sum") {
  std::mt19937_64 rng(20260809);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = random_table_model(rng);
    const int k_top = std::min(3, model.layout.count);
    const auto profile = eta_profile(model, k_top);
    for (int k = 1; k <= k_top; ++k) {
      const double ordered = nbtest::ordered_tuple_eta_tilde(model, k);
      if (ordered == 0.0) {
        CHECK(profile.tilde(k) == 0.0);
      } else {
        CHECK_THAT(profile.tilde(k),
                   Catch::Matchers::WithinRel(ordered, 1e-12));
      }
    }
  }
}

TEST_CASE("eta_profile: linear in t0, exactly for power-of-two scales") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto model = random_table_model(rng);
    const auto base = eta_profile(model, 3);
    for (double scale : {0.5, 2.0, 4.0}) {
      auto scaled = model;
      scaled.t0 = model.t0 * scale;
      const auto result = eta_profile(scaled, 3);
      for (int k = 1; k <= 3; ++k)
        CHECK(result.tilde(k) == scale * base.tilde(k));
    }
  }
}

TEST_CASE("eta_profile: monotone in every table norm") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    auto model = random_table_model(rng);
    if (model.coupling.table.empty()) continue;
    const auto before = eta_profile(model, 3);
    std::uniform_int_distribution<std::size_t> pick(
        0, model.coupling.table.size() - 1);
    auto it = model.coupling.table.begin();
    std::advance(it, static_cast<long>(pick(rng)));
    it->second += 0.05;
    const auto after = eta_profile(model, 3);
    for (int k = 1; k <= 3; ++k) CHECK(after.tilde(k) >= before.tilde(k));
  }
}

TEST_CASE("eta profile invariant: tilde = (k-1)! * set") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 20; ++trial) {
    const auto profile = eta_profile(random_table_model(rng), 3);
    for (int k = 1; k <= 3; ++k)
      CHECK(profile.tilde(k) == factorial(k - 1) * profile.set_sum(k));
  }
}

TEST_CASE("validate: well-formed models pass") {
  const auto model = table_model(3, {{{0, 1}, 0.01}});
  CHECK(validate(model).empty());
}

TEST_CASE("validate: out-of-range table index is named") {
  const auto model = table_model(3, {{{0, 5}, 0.01}});
  const auto issues = validate(model);
  REQUIRE(issues.size() == 1);
  CHECK_THAT(issues.front(),
             Catch::Matchers::ContainsSubstring("coupling.table[0]"));
}

TEST_CASE("validate: parametric kernel without positions") {
  NoiseModel model;
  model.layout.count = 3;
  model.coupling.variant = CouplingSpec::Variant::parametric;
  model.coupling.k_max = 2;
  model.coupling.amplitudes = {0.01, 0.02};
  model.coupling.kernel = {KernelType::exponential, 1.0};
  const auto issues = validate(model);
  REQUIRE(issues.size() == 1);
  CHECK_THAT(issues.front(),
             Catch::Matchers::ContainsSubstring("positions required"));

  // A constant kernel never needs geometry.
  model.coupling.kernel.parameter = 0.0;
  CHECK(validate(model).empty());
}

TEST_CASE("validate: negative norms and bad t0") {
  auto model = table_model(3, {{{0, 1}, -0.5}});
  model.t0 = 0.0;
  const auto issues = validate(model);
  CHECK(issues.size() == 2);
}
