// Command-line front end: analyze a declared noise model, verify the bound
// on an explicit instance, or sweep a parameter. Exit codes: 0 success,
// 1 verified bound violation, 2 config rejected, 3 numerical or resource
// failure.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "noisebound/config.hpp"
#include "noisebound/report.hpp"

namespace nb = noisebound;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string csv_path;
  bool quiet = false;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_outputs(const nb::RunReport& report, const CommonArgs& args) {
  if (!args.out_path.empty()) {
    nlohmann::json j = nb::to_json(report);
    j["generated_at"] = utc_timestamp();
    std::ofstream out(args.out_path);
    if (!out) throw nb::config_error("--out: cannot open '" + args.out_path + "'");
    out << j.dump(2) << '\n';
  }
  if (!args.csv_path.empty() && report.sweep) {
    std::ofstream out(args.csv_path);
    if (!out) throw nb::config_error("--csv: cannot open '" + args.csv_path + "'");
    out << nb::render_sweep_csv(*report.sweep);
  }
  if (!args.quiet) {
    if (report.sweep)
      std::cout << nb::render_sweep_csv(*report.sweep);
    else
      std::cout << nb::render_text(report);
  }
}

nb::BoundReport dispatch_bound(const nb::EtaProfile& profile,
                               const nb::Envelope& envelope, int m,
                               const nb::BoundOptions& opt) {
  switch (envelope.variant()) {
    case nb::Envelope::Variant::constant_one:
      return nb::constant_envelope_bound(profile, m, opt);
    case nb::Envelope::Variant::factorial_power:
      return nb::factorial_power_bound(profile, envelope.power(), m, opt);
    case nb::Envelope::Variant::explicit_list:
      return nb::general_envelope_bound(profile, envelope, m, opt);
  }
  throw nb::input_error("unknown envelope variant");
}

nb::BoundOptions options_from(const nb::Config& cfg) {
  nb::BoundOptions opt;
  opt.epsilon0 = cfg.epsilon0;
  opt.alpha0 = cfg.alpha0;
  return opt;
}

int cmd_analyze(const CommonArgs& args) {
  const nb::Config cfg = nb::load_config(args.config_path);
  const nb::NoiseModel model = nb::make_noise_model(cfg);

  nb::RunReport report;
  report.mode = "analyze";
  report.config_hash = cfg.canonical_hash;

  int code = nb::kExitOk;
  try {
    report.profile =
        nb::eta_profile(model, model.coupling.k_max, cfg.enumeration_budget);
    report.bound = dispatch_bound(*report.profile, cfg.envelope, cfg.m,
                                  options_from(cfg));
    if (!report.bound->epsilon) code = nb::kExitNumerical;
  } catch (const std::exception& e) {
    nb::BoundReport failed;
    failed.m = cfg.m;
    failed.epsilon0 = cfg.epsilon0;
    failed.alpha0 = cfg.alpha0;
    failed.caveats.push_back(e.what());
    report.bound = std::move(failed);
    code = nb::kExitNumerical;
  }

  write_outputs(report, args);
  if (code == nb::kExitNumerical)
    std::cerr << "noisebound: numerical precondition failed\n";
  return code;
}

int cmd_verify(const CommonArgs& args) {
  const nb::Config cfg = nb::load_config(args.config_path);
  if (!cfg.verify) throw nb::config_error("verify: section required");

  nb::RunReport report;
  report.mode = "verify";
  report.config_hash = cfg.canonical_hash;

  nb::VerifySummary summary;
  summary.profile = nb::instance_eta_profile(cfg.verify->instance);
  summary.bound = nb::instance_bound(cfg.verify->instance, options_from(cfg));
  summary.results = nb::verify_instance(cfg.verify->instance,
                                        cfg.verify->max_r, options_from(cfg));
  const bool violation = nb::has_conclusive_violation(summary.results);
  report.verify = std::move(summary);

  write_outputs(report, args);
  if (violation) {
    std::cerr << "noisebound: bound violated by a conclusive instance\n";
    return nb::kExitViolation;
  }
  return nb::kExitOk;
}

nb::NoiseModel sweep_model(const nb::Config& cfg, const std::string& parameter,
                           double value) {
  nb::NoiseModel model = nb::make_noise_model(cfg);
  if (parameter == "t0") {
    model.t0 = value;
  } else {  // lambda_scale
    if (model.coupling.variant == nb::CouplingSpec::Variant::table) {
      for (auto& [set, norm] : model.coupling.table) norm *= value;
    } else {
      for (auto& amplitude : model.coupling.amplitudes) amplitude *= value;
    }
  }
  return model;
}

int cmd_sweep(const CommonArgs& args) {
  const nb::Config cfg = nb::load_config(args.config_path);
  if (!cfg.sweep) throw nb::config_error("sweep: section required");
  nb::make_noise_model(cfg);  // layout/coupling presence check up front

  nb::RunReport report;
  report.mode = "sweep";
  report.config_hash = cfg.canonical_hash;
  report.sweep_parameter = cfg.sweep->parameter;

  std::vector<nb::SweepRow> rows;
  for (double value : cfg.sweep->values) {
    nb::SweepRow row;
    row.value = value;
    try {
      const nb::NoiseModel model = sweep_model(cfg, cfg.sweep->parameter, value);
      if (!nb::validate(model).empty())
        throw nb::input_error("model invalid at this sweep point");
      const nb::EtaProfile profile =
          nb::eta_profile(model, model.coupling.k_max, cfg.enumeration_budget);
      const nb::BoundReport bound =
          dispatch_bound(profile, cfg.envelope, cfg.m, options_from(cfg));
      row.alpha = bound.alpha;
      row.epsilon = bound.epsilon;
      row.verdict = bound.verdict;
    } catch (const std::exception&) {
      row.verdict = nb::Verdict::inconclusive;  // point failed, run continues
    }
    rows.push_back(row);
  }
  report.sweep = std::move(rows);

  write_outputs(report, args);
  return nb::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scalability bounds for k-local correlated Hamiltonian noise"};
  app.require_subcommand(1);
  app.set_version_flag("--version", nb::kVersion);

  CommonArgs analyze_args, verify_args, sweep_args;
  auto add_common = [](CLI::App* sub, CommonArgs& args) {
    sub->add_option("config", args.config_path, "config file (JSON)")
        ->required();
    sub->add_option("--out", args.out_path, "write the structured report here");
    sub->add_flag("--quiet", args.quiet, "suppress stdout output");
  };

  CLI::App* analyze =
      app.add_subcommand("analyze", "evaluate the noise-strength bound");
  add_common(analyze, analyze_args);
  CLI::App* verify =
      app.add_subcommand("verify", "check the bound on an explicit instance");
  add_common(verify, verify_args);
  CLI::App* sweep =
      app.add_subcommand("sweep", "re-evaluate the bound over a parameter");
  add_common(sweep, sweep_args);
  sweep->add_option("--csv", sweep_args.csv_path, "write the sweep table here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_analyze(analyze_args);
    if (verify->parsed()) return cmd_verify(verify_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
  } catch (const nb::config_error& e) {
    std::cerr << "noisebound: " << e.what() << '\n';
    return nb::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "noisebound: " << e.what() << '\n';
    return nb::kExitNumerical;
  }
  return nb::kExitOk;
}
