// reachfit command line driver: analyze, synth and validate.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "reachfit/reachfit.h"

namespace {

// 0 success, 1 parse or IO failure, 2 configuration problem.
int exit_code(rf_status s) {
  switch (s) {
    case RF_OK: return 0;
    case RF_ERR_CONFIG:
    case RF_ERR_BAD_SPEC:
    case RF_ERR_INVALID_ARGUMENT: return 2;
    default: return 1;
  }
}

int report_failure(rf_status s) {
  std::fprintf(stderr, "reachfit: %s\n", rf_last_error());
  return exit_code(s);
}

int run_analyze(const std::string& input, const std::string& config, const std::string& out,
                const std::string& format, int jobs) {
  rf_format fmt = RF_FORMAT_ALL;
  if (format == "json") fmt = RF_FORMAT_JSON;
  else if (format == "csv") fmt = RF_FORMAT_CSV;
  else if (format == "md") fmt = RF_FORMAT_MARKDOWN;
  else if (!format.empty()) {
    std::fprintf(stderr, "reachfit: unknown format '%s' (json|csv|md)\n", format.c_str());
    return 2;
  }

  rf_config* cfg = nullptr;
  rf_status s = config.empty() ? rf_config_create(&cfg) : rf_config_load(config.c_str(), &cfg);
  if (s != RF_OK) return report_failure(s);
  if (jobs > 0) {
    s = rf_config_set(cfg, "jobs", std::to_string(jobs).c_str());
    if (s != RF_OK) {
      rf_config_free(cfg);
      return report_failure(s);
    }
  }

  rf_dataset* data = nullptr;
  s = rf_dataset_load(input.c_str(), "canonical", &data);
  if (s != RF_OK) {
    rf_config_free(cfg);
    return report_failure(s);
  }
  rf_results* results = nullptr;
  s = rf_analyze(data, cfg, &results);
  if (s == RF_OK) s = rf_results_write(results, out.c_str(), fmt);
  const int code = s == RF_OK ? 0 : report_failure(s);
  if (s == RF_OK) {
    std::fprintf(stderr, "reachfit: %zu trials analysed, %zu excluded\n",
                 rf_results_trial_count(results), rf_results_exclusion_count(results));
  }
  rf_results_free(results);
  rf_dataset_free(data);
  rf_config_free(cfg);
  return code;
}

int run_validate(const std::string& input) {
  rf_dataset* data = nullptr;
  const rf_status s = rf_dataset_load(input.c_str(), "canonical", &data);
  if (s != RF_OK) return report_failure(s);
  std::printf("%zu valid trials, %zu excluded\n", rf_dataset_trial_count(data),
              rf_dataset_exclusion_count(data));
  for (size_t i = 0; i < rf_dataset_exclusion_count(data); ++i) {
    std::printf("excluded %s: %s\n", rf_dataset_exclusion_id(data, i),
                rf_dataset_exclusion_reason(data, i));
  }
  rf_dataset_free(data);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segment handover reaches and compare Conic, DMJ and MJ fits"};
  app.set_version_flag("--version", rf_version());
  app.require_subcommand(1);

  std::string input, config, out, format, spec;
  int jobs = 0;
  std::size_t count = 1;

  auto* analyze = app.add_subcommand("analyze", "Analyze trials and write reports");
  analyze->add_option("--input", input, "Canonical trial CSV")->required();
  analyze->add_option("--config", config, "Pipeline config file (defaults when omitted)");
  analyze->add_option("--out", out, "Output directory")->required();
  analyze->add_option("--format", format, "Write only json, csv or md");
  analyze->add_option("--jobs", jobs, "Worker threads (overrides config)")
      ->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "Generate synthetic trials");
  synth->add_option("--spec", spec, "Synthetic dataset spec file")->required();
  synth->add_option("--n", count, "Number of trials")->required();
  synth->add_option("--out", out, "Output directory")->required();

  auto* validate = app.add_subcommand("validate", "Check a trial CSV without analysing it");
  validate->add_option("--input", input, "Canonical trial CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*analyze) return run_analyze(input, config, out, format, jobs);
  if (*synth) {
    const rf_status s = rf_synth_generate(spec.c_str(), count, out.c_str());
    return s == RF_OK ? 0 : report_failure(s);
  }
  return run_validate(input);
}
