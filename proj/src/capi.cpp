#include "reachfit/reachfit.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "reachfit/pipeline.hpp"
#include "reachfit/report.hpp"
#include "reachfit/synth.hpp"

struct rf_config {
  reachfit::PipelineConfig cfg;
};
struct rf_dataset {
  reachfit::Dataset data;
};
struct rf_results {
  reachfit::AnalysisResult result;
};

namespace {

thread_local std::string last_error;

rf_status status_of(reachfit::ErrorCode code) {
  return static_cast<rf_status>(static_cast<int>(code) + 1);
}

template <typename F>
rf_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return RF_OK;
  } catch (const reachfit::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return RF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return RF_ERR_INTERNAL;
  }
}

rf_status invalid(const char* what) {
  last_error = what;
  return RF_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* rf_last_error(void) { return last_error.c_str(); }

const char* rf_status_string(rf_status status) {
  if (status == RF_OK) return "OK";
  if (status == RF_ERR_INVALID_ARGUMENT) return "InvalidArgument";
  if (status == RF_ERR_INTERNAL) return "Internal";
  if (status > RF_OK && status <= RF_ERR_IO) {
    return reachfit::to_string(static_cast<reachfit::ErrorCode>(static_cast<int>(status) - 1));
  }
  return "Unknown";
}

const char* rf_version(void) { return REACHFIT_VERSION; }

rf_status rf_config_create(rf_config** out) {
  if (out == nullptr) return invalid("null output pointer");
  return guarded([&] { *out = new rf_config{}; });
}

rf_status rf_config_load(const char* path, rf_config** out) {
  if (path == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { *out = new rf_config{reachfit::load_config(path)}; });
}

rf_status rf_config_set(rf_config* cfg, const char* key, const char* value) {
  if (cfg == nullptr || key == nullptr || value == nullptr) return invalid("null argument");
  return guarded([&] {
    reachfit::PipelineConfig next = cfg->cfg;
    reachfit::set_config_value(next, key, value);
    reachfit::validate(next);
    cfg->cfg = std::move(next);
  });
}

rf_status rf_config_serialize(const rf_config* cfg, char* buf, size_t size, size_t* needed) {
  if (cfg == nullptr) return invalid("null config");
  return guarded([&] {
    std::ostringstream os;
    reachfit::write_config(os, cfg->cfg);
    const std::string s = os.str();
    if (needed != nullptr) *needed = s.size() + 1;
    if (buf != nullptr && size > 0) {
      const size_t n = std::min(size - 1, s.size());
      std::memcpy(buf, s.data(), n);
      buf[n] = '\0';
    }
  });
}

void rf_config_free(rf_config* cfg) { delete cfg; }

rf_status rf_dataset_load(const char* path, const char* format, rf_dataset** out) {
  if (path == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    *out = new rf_dataset{reachfit::ingest(path, format == nullptr ? "canonical" : format)};
  });
}

size_t rf_dataset_trial_count(const rf_dataset* data) {
  return data == nullptr ? 0 : data->data.trials.size();
}

size_t rf_dataset_exclusion_count(const rf_dataset* data) {
  return data == nullptr ? 0 : data->data.exclusions.size();
}

const char* rf_dataset_exclusion_id(const rf_dataset* data, size_t index) {
  if (data == nullptr || index >= data->data.exclusions.size()) return nullptr;
  return data->data.exclusions[index].trial_id.c_str();
}

const char* rf_dataset_exclusion_reason(const rf_dataset* data, size_t index) {
  if (data == nullptr || index >= data->data.exclusions.size()) return nullptr;
  return data->data.exclusions[index].reason.c_str();
}

void rf_dataset_free(rf_dataset* data) { delete data; }

rf_status rf_analyze(const rf_dataset* data, const rf_config* cfg, rf_results** out) {
  if (data == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    const reachfit::PipelineConfig c = cfg == nullptr ? reachfit::PipelineConfig{} : cfg->cfg;
    *out = new rf_results{reachfit::analyze(data->data, c)};
  });
}

rf_status rf_results_write(const rf_results* results, const char* dir, rf_format format) {
  if (results == nullptr || dir == nullptr) return invalid("null argument");
  std::optional<reachfit::ReportFormat> only;
  switch (format) {
    case RF_FORMAT_ALL: break;
    case RF_FORMAT_JSON: only = reachfit::ReportFormat::Json; break;
    case RF_FORMAT_CSV: only = reachfit::ReportFormat::Csv; break;
    case RF_FORMAT_MARKDOWN: only = reachfit::ReportFormat::Markdown; break;
    default: return invalid("unknown report format");
  }
  return guarded([&] { reachfit::write_reports(results->result, dir, only); });
}

size_t rf_results_trial_count(const rf_results* results) {
  return results == nullptr ? 0 : results->result.trials.size();
}

size_t rf_results_exclusion_count(const rf_results* results) {
  return results == nullptr ? 0 : results->result.exclusions.size();
}

const char* rf_results_trial_id(const rf_results* results, size_t index) {
  if (results == nullptr || index >= results->result.trials.size()) return nullptr;
  return results->result.trials[index].trial_id.c_str();
}

rf_status rf_results_path_errors(const rf_results* results, size_t index, double errors_mm[3]) {
  if (results == nullptr || errors_mm == nullptr) return invalid("null argument");
  if (index >= results->result.trials.size()) return invalid("trial index out of range");
  const auto& e = results->result.trials[index].path_error_mm;
  for (int i = 0; i < 3; ++i) errors_mm[i] = e[static_cast<size_t>(i)];
  last_error.clear();
  return RF_OK;
}

rf_status rf_results_best_model(const rf_results* results, size_t index, rf_model* model) {
  if (results == nullptr || model == nullptr) return invalid("null argument");
  if (index >= results->result.trials.size()) return invalid("trial index out of range");
  *model = static_cast<rf_model>(results->result.trials[index].best_model());
  last_error.clear();
  return RF_OK;
}

rf_status rf_results_conic_class(const rf_results* results, size_t index, rf_conic_class* cls) {
  if (results == nullptr || cls == nullptr) return invalid("null argument");
  if (index >= results->result.trials.size()) return invalid("trial index out of range");
  *cls = static_cast<rf_conic_class>(results->result.trials[index].conic_class);
  last_error.clear();
  return RF_OK;
}

rf_status rf_results_mean_errors(const rf_results* results, double mean_mm[3]) {
  if (results == nullptr || mean_mm == nullptr) return invalid("null argument");
  for (int i = 0; i < 3; ++i) mean_mm[i] = results->result.summary.error_stats[static_cast<size_t>(i)].mean;
  last_error.clear();
  return RF_OK;
}

void rf_results_free(rf_results* results) { delete results; }

rf_status rf_synth_generate(const char* spec_path, size_t n, const char* out_dir) {
  if (spec_path == nullptr || out_dir == nullptr) return invalid("null argument");
  return guarded([&] {
    const reachfit::DatasetSpec spec = reachfit::load_dataset_spec(spec_path);
    std::vector<reachfit::HandoverTrial> trials;
    std::vector<reachfit::SynthTruth> truth;
    trials.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      reachfit::SynthTrial t = reachfit::generate_trial(reachfit::sample_spec(spec, i));
      trials.push_back(std::move(t.trial));
      truth.push_back(std::move(t.truth));
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) reachfit::fail(reachfit::ErrorCode::IoError, std::string("cannot create ") + out_dir);
    const std::filesystem::path dir(out_dir);
    std::ofstream csv(dir / "trials.csv", std::ios::binary);
    std::ofstream truth_csv(dir / "truth.csv", std::ios::binary);
    if (!csv || !truth_csv) reachfit::fail(reachfit::ErrorCode::IoError, "cannot write into " + dir.string());
    reachfit::write_canonical_csv(csv, trials);
    reachfit::write_truth_csv(truth_csv, truth);
    if (!csv || !truth_csv) reachfit::fail(reachfit::ErrorCode::IoError, "write failed in " + dir.string());
  });
}

rf_status rf_fit_conic(const double* xy, size_t n, double coeffs[6]) {
  if (xy == nullptr || coeffs == nullptr) return invalid("null argument");
  return guarded([&] {
    std::vector<reachfit::Point2> pts(n);
    for (size_t i = 0; i < n; ++i) pts[i] = reachfit::Point2(xy[2 * i], xy[2 * i + 1]);
    const reachfit::ConicCoeffs c = reachfit::fit_conic(pts).coefficients_mm();
    for (int i = 0; i < 6; ++i) coeffs[i] = c[i];
  });
}

rf_status rf_classify_conic(const double coeffs[6], double tol, rf_conic_class* cls) {
  if (coeffs == nullptr || cls == nullptr) return invalid("null argument");
  return guarded([&] {
    reachfit::ConicCoeffs c;
    for (int i = 0; i < 6; ++i) c[i] = coeffs[i];
    *cls = static_cast<rf_conic_class>(reachfit::classify_conic(reachfit::make_conic(c), tol));
  });
}

rf_status rf_min_jerk_coefficients(double p0, double pf, double duration, double coeffs[6]) {
  if (coeffs == nullptr) return invalid("null argument");
  return guarded([&] {
    reachfit::AxisBoundary bc;
    bc.p0 = p0;
    bc.pf = pf;
    const reachfit::Quintic q = reachfit::solve_quintic(bc, duration);
    for (int i = 0; i < 6; ++i) coeffs[i] = q.coeffs[static_cast<size_t>(i)];
  });
}

}  // extern "C"
