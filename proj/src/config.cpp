#include <fstream>
#include <ostream>

#include "keyvalue.hpp"
#include "reachfit/pipeline.hpp"

namespace reachfit {

void validate(const PipelineConfig& cfg) {
  auto bad = [](const std::string& what) { fail(ErrorCode::ConfigError, what); };
  if (!(cfg.segment.cutoff_hz >= 0.0)) bad("filter_cutoff_hz must be >= 0");
  if (cfg.segment.filter_order < 1 || cfg.segment.filter_order > 12) {
    bad("filter_order must lie in [1, 12]");
  }
  validate(cfg.segment.inlier);
  if (!(cfg.dmj.ratio_min > 0.0) || !(cfg.dmj.ratio_max >= cfg.dmj.ratio_min) ||
      cfg.dmj.ratio_max > 1.0) {
    bad("DMJ ratio bounds must satisfy 0 < dmj_ratio_min <= dmj_ratio_max <= 1");
  }
  if (cfg.dmj.grid_points < 2) bad("dmj_grid_points must be >= 2");
  if (!(cfg.dmj.ratio_tolerance > 0.0)) bad("dmj_ratio_tolerance must be positive");
  if (!(cfg.parabola_tol >= 0.0)) bad("parabola_tol must be >= 0");
  if (cfg.jobs < 1) bad("jobs must be >= 1");
}

void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  const KeyValue kv{key, value, 0};
  auto choose = [&](std::initializer_list<const char*> options) {
    int i = 0;
    for (const char* o : options) {
      if (value == o) return i;
      ++i;
    }
    std::string expected;
    for (const char* o : options) expected += (expected.empty() ? "" : "|") + std::string(o);
    fail(ErrorCode::ConfigError, key + " expects " + expected + ", got '" + value + "'");
  };

  if (key == "filter_cutoff_hz") cfg.segment.cutoff_hz = to_double(kv);
  else if (key == "filter_order") cfg.segment.filter_order = static_cast<int>(to_uint(kv));
  else if (key == "inlier_delta_pct") cfg.segment.inlier.delta_pct = to_double(kv);
  else if (key == "inlier_delta_mm") cfg.segment.inlier.delta_mm = to_double(kv);
  else if (key == "inlier_sigma_k") cfg.segment.inlier.sigma_k = to_double(kv);
  else if (key == "inlier_sigma_source") {
    cfg.segment.inlier.sigma_source =
        choose({"segment", "window"}) == 0 ? SigmaSource::Segment : SigmaSource::Window;
  }
  else if (key == "marker") {
    cfg.segment.marker = choose({"object", "giver"}) == 0 ? SegmentMarker::Object
                                                          : SegmentMarker::GiverHand;
  } else if (key == "dmj_ratio_min") cfg.dmj.ratio_min = to_double(kv);
  else if (key == "dmj_ratio_max") cfg.dmj.ratio_max = to_double(kv);
  else if (key == "dmj_grid_points") cfg.dmj.grid_points = static_cast<int>(to_uint(kv));
  else if (key == "dmj_ratio_tolerance") cfg.dmj.ratio_tolerance = to_double(kv);
  else if (key == "dmj_axis") {
    cfg.dmj.axis = choose({"world", "plane"}) == 0 ? DecouplingAxis::World
                                                   : DecouplingAxis::PlaneVertical;
  } else if (key == "parabola_tol") cfg.parabola_tol = to_double(kv);
  else if (key == "boundary_mode") {
    cfg.boundary = choose({"rest", "estimated"}) == 0 ? BoundaryMode::RestToRest
                                                      : BoundaryMode::Estimated;
  } else if (key == "error_mode") {
    cfg.error_mode = choose({"full3d", "plane"}) == 0 ? ErrorMode::Full3D : ErrorMode::PlaneOnly;
  } else if (key == "jobs") cfg.jobs = static_cast<unsigned>(to_uint(kv));
  else if (key == "exclude_trials") {
    cfg.exclude_trials.clear();
    std::size_t pos = 0;
    while (pos <= value.size()) {
      const auto comma = value.find(',', pos);
      const std::string id = trim(value.substr(pos, comma == std::string::npos ? comma : comma - pos));
      if (!id.empty()) cfg.exclude_trials.push_back(id);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  } else {
    fail(ErrorCode::ConfigError, "unknown key '" + key + "'");
  }
}

PipelineConfig parse_config(std::istream& in) {
  PipelineConfig cfg;
  for (const auto& kv : detail::parse_key_values(in)) {
    try {
      set_config_value(cfg, kv.key, kv.value);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(kv.line) + ": " + e.what());
    }
  }
  validate(cfg);
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open config " + path);
  return parse_config(in);
}

std::vector<std::pair<std::string, std::string>> config_entries(const PipelineConfig& cfg) {
  using detail::format_double;
  std::string excluded;
  for (const auto& id : cfg.exclude_trials) excluded += (excluded.empty() ? "" : ",") + id;
  return {
      {"filter_cutoff_hz", format_double(cfg.segment.cutoff_hz)},
      {"filter_order", std::to_string(cfg.segment.filter_order)},
      {"inlier_delta_pct", format_double(cfg.segment.inlier.delta_pct)},
      {"inlier_delta_mm", format_double(cfg.segment.inlier.delta_mm)},
      {"inlier_sigma_k", format_double(cfg.segment.inlier.sigma_k)},
      {"inlier_sigma_source",
       cfg.segment.inlier.sigma_source == SigmaSource::Segment ? "segment" : "window"},
      {"marker", cfg.segment.marker == SegmentMarker::Object ? "object" : "giver"},
      {"dmj_ratio_min", format_double(cfg.dmj.ratio_min)},
      {"dmj_ratio_max", format_double(cfg.dmj.ratio_max)},
      {"dmj_grid_points", std::to_string(cfg.dmj.grid_points)},
      {"dmj_ratio_tolerance", format_double(cfg.dmj.ratio_tolerance)},
      {"dmj_axis", cfg.dmj.axis == DecouplingAxis::World ? "world" : "plane"},
      {"parabola_tol", format_double(cfg.parabola_tol)},
      {"boundary_mode", cfg.boundary == BoundaryMode::RestToRest ? "rest" : "estimated"},
      {"error_mode", cfg.error_mode == ErrorMode::Full3D ? "full3d" : "plane"},
      {"jobs", std::to_string(cfg.jobs)},
      {"exclude_trials", excluded},
  };
}

void write_config(std::ostream& out, const PipelineConfig& cfg) {
  for (const auto& [k, v] : config_entries(cfg)) {
    out << k << " =" << (v.empty() ? "" : " ") << v << '\n';
  }
}

}  // namespace reachfit
