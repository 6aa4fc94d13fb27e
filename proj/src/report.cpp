#include "reachfit/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "keyvalue.hpp"

namespace reachfit {

using json = nlohmann::ordered_json;

namespace {

constexpr std::array<const char*, 3> kModelKeys = {"conic", "dmj", "mj"};
constexpr std::array<const char*, 3> kModelTitles = {"Conic", "Decoupled Min Jerk", "Min Jerk"};
constexpr std::array<const char*, 3> kClassKeys = {"ellipse", "hyperbola", "parabola"};

ErrorCode error_code_from(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::IoError); ++i) {
    if (s == to_string(static_cast<ErrorCode>(i))) return static_cast<ErrorCode>(i);
  }
  fail(ErrorCode::ParseError, "unknown error code '" + s + "'");
}

ConicClass conic_class_from(const std::string& s) {
  for (int i = 0; i < 3; ++i) {
    if (s == kClassKeys[static_cast<std::size_t>(i)]) return static_cast<ConicClass>(i);
  }
  fail(ErrorCode::ParseError, "unknown conic class '" + s + "'");
}

ReachCase case_from(const std::string& s) {
  if (s == to_string(ReachCase::Case1)) return ReachCase::Case1;
  if (s == to_string(ReachCase::Case2)) return ReachCase::Case2;
  fail(ErrorCode::ParseError, "unknown reach case '" + s + "'");
}

const char* class_key(ConicClass c) { return kClassKeys[static_cast<std::size_t>(c)]; }
const char* model_key(ModelKind k) { return kModelKeys[static_cast<std::size_t>(k)]; }

// JSON has no infinity; such values are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json trial_json(const TrialReport& t) {
  json j;
  j["trial_id"] = t.trial_id;
  j["case"] = to_string(t.case_label);
  j["t_ogc"] = t.t_ogc;
  j["t_rgc"] = t.t_rgc;
  j["t_start"] = t.t_start;
  j["t_end"] = t.t_end;
  j["n_samples"] = t.n_samples;
  j["n_inliers"] = t.n_inliers;
  j["plane_normal"] = {t.plane_normal.x(), t.plane_normal.y(), t.plane_normal.z()};
  j["conic_coefficients"] = json::array();
  for (int i = 0; i < 6; ++i) j["conic_coefficients"].push_back(t.conic_mm[i]);
  j["conic_class"] = class_key(t.conic_class);
  j["circle"] = t.circle;
  j["dmj_ratio"] = t.dmj_ratio;
  json errors;
  for (ModelKind k : kAllModels) errors[model_key(k)] = t.path_error_mm[static_cast<std::size_t>(k)];
  j["path_error_mm"] = errors;
  j["temporal_error_mm"] = {{"dmj", t.dmj_temporal_error_mm}, {"mj", t.mj_temporal_error_mm}};
  j["best_model"] = model_key(t.best_model());
  return j;
}

TrialReport trial_from_json(const json& j) {
  TrialReport t;
  t.trial_id = j.at("trial_id").get<std::string>();
  t.case_label = case_from(j.at("case").get<std::string>());
  t.t_ogc = j.at("t_ogc").get<double>();
  t.t_rgc = j.at("t_rgc").get<double>();
  t.t_start = j.at("t_start").get<double>();
  t.t_end = j.at("t_end").get<double>();
  t.n_samples = j.at("n_samples").get<std::size_t>();
  t.n_inliers = j.at("n_inliers").get<std::size_t>();
  const auto& n = j.at("plane_normal");
  t.plane_normal = Eigen::Vector3d(n.at(0).get<double>(), n.at(1).get<double>(), n.at(2).get<double>());
  for (int i = 0; i < 6; ++i) {
    t.conic_mm[i] = j.at("conic_coefficients").at(static_cast<std::size_t>(i)).get<double>();
  }
  t.conic_class = conic_class_from(j.at("conic_class").get<std::string>());
  t.circle = j.at("circle").get<bool>();
  t.dmj_ratio = j.at("dmj_ratio").get<double>();
  for (ModelKind k : kAllModels) {
    t.path_error_mm[static_cast<std::size_t>(k)] = j.at("path_error_mm").at(model_key(k)).get<double>();
  }
  t.dmj_temporal_error_mm = j.at("temporal_error_mm").at("dmj").get<double>();
  t.mj_temporal_error_mm = j.at("temporal_error_mm").at("mj").get<double>();
  return t;
}

json summary_json(const AnalysisResult& r) {
  const ComparisonResult& s = r.summary;
  json j;
  j["n_trials"] = s.n_trials;
  json models;
  for (ModelKind k : kAllModels) {
    const auto i = static_cast<std::size_t>(k);
    models[model_key(k)] = {{"mean_mm", s.error_stats[i].mean},
                            {"std_mm", s.error_stats[i].std},
                            {"max_mm", s.error_stats[i].max},
                            {"best_fit_count", s.best_fit_counts[i]},
                            {"best_fit_percent", s.best_fit_percent(k)}};
  }
  j["models"] = models;
  json classes;
  for (int c = 0; c < 3; ++c) {
    const auto cls = static_cast<ConicClass>(c);
    classes[class_key(cls)] = {{"count", s.conic_class_counts[static_cast<std::size_t>(c)]},
                               {"percent", s.class_percent(cls)}};
  }
  j["conic_classes"] = classes;
  j["circle_count"] = s.circle_count;
  std::size_t case2 = 0;
  for (const auto& t : r.trials) case2 += t.case_label == ReachCase::Case2 ? 1 : 0;
  j["case2_count"] = case2;
  if (s.anova) {
    j["anova"] = {{"f", number(s.anova->f)},
                  {"df_between", s.anova->df_between},
                  {"df_within", s.anova->df_within},
                  {"p", s.anova->p}};
  } else {
    j["anova"] = nullptr;
    j["anova_note"] = s.anova_note;
  }
  j["pairwise"] = json::array();
  for (const auto& p : s.pairwise) {
    json pj;
    pj["a"] = model_key(p.a);
    pj["b"] = model_key(p.b);
    if (p.test) {
      pj["t"] = number(p.test->t);
      pj["df"] = p.test->df;
      pj["p"] = p.test->p;
      pj["p_bonferroni"] = p.p_bonferroni;
    } else {
      pj["note"] = p.note;
    }
    j["pairwise"].push_back(pj);
  }
  auto ratio = [](const RatioStats& rs) {
    return json{{"n", rs.n}, {"mean", rs.mean}, {"std", rs.std}};
  };
  j["dmj_over_conic_when_conic_best"] = ratio(s.dmj_over_conic);
  j["conic_over_dmj_when_dmj_best"] = ratio(s.conic_over_dmj);
  return j;
}

std::string fixed(double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string p_value(double p) {
  if (p < 0.0005) return "< 0.0005";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", p);
  return std::string("= ") + buf;
}

std::string percent(std::size_t count, std::size_t total) {
  return total == 0 ? "0.0%" : fixed(100.0 * static_cast<double>(count) / static_cast<double>(total), 1) + "%";
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "md") return ReportFormat::Markdown;
  fail(ErrorCode::ConfigError, "unknown report format '" + name + "' (json|csv|md)");
}

void write_json_report(std::ostream& out, const AnalysisResult& result) {
  json j;
  json cfg;
  for (const auto& [k, v] : config_entries(result.config)) cfg[k] = v;
  j["config"] = cfg;
  j["input_count"] = result.input_count;
  j["trials"] = json::array();
  for (const auto& t : result.trials) j["trials"].push_back(trial_json(t));
  j["exclusions"] = json::array();
  for (const auto& e : result.exclusions) {
    j["exclusions"].push_back({{"trial_id", e.trial_id}, {"code", to_string(e.code)}, {"reason", e.reason}});
  }
  j["summary"] = summary_json(result);
  out << j.dump(2) << '\n';
}

void write_trials_csv(std::ostream& out, const AnalysisResult& result) {
  using detail::format_double;
  out << "trial_id,case,t_ogc,t_rgc,t_start,t_end,n_samples,n_inliers,"
         "conic_error_mm,dmj_error_mm,mj_error_mm,best_model,conic_class,circle,dmj_ratio,"
         "dmj_temporal_error_mm,mj_temporal_error_mm,A,B,C,D,E,F\n";
  for (const auto& t : result.trials) {
    out << t.trial_id << ',' << to_string(t.case_label) << ',' << format_double(t.t_ogc) << ','
        << format_double(t.t_rgc) << ',' << format_double(t.t_start) << ','
        << format_double(t.t_end) << ',' << t.n_samples << ',' << t.n_inliers;
    for (ModelKind k : kAllModels) {
      out << ',' << format_double(t.path_error_mm[static_cast<std::size_t>(k)]);
    }
    out << ',' << model_key(t.best_model()) << ',' << class_key(t.conic_class) << ','
        << (t.circle ? 1 : 0) << ',' << format_double(t.dmj_ratio) << ','
        << format_double(t.dmj_temporal_error_mm) << ',' << format_double(t.mj_temporal_error_mm);
    for (int i = 0; i < 6; ++i) out << ',' << format_double(t.conic_mm[i]);
    out << '\n';
  }
}

void write_summary_markdown(std::ostream& out, const AnalysisResult& result) {
  const ComparisonResult& s = result.summary;
  const std::size_t n = s.n_trials;
  out << "# Reach model comparison\n\n";
  out << "Trials analysed: " << n << " of " << result.input_count << " ("
      << result.exclusions.size() << " excluded)\n\n";

  out << "## Fitting error\n\n";
  out << "| |";
  for (const char* m : kModelTitles) out << ' ' << m << " |";
  out << "\n|---|---:|---:|---:|\n";
  auto row = [&](const char* label, auto field) {
    out << "| " << label << " |";
    for (const auto& st : s.error_stats) out << ' ' << fixed(field(st), 1) << " |";
    out << '\n';
  };
  row("Mean (mm)", [](const SummaryStats& st) { return st.mean; });
  row("Std. Deviation (mm)", [](const SummaryStats& st) { return st.std; });
  row("Max (mm)", [](const SummaryStats& st) { return st.max; });

  out << "\n## Best fitting model\n\n| Model | Trials | Share |\n|---|---:|---:|\n";
  for (ModelKind k : kAllModels) {
    const auto i = static_cast<std::size_t>(k);
    out << "| " << kModelTitles[i] << " | " << s.best_fit_counts[i] << " | "
        << percent(s.best_fit_counts[i], n) << " |\n";
  }
  out << "\nWhen Conic fits best, the Decoupled Min Jerk error is "
      << fixed(s.dmj_over_conic.mean, 1) << " ± " << fixed(s.dmj_over_conic.std, 1)
      << " times larger (" << s.dmj_over_conic.n << " trials).\n";
  out << "When Decoupled Min Jerk fits best, the Conic error is "
      << fixed(s.conic_over_dmj.mean, 1) << " ± " << fixed(s.conic_over_dmj.std, 1)
      << " times larger (" << s.conic_over_dmj.n << " trials).\n";

  out << "\n## Conic classes\n\n| Class | Trials | Share |\n|---|---:|---:|\n";
  constexpr std::array<const char*, 3> titles = {"Elliptical", "Hyperbolic", "Parabolic"};
  for (std::size_t c = 0; c < 3; ++c) {
    out << "| " << titles[c] << " | " << s.conic_class_counts[c] << " | "
        << percent(s.conic_class_counts[c], n) << " |\n";
  }
  out << "\nCircles (counted as elliptical): " << s.circle_count << "\n";

  std::size_t case2 = 0;
  for (const auto& t : result.trials) case2 += t.case_label == ReachCase::Case2 ? 1 : 0;
  out << "\n## Reach onset\n\n| Case | Trials | Share |\n|---|---:|---:|\n";
  out << "| Case 1 | " << n - case2 << " | " << percent(n - case2, n) << " |\n";
  out << "| Case 2 | " << case2 << " | " << percent(case2, n) << " |\n";

  out << "\n## Statistics\n\n";
  if (s.anova) {
    out << "Repeated-measures ANOVA: F(" << fixed(s.anova->df_between, 0) << ","
        << fixed(s.anova->df_within, 0) << ") = " << fixed(s.anova->f, 1) << ", p "
        << p_value(s.anova->p) << "\n\n";
  } else {
    out << "Repeated-measures ANOVA " << s.anova_note << "\n\n";
  }
  out << "| Comparison | t | df | p | p (Bonferroni) |\n|---|---:|---:|---:|---:|\n";
  for (const auto& p : s.pairwise) {
    out << "| " << kModelTitles[static_cast<std::size_t>(p.a)] << " vs "
        << kModelTitles[static_cast<std::size_t>(p.b)] << " | ";
    if (p.test) {
      out << fixed(p.test->t, 2) << " | " << fixed(p.test->df, 0) << " | " << p_value(p.test->p)
          << " | " << p_value(p.p_bonferroni) << " |\n";
    } else {
      out << p.note << " | | | |\n";
    }
  }

  if (!result.exclusions.empty()) {
    out << "\n## Exclusions\n\n| Trial | Code | Reason |\n|---|---|---|\n";
    for (const auto& e : result.exclusions) {
      out << "| " << e.trial_id << " | " << to_string(e.code) << " | " << e.reason << " |\n";
    }
  }

  out << "\n## Configuration\n\n```\n";
  write_config(out, result.config);
  out << "```\n";
}

void write_reports(const AnalysisResult& result, const std::string& dir,
                   std::optional<ReportFormat> only) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  auto emit = [&](ReportFormat f, const char* name, auto writer) {
    if (only && *only != f) return;
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path);
    writer(out, result);
    if (!out) fail(ErrorCode::IoError, "write failed for " + path);
  };
  emit(ReportFormat::Json, "report.json", write_json_report);
  emit(ReportFormat::Csv, "trials.csv", write_trials_csv);
  emit(ReportFormat::Markdown, "summary.md", write_summary_markdown);
}

AnalysisResult parse_json_report(std::istream& in) {
  AnalysisResult r;
  try {
    const json j = json::parse(in);
    for (const auto& [k, v] : j.at("config").items()) set_config_value(r.config, k, v.get<std::string>());
    r.input_count = j.at("input_count").get<std::size_t>();
    for (const auto& t : j.at("trials")) r.trials.push_back(trial_from_json(t));
    for (const auto& e : j.at("exclusions")) {
      r.exclusions.push_back({e.at("trial_id").get<std::string>(),
                              error_code_from(e.at("code").get<std::string>()),
                              e.at("reason").get<std::string>()});
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("report: ") + e.what());
  }
  summarize(r);
  return r;
}

AnalysisResult load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  return parse_json_report(in);
}

}  // namespace reachfit
