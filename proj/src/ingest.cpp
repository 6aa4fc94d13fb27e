#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string_view>
#include <variant>

#include "keyvalue.hpp"
#include "reachfit/pipeline.hpp"

namespace reachfit {

namespace {

constexpr std::string_view kHeader = "trial_id,t,gx,gy,gz,rx,ry,rz,ox,oy,oz";
constexpr double kGapFactor = 1.5;
constexpr double kUniformTolerance = 0.01;

[[noreturn]] void parse_error(std::size_t line, std::size_t column, const std::string& what) {
  fail(ErrorCode::ParseError,
       "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

struct RawTrial {
  std::string id;
  std::vector<double> t;
  std::vector<std::array<double, 9>> values;
};

Point3 lerp(const Point3& a, const Point3& b, double w) { return a + w * (b - a); }

// Linear resampling of every stream onto t0 + k * step.
void resample(HandoverTrial& trial, double step) {
  const std::vector<double> t = trial.object.timestamps;
  const auto n = static_cast<std::size_t>(std::floor((t.back() - t.front()) / step + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) grid[k] = t.front() + static_cast<double>(k) * step;
  for (Trajectory* traj : {&trial.giver_hand, &trial.receiver_hand, &trial.object}) {
    std::vector<Point3> out(n);
    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k) {
      while (j + 2 < t.size() && t[j + 1] < grid[k]) ++j;
      const double w = std::clamp((grid[k] - t[j]) / (t[j + 1] - t[j]), 0.0, 1.0);
      out[k] = lerp(traj->positions[j], traj->positions[j + 1], w);
    }
    traj->timestamps = grid;
    traj->positions = std::move(out);
  }
}

// Builds a trial or explains why it has to be excluded.
std::variant<HandoverTrial, Exclusion> finish_trial(RawTrial raw) {
  auto exclude = [&](ErrorCode code, const std::string& why) {
    return Exclusion{raw.id, code, std::string(to_string(code)) + ": " + why};
  };
  const std::size_t n = raw.t.size();
  if (n < 2) return exclude(ErrorCode::ValidationError, "fewer than 2 samples");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(raw.t[i])) return exclude(ErrorCode::MissingData, "missing timestamp");
    for (double v : raw.values[i]) {
      if (!std::isfinite(v)) {
        return exclude(ErrorCode::MissingData,
                       "missing marker data at t=" + detail::format_double(raw.t[i]));
      }
    }
  }
  std::vector<double> steps(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    steps[i - 1] = raw.t[i] - raw.t[i - 1];
    if (!(steps[i - 1] > 0.0)) {
      return exclude(ErrorCode::ValidationError, "timestamps are not strictly increasing");
    }
  }
  std::vector<double> sorted = steps;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i] > kGapFactor * median) {
      return exclude(ErrorCode::MissingData,
                     "gap of " + detail::format_double(steps[i]) + " s after t=" +
                         detail::format_double(raw.t[i]));
    }
  }

  HandoverTrial trial;
  trial.trial_id = raw.id;
  for (Trajectory* traj : {&trial.giver_hand, &trial.receiver_hand, &trial.object}) {
    traj->timestamps = raw.t;
    traj->positions.resize(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = raw.values[i];
    trial.giver_hand.positions[i] = Point3(v[0], v[1], v[2]);
    trial.receiver_hand.positions[i] = Point3(v[3], v[4], v[5]);
    trial.object.positions[i] = Point3(v[6], v[7], v[8]);
  }

  const double mean = (raw.t.back() - raw.t.front()) / static_cast<double>(n - 1);
  const bool uniform = std::all_of(steps.begin(), steps.end(), [&](double s) {
    return std::abs(s - mean) <= kUniformTolerance * mean;
  });
  if (!uniform) {
    resample(trial, median);
    try {
      validate_uniform(trial.object);
    } catch (const Error& e) {
      return exclude(ErrorCode::ValidationError,
                     std::string("non-uniform timing after resampling: ") + e.what());
    }
  }
  return trial;
}

}  // namespace

Dataset parse_canonical_csv(std::istream& in) {
  std::string line;
  std::size_t number = 0;
  if (!std::getline(in, line)) parse_error(1, 1, "empty input");
  ++number;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) parse_error(1, 1, "expected header " + std::string(kHeader));

  Dataset data;
  std::set<std::string> finished;
  std::optional<RawTrial> current;
  auto close_current = [&] {
    if (!current) return;
    finished.insert(current->id);
    auto built = finish_trial(std::move(*current));
    if (auto* t = std::get_if<HandoverTrial>(&built)) {
      data.trials.push_back(std::move(*t));
    } else {
      data.exclusions.push_back(std::get<Exclusion>(std::move(built)));
    }
    current.reset();
  };

  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::string_view rest(line);
    std::array<std::string_view, 11> fields;
    std::array<std::size_t, 11> columns{};
    std::size_t count = 0, offset = 0;
    while (true) {
      const auto comma = rest.find(',');
      if (count == fields.size()) parse_error(number, offset + 1, "too many fields");
      fields[count] = rest.substr(0, comma);
      columns[count] = offset + 1;
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
      offset += comma + 1;
    }
    if (count != fields.size()) {
      parse_error(number, line.size() + 1,
                  "expected 11 fields, found " + std::to_string(count));
    }
    const std::string id(fields[0]);
    if (id.empty()) parse_error(number, 1, "empty trial_id");

    std::array<double, 10> values{};
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const std::string_view s = fields[f];
      if (s.empty()) {
        values[f - 1] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), values[f - 1]);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        parse_error(number, columns[f], "invalid number '" + std::string(s) + "'");
      }
    }

    if (!current || current->id != id) {
      if (finished.count(id) != 0) {
        parse_error(number, 1, "rows of trial '" + id + "' are not contiguous");
      }
      close_current();
      current.emplace();
      current->id = id;
    }
    current->t.push_back(values[0]);
    std::array<double, 9> xyz;
    std::copy(values.begin() + 1, values.end(), xyz.begin());
    current->values.push_back(xyz);
  }
  close_current();
  if (in.bad()) fail(ErrorCode::IoError, "read failed");
  return data;
}

void write_canonical_csv(std::ostream& out, std::span<const HandoverTrial> trials) {
  using detail::format_double;
  out << kHeader << '\n';
  for (const auto& trial : trials) {
    const std::size_t n = trial.object.size();
    if (trial.giver_hand.size() != n || trial.receiver_hand.size() != n) {
      fail(ErrorCode::ValidationError, trial.trial_id + ": marker streams are not co-sampled");
    }
    for (std::size_t i = 0; i < n; ++i) {
      out << trial.trial_id << ',' << format_double(trial.object.timestamps[i]);
      for (const Trajectory* traj : {&trial.giver_hand, &trial.receiver_hand, &trial.object}) {
        for (int a = 0; a < 3; ++a) out << ',' << format_double(traj->positions[i][a]);
      }
      out << '\n';
    }
  }
}

namespace {

using Adapter = std::function<Dataset(std::istream&)>;

const std::map<std::string, Adapter>& adapters() {
  static const std::map<std::string, Adapter> registry = {
      {"canonical", parse_canonical_csv},
  };
  return registry;
}

}  // namespace

std::vector<std::string> ingest_formats() {
  std::vector<std::string> out;
  for (const auto& [name, _] : adapters()) out.push_back(name);
  return out;
}

Dataset ingest(const std::string& path, const std::string& format) {
  const auto it = adapters().find(format);
  if (it == adapters().end()) fail(ErrorCode::ConfigError, "unknown input format '" + format + "'");
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  return it->second(in);
}

}  // namespace reachfit
