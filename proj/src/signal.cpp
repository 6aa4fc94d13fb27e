#include "reachfit/signal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "reachfit/error.hpp"

namespace reachfit {

double Trajectory::step() const {
  if (size() < 2) return 0.0;
  return duration() / static_cast<double>(size() - 1);
}

Trajectory Trajectory::slice(std::size_t first, std::size_t last) const {
  Trajectory out;
  out.timestamps.assign(timestamps.begin() + first, timestamps.begin() + last + 1);
  out.positions.assign(positions.begin() + first, positions.begin() + last + 1);
  return out;
}

Trajectory Trajectory::select(const std::vector<bool>& mask) const {
  Trajectory out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!mask[i]) continue;
    out.timestamps.push_back(timestamps[i]);
    out.positions.push_back(positions[i]);
  }
  return out;
}

void validate_uniform(const Trajectory& traj) {
  if (traj.size() < 2 || traj.positions.size() != traj.size()) {
    fail(ErrorCode::BadSampling, "trajectory needs at least 2 samples");
  }
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (!std::isfinite(traj.timestamps[i]) || !traj.positions[i].allFinite()) {
      fail(ErrorCode::BadSampling, "non-finite sample at index " + std::to_string(i));
    }
  }
  const double h = traj.step();
  if (!(h > 0.0)) fail(ErrorCode::BadSampling, "timestamps not increasing");
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double d = traj.timestamps[i] - traj.timestamps[i - 1];
    if (std::abs(d - h) > 0.01 * h) {
      fail(ErrorCode::BadSampling,
           "non-uniform step at index " + std::to_string(i));
    }
  }
}

const char* to_string(ReachCase c) {
  return c == ReachCase::Case1 ? "Case1" : "Case2";
}

void validate(const InlierConfig& cfg) {
  if (!(cfg.delta_pct > 0.0 && cfg.delta_pct <= 100.0) || !(cfg.delta_mm > 0.0) ||
      !(cfg.sigma_k > 0.0)) {
    fail(ErrorCode::ConfigError,
         "inlier config requires 0 < delta_pct <= 100, delta_mm > 0, sigma_k > 0");
  }
}

std::size_t SegmentedReach::inlier_count() const {
  return static_cast<std::size_t>(
      std::count(inlier_mask.begin(), inlier_mask.end(), true));
}

namespace {

// Transposed direct form II biquad; a0 normalised to 1. First-order sections
// leave b2 = a2 = 0.
struct Section {
  double b0, b1, b2, a1, a2;
};

std::vector<Section> butterworth_lowpass(int order, double cutoff_hz,
                                         double sample_hz) {
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_hz);
  const double k2 = k * k;
  std::vector<Section> sections;
  for (int i = 0; i < order / 2; ++i) {
    const double q =
        1.0 / (2.0 * std::sin((2 * i + 1) * std::numbers::pi / (2.0 * order)));
    const double norm = 1.0 / (1.0 + k / q + k2);
    const double b0 = k2 * norm;
    sections.push_back({b0, 2.0 * b0, b0, 2.0 * (k2 - 1.0) * norm,
                        (1.0 - k / q + k2) * norm});
  }
  if (order % 2 == 1) {
    const double norm = 1.0 / (1.0 + k);
    sections.push_back({k * norm, k * norm, 0.0, (k - 1.0) * norm, 0.0});
  }
  return sections;
}

// Runs the cascade in place, starting every section in the steady state of a
// constant input equal to x[0].
void run_cascade(const std::vector<Section>& sections, std::vector<double>& x) {
  for (const auto& s : sections) {
    const double c = x.front();
    double z2 = (s.b2 - s.a2) * c;
    double z1 = (s.b1 - s.a1) * c + z2;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
}

std::vector<double> filtfilt(const std::vector<Section>& sections,
                             const std::vector<double>& x, std::size_t order) {
  const std::size_t n = x.size();
  const std::size_t pad = std::min(n - 1, 3 * (order + 1));
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  run_cascade(sections, ext);
  std::reverse(ext.begin(), ext.end());
  run_cascade(sections, ext);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

bool is_local_min(const std::vector<double>& s, std::size_t i) {
  return i > 0 && i + 1 < s.size() && s[i] < s[i - 1] && s[i] <= s[i + 1];
}

std::size_t first_index_at_or_after(const std::vector<double>& t, double time) {
  return static_cast<std::size_t>(
      std::lower_bound(t.begin(), t.end(), time - 1e-12) - t.begin());
}

std::size_t last_index_at_or_before(const std::vector<double>& t, double time) {
  auto it = std::upper_bound(t.begin(), t.end(), time + 1e-12);
  return static_cast<std::size_t>(it - t.begin()) - 1;
}

constexpr double kMinPeakSpeed = 10.0;  // mm/s

// Steps longer than this multiple of the median step are recording gaps.
constexpr double kGapFactor = 1.5;

void check_for_gaps(const Trajectory& traj, const char* name) {
  if (traj.size() < 2) fail(ErrorCode::MissingData, std::string(name) + " is empty");
  std::vector<double> steps;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    steps.push_back(traj.timestamps[i] - traj.timestamps[i - 1]);
  }
  std::vector<double> sorted = steps;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i] > kGapFactor * median) {
      fail(ErrorCode::MissingData, std::string(name) + " has a gap after t=" +
                                       std::to_string(traj.timestamps[i]));
    }
  }
  for (const auto& p : traj.positions) {
    if (!p.allFinite()) {
      fail(ErrorCode::MissingData, std::string(name) + " has missing positions");
    }
  }
}

}  // namespace

Trajectory lowpass_filter(const Trajectory& traj, double cutoff_hz, int order) {
  validate_uniform(traj);
  if (order < 1) fail(ErrorCode::BadCutoff, "filter order must be >= 1");
  const double fs = 1.0 / traj.step();
  if (!(cutoff_hz > 0.0) || cutoff_hz >= 0.5 * fs) {
    fail(ErrorCode::BadCutoff, "cutoff must lie in (0, Nyquist)");
  }
  const auto sections = butterworth_lowpass(order, cutoff_hz, fs);

  Trajectory out = traj;
  std::vector<double> axis(traj.size());
  for (int a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < traj.size(); ++i) axis[i] = traj.positions[i][a];
    const auto filtered = filtfilt(sections, axis, static_cast<std::size_t>(order));
    for (std::size_t i = 0; i < traj.size(); ++i) out.positions[i][a] = filtered[i];
  }
  return out;
}

SpeedProfile speed_profile(const Trajectory& traj) {
  const std::size_t n = traj.size();
  if (n < 3) fail(ErrorCode::TooShort, "speed profile needs at least 3 samples");
  const auto& t = traj.timestamps;
  const auto& p = traj.positions;
  SpeedProfile out;
  out.timestamps = t;
  out.speeds.resize(n);
  out.speeds[0] = ((p[1] - p[0]) / (t[1] - t[0])).norm();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out.speeds[i] = ((p[i + 1] - p[i - 1]) / (t[i + 1] - t[i - 1])).norm();
  }
  out.speeds[n - 1] = ((p[n - 1] - p[n - 2]) / (t[n - 1] - t[n - 2])).norm();
  return out;
}

double min_distance_time(const Trajectory& a, const Trajectory& b,
                         std::optional<std::pair<double, double>> window) {
  const std::size_t n = std::min(a.size(), b.size());
  double best = std::numeric_limits<double>::infinity();
  double best_t = n > 0 ? a.timestamps[0] : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a.timestamps[i];
    if (window && (t < window->first - 1e-12 || t > window->second + 1e-12)) continue;
    const double d = (a.positions[i] - b.positions[i]).norm();
    if (d < best) {
      best = d;
      best_t = t;
    }
  }
  return best_t;
}

ReachStart detect_reach_start(const SpeedProfile& speed, double t_ogc,
                              double t_rgc) {
  const auto& t = speed.timestamps;
  const auto& s = speed.speeds;
  if (!(t_ogc < t_rgc) || t.empty()) {
    fail(ErrorCode::DegenerateProfile, "reach window is empty");
  }
  const std::size_t lo = first_index_at_or_after(t, t_ogc);
  const std::size_t hi = last_index_at_or_before(t, t_rgc);
  if (lo >= t.size() || hi < lo) {
    fail(ErrorCode::DegenerateProfile, "reach window holds no samples");
  }

  std::size_t peak = lo;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (s[i] > s[peak]) peak = i;
  }
  const double peak_speed = s[peak];
  if (peak_speed < kMinPeakSpeed) {
    fail(ErrorCode::DegenerateProfile, "peak speed below 10 mm/s");
  }

  // Contiguous region around the peak above 70% of the peak speed.
  const double fast = 0.7 * peak_speed;
  std::size_t left = peak;
  while (left > lo && s[left - 1] > fast) --left;
  std::size_t right = peak;
  while (right < hi && s[right + 1] > fast) ++right;
  for (std::size_t i = left + 1; i < right; ++i) {
    if (is_local_min(s, i)) return {t[i], ReachCase::Case2};
  }

  const double slow = 0.5 * peak_speed;
  for (std::size_t i = peak; i-- > lo;) {
    if (s[i] < slow && is_local_min(s, i)) return {t[i], ReachCase::Case1};
  }
  return {t_ogc, ReachCase::Case1};
}

InlierResult inlier_filter(const Trajectory& segment, const InlierConfig& cfg) {
  validate(cfg);
  const std::size_t n = segment.size();
  if (n < 10) fail(ErrorCode::TooShort, "inlier filter needs at least 10 samples");
  const auto& p = segment.positions;

  std::size_t peak = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (p[i].z() > p[peak].z()) peak = i;
  }
  // First point, scanning back from the peak, at least delta_mm below it.
  // Falls back to the first sample when the segment never drops that far.
  std::size_t anchor = 0;
  for (std::size_t i = peak + 1; i-- > 0;) {
    if (p[i].z() <= p[peak].z() - cfg.delta_mm) {
      anchor = i;
      break;
    }
  }

  const auto width = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(cfg.delta_pct / 100.0 * static_cast<double>(n))),
      3, n);
  std::size_t first = anchor >= width / 2 ? anchor - width / 2 : 0;
  first = std::min(first, n - width);

  const std::span<const Point3> window(p.data() + first, width);
  const Plane window_plane = fit_plane(window);
  std::vector<double> residuals(n);
  for (std::size_t i = 0; i < n; ++i) {
    residuals[i] = (p[i] - window_plane.origin).dot(window_plane.normal);
  }
  const std::span<const double> spread =
      cfg.sigma_source == SigmaSource::Window
          ? std::span<const double>(residuals.data() + first, width)
          : std::span<const double>(residuals);
  double mean = 0.0;
  for (double r : spread) mean += r;
  mean /= static_cast<double>(spread.size());
  double sum_sq = 0.0;
  for (double r : spread) sum_sq += (r - mean) * (r - mean);
  // Floor keeps exactly planar input from being rejected by rounding noise.
  constexpr double kSigmaFloor = 1e-6;  // mm
  const double sigma =
      std::max(std::sqrt(sum_sq / static_cast<double>(spread.size() - 1)), kSigmaFloor);

  InlierResult out;
  out.mask.resize(n);
  std::vector<Point3> kept;
  for (std::size_t i = 0; i < n; ++i) {
    out.mask[i] = std::abs(residuals[i]) <= cfg.sigma_k * sigma;
    if (out.mask[i]) kept.push_back(p[i]);
  }
  out.plane = kept.size() >= 3 ? fit_plane(kept) : window_plane;
  return out;
}

SegmentedReach segment_trial(const HandoverTrial& trial, const SegmentConfig& cfg) {
  try {
    check_for_gaps(trial.giver_hand, "giver hand");
    check_for_gaps(trial.receiver_hand, "receiver hand");
    check_for_gaps(trial.object, "object");
    if (trial.giver_hand.timestamps != trial.object.timestamps ||
        trial.receiver_hand.timestamps != trial.object.timestamps) {
      fail(ErrorCode::ValidationError, "marker streams are not co-sampled");
    }

    // A zero cutoff leaves the raw samples untouched.
    auto smooth = [&](const Trajectory& t) {
      if (cfg.cutoff_hz == 0.0) {
        validate_uniform(t);
        return t;
      }
      return lowpass_filter(t, cfg.cutoff_hz, cfg.filter_order);
    };
    const Trajectory giver = smooth(trial.giver_hand);
    const Trajectory receiver = smooth(trial.receiver_hand);
    const Trajectory object = smooth(trial.object);

    SegmentedReach reach;
    reach.t_ogc = min_distance_time(giver, object);
    reach.t_rgc = min_distance_time(giver, receiver,
                                    std::pair{reach.t_ogc, giver.end_time()});
    const ReachStart start =
        detect_reach_start(speed_profile(object), reach.t_ogc, reach.t_rgc);
    reach.t_start = start.t_start;
    reach.t_end = reach.t_rgc;
    reach.case_label = start.case_label;

    const Trajectory& marker = cfg.marker == SegmentMarker::Object ? object : giver;
    const std::size_t first = first_index_at_or_after(marker.timestamps, reach.t_start);
    const std::size_t last = last_index_at_or_before(marker.timestamps, reach.t_end);
    if (last < first + 9) fail(ErrorCode::TooShort, "reach segment shorter than 10 samples");
    reach.segment = marker.slice(first, last);

    InlierResult inliers = inlier_filter(reach.segment, cfg.inlier);
    reach.inlier_mask = std::move(inliers.mask);
    reach.plane = inliers.plane;
    if (2 * reach.inlier_count() < reach.segment.size()) {
      fail(ErrorCode::InsufficientInliers, "fewer than 50% of segment samples are coplanar");
    }
    return reach;
  } catch (const Error& e) {
    throw Error(e.code(), trial.trial_id + ": " + e.what());
  }
}

}  // namespace reachfit
