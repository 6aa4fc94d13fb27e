#include "reachfit/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>

#include "keyvalue.hpp"
#include "reachfit/error.hpp"

namespace reachfit {

const char* to_string(ReachKind k) {
  switch (k) {
    case ReachKind::Ellipse: return "ellipse";
    case ReachKind::Hyperbola: return "hyperbola";
    case ReachKind::MinJerk: return "mj";
    case ReachKind::DecoupledMinJerk: return "dmj";
  }
  return "?";
}

void validate(const SynthSpec& s) {
  auto bad = [](const char* what) { fail(ErrorCode::BadSpec, what); };
  if (!(s.noise_mm >= 0.0)) bad("noise must be >= 0");
  if (!(s.rate_hz > 20.0)) bad("sampling rate must exceed twice the 10 Hz filter cutoff");
  if (!(s.reach_duration_s > 0.0)) bad("reach duration must be positive");
  if (s.kind == ReachKind::Ellipse || s.kind == ReachKind::Hyperbola) {
    if (!(s.semi_a > 0.0 && s.semi_b > 0.0)) bad("conic semi-axes must be positive");
    if (!(s.arc_start != s.arc_end)) bad("conic arc is empty");
  } else {
    if (!(s.chord_mm > 0.0)) bad("chord must be positive");
  }
  if (s.kind == ReachKind::DecoupledMinJerk && !(s.dmj_ratio > 0.0 && s.dmj_ratio <= 1.0)) {
    bad("DMJ ratio must lie in (0, 1]");
  }
}

PlaneFrame synth_reach_frame(const SynthSpec& spec) {
  const Eigen::Vector3d u(std::cos(spec.plane_yaw), std::sin(spec.plane_yaw), 0.0);
  const Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d side = up.cross(u);
  const Eigen::Vector3d v = std::cos(spec.plane_tilt) * up - std::sin(spec.plane_tilt) * side;
  PlaneFrame f;
  f.rotation.row(0) = u.transpose();
  f.rotation.row(1) = v.transpose();
  f.rotation.row(2) = u.cross(v).transpose();
  f.origin = spec.plane_origin;
  return f;
}

namespace {

using Curve = std::function<Point3(double)>;

// Path speed v(x) = c0 + c1 x + amp sin(pi x) on x in [0, 1] over `duration`,
// or the minimum-jerk bell amp * 30 x^2 (1 - x)^2 when `quintic` is set.
struct SpeedShape {
  double c0 = 0.0, c1 = 0.0, amp = 1.0;
  double duration = 1.0;
  bool quintic = false;

  double length_at(double x) const {
    if (quintic) return duration * amp * x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
    return duration * (c0 * x + 0.5 * c1 * x * x + amp * (1.0 - std::cos(std::numbers::pi * x)) /
                                                           std::numbers::pi);
  }
  void scale_to(double length) {
    const double k = length / length_at(1.0);
    c0 *= k;
    c1 *= k;
    amp *= k;
  }
};

// Arc-length table used to place samples exactly on the curve.
class ArcLength {
 public:
  explicit ArcLength(Curve curve, int samples = 4096) : curve_(std::move(curve)) {
    s_.resize(static_cast<std::size_t>(samples) + 1);
    len_.resize(s_.size());
    Point3 prev = curve_(0.0);
    for (std::size_t i = 0; i < s_.size(); ++i) {
      s_[i] = static_cast<double>(i) / samples;
      const Point3 p = curve_(s_[i]);
      len_[i] = i == 0 ? 0.0 : len_[i - 1] + (p - prev).norm();
      prev = p;
    }
  }

  double total() const { return len_.back(); }

  Point3 at_length(double l) const {
    if (l <= 0.0) return curve_(0.0);
    if (l >= total()) return curve_(1.0);
    const auto it = std::upper_bound(len_.begin(), len_.end(), l);
    const std::size_t i = static_cast<std::size_t>(it - len_.begin());
    const double w = (l - len_[i - 1]) / (len_[i] - len_[i - 1]);
    return curve_(s_[i - 1] + w * (s_[i] - s_[i - 1]));
  }

  Point3 at(double s) const { return curve_(s); }

 private:
  Curve curve_;
  std::vector<double> s_;
  std::vector<double> len_;
};

struct Phase {
  double start = 0.0;
  SpeedShape speed;
  const ArcLength* path = nullptr;
};

double round_to_step(double t, double dt) { return std::max(1.0, std::round(t / dt)) * dt; }

ConicCoeffs axes_to_conic(const Point2& center, double a, double b, double inclination,
                          double sign) {
  const double c = std::cos(inclination), s = std::sin(inclination);
  const double alpha = 1.0 / (a * a);
  const double beta = sign / (b * b);
  const double xc = center.x(), yc = center.y();
  const double A = alpha * c * c + beta * s * s;
  const double B = 2.0 * c * s * (alpha - beta);
  const double C = alpha * s * s + beta * c * c;
  ConicCoeffs out;
  out << A, B, C, -2 * A * xc - B * yc, -B * xc - 2 * C * yc,
      A * xc * xc + B * xc * yc + C * yc * yc - 1.0;
  return canonical_coefficients(out);
}

}  // namespace

SynthTrial generate_trial(const SynthSpec& spec) {
  validate(spec);
  const double dt = 1.0 / spec.rate_hz;
  const PlaneFrame frame = synth_reach_frame(spec);
  const Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d heading = frame.rotation.row(0).transpose();
  const Eigen::Vector3d side = up.cross(heading);

  SynthTruth truth;
  truth.trial_id = spec.trial_id;
  truth.kind = spec.kind;
  truth.case_label = spec.preamble;
  truth.reach_frame = frame;

  Curve reach_curve;
  const double c = std::cos(spec.inclination), s = std::sin(spec.inclination);
  auto plane_point = [&](double x, double y) {
    return lift_from_plane(Point2(spec.conic_center.x() + c * x - s * y,
                                  spec.conic_center.y() + s * x + c * y),
                           frame);
  };
  switch (spec.kind) {
    case ReachKind::Ellipse:
      reach_curve = [&, a = spec.semi_a, b = spec.semi_b](double u) {
        const double th = spec.arc_start + u * (spec.arc_end - spec.arc_start);
        return plane_point(a * std::cos(th), b * std::sin(th));
      };
      truth.conic_mm = axes_to_conic(spec.conic_center, spec.semi_a, spec.semi_b,
                                     spec.inclination, 1.0);
      break;
    case ReachKind::Hyperbola:
      reach_curve = [&, a = spec.semi_a, b = spec.semi_b](double u) {
        const double w = spec.arc_start + u * (spec.arc_end - spec.arc_start);
        return plane_point(a * std::cosh(w), b * std::sinh(w));
      };
      truth.conic_mm = axes_to_conic(spec.conic_center, spec.semi_a, spec.semi_b,
                                     spec.inclination, -1.0);
      break;
    case ReachKind::MinJerk:
    case ReachKind::DecoupledMinJerk: {
      const Point3 p1 = lift_from_plane(Point2(-0.5 * spec.chord_mm, 0.0), frame);
      const Point3 p2 =
          lift_from_plane(Point2(0.5 * spec.chord_mm, 0.0), frame) + spec.rise_mm * up;
      if (spec.kind == ReachKind::MinJerk) {
        reach_curve = [p1, p2](double u) -> Point3 { return p1 + u * (p2 - p1); };
      } else {
        truth.dmj_ratio = spec.dmj_ratio;
        const PlaneFrame axes = decoupling_axes(p1, up);
        const auto model = make_decoupled_min_jerk(p1, p2, 1.0, spec.dmj_ratio, axes, axes);
        reach_curve = [model](double u) { return model.position(u); };
      }
      break;
    }
  }
  const ArcLength reach(reach_curve);
  truth.reach_start = reach.at(0.0);
  truth.reach_end = reach.at(1.0);

  // Reach timing. Case 1 starts from rest; Case 2 enters the reach through a
  // trough at ~80% of peak speed, preceded by a pull-in along the start
  // tangent whose speed slope mirrors the reach's.
  const double T = round_to_step(spec.reach_duration_s, dt);
  SpeedShape reach_speed;
  reach_speed.duration = T;
  if (spec.preamble == ReachCase::Case2) {
    reach_speed.c0 = 1.5;
    reach_speed.c1 = -1.5;
  }
  reach_speed.scale_to(reach.total());

  std::optional<ArcLength> pull_in;
  SpeedShape pull_speed;
  Point3 pick_target = truth.reach_start;
  if (spec.preamble == ReachCase::Case2) {
    const double v_trough = reach_speed.c0;
    const double slope = (std::numbers::pi * reach_speed.amp - v_trough) / T;
    pull_speed.duration = round_to_step(0.35 * T, dt);
    pull_speed.c1 = v_trough;
    pull_speed.amp = (v_trough + pull_speed.duration * slope) / std::numbers::pi;
    const double length = pull_speed.length_at(1.0);
    const Eigen::Vector3d tangent = (reach.at(1e-4) - reach.at(0.0)).normalized();
    const Point3 from = truth.reach_start - length * tangent;
    pick_target = from;
    pull_in.emplace([from, to = truth.reach_start](double u) -> Point3 {
      return from + u * (to - from);
    });
  }

  const Point3 table_point = truth.reach_start - 120.0 * heading + 250.0 * side - 200.0 * up;
  const ArcLength pick_up([table_point, pick_target, up](double u) -> Point3 {
    return table_point + u * (pick_target - table_point) +
           60.0 * std::sin(std::numbers::pi * u) * up;
  });
  SpeedShape pick_speed;
  pick_speed.quintic = true;
  // The pick-up peaks at 60% of the reach peak so the reach owns the profile
  // maximum.
  double reach_peak = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double x = k / 1000.0;
    reach_peak = std::max(reach_peak, reach_speed.c0 + reach_speed.c1 * x +
                                          reach_speed.amp * std::sin(std::numbers::pi * x));
  }
  pick_speed.duration = round_to_step(1.875 * pick_up.total() / (0.6 * reach_peak), dt);
  pick_speed.scale_to(pick_up.total());

  const double t_grasp = round_to_step(0.5, dt);
  std::vector<Phase> phases;
  phases.push_back({t_grasp, pick_speed, &pick_up});
  double t = t_grasp + pick_speed.duration;
  if (pull_in) {
    pull_speed.scale_to(pull_in->total());
    phases.push_back({t, pull_speed, &*pull_in});
    t += pull_speed.duration;
  }
  const double t_start = t;
  phases.push_back({t_start, reach_speed, &reach});
  const double t_end = t_start + T;
  const double t_total = t_end + round_to_step(0.6, dt);

  const auto n = static_cast<std::size_t>(std::llround(t_total / dt)) + 1;
  truth.t_ogc = t_grasp;
  truth.t_start = t_start;
  truth.t_end = t_end;
  truth.start_index = static_cast<std::size_t>(std::llround(t_start / dt));
  truth.end_index = static_cast<std::size_t>(std::llround(t_end / dt));

  const Eigen::Vector3d giver_dir = (-heading + 0.4 * up).normalized();
  const Eigen::Vector3d receiver_dir = heading;
  constexpr double kHandSpeed = 300.0;    // mm/s, receiver approach and giver retreat
  constexpr double kApproachTime = 0.4;   // s, giver hand travel before the grasp
  const Point3 grasp_hand = table_point + 20.0 * giver_dir;
  const Point3 hand_home = grasp_hand + Eigen::Vector3d(-150.0, -250.0, 250.0);
  const Point3 receiver_meet = truth.reach_end + 30.0 * receiver_dir;

  SynthTrial out;
  out.truth = truth;
  HandoverTrial& trial = out.trial;
  trial.trial_id = spec.trial_id;
  for (auto* traj : {&trial.giver_hand, &trial.receiver_hand, &trial.object}) {
    traj->timestamps.resize(n);
    traj->positions.resize(n);
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto jitter = [&] {
    Eigen::Vector3d e(noise(rng), noise(rng), noise(rng));
    return Eigen::Vector3d(spec.noise_mm * e);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double ti = static_cast<double>(i) * dt;
    Point3 object = table_point;
    for (const Phase& ph : phases) {
      if (ti + 1e-12 < ph.start) break;
      const double x = std::min((ti - ph.start) / ph.speed.duration, 1.0);
      object = ph.path->at_length(ph.speed.length_at(x));
    }

    Point3 giver;
    if (ti < t_grasp) {
      const double lead = std::max(t_grasp - ti, 0.0);
      giver = grasp_hand + (hand_home - grasp_hand) * std::min(lead / kApproachTime, 1.0);
    } else if (ti <= t_end + 1e-12) {
      const double grip = std::min((ti - t_grasp) / pick_speed.duration, 1.0);
      giver = object + (20.0 + 10.0 * grip) * giver_dir;
    } else {
      giver = object + (30.0 + kHandSpeed * (ti - t_end)) * giver_dir;
    }

    const double before_meet = std::clamp(t_end - ti, 0.0, 0.8);
    const Point3 receiver = receiver_meet + kHandSpeed * before_meet * receiver_dir;

    trial.giver_hand.timestamps[i] = ti;
    trial.receiver_hand.timestamps[i] = ti;
    trial.object.timestamps[i] = ti;
    if (i >= truth.start_index && i <= truth.end_index) {
      out.clean_reach.timestamps.push_back(ti);
      out.clean_reach.positions.push_back(object);
    }
    trial.giver_hand.positions[i] = giver + jitter();
    trial.receiver_hand.positions[i] = receiver + jitter();
    trial.object.positions[i] = object + jitter();
  }
  return out;
}

namespace {

double frac(double x) { return x - std::floor(x); }

}  // namespace

SynthSpec sample_spec(const DatasetSpec& d, std::size_t index) {
  SynthSpec s = d.base;
  std::seed_seq seq{static_cast<std::uint32_t>(d.base.seed),
                    static_cast<std::uint32_t>(d.base.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const double kind_draw =
      d.stratified ? frac(static_cast<double>(index) * 0.6180339887498949) : unit(rng);
  const double case_draw =
      d.stratified ? frac(static_cast<double>(index) * 0.7548776662466927 + 0.5) : unit(rng);

  const std::array<double, 4> weights = {d.weight_ellipse, d.weight_hyperbola,
                                         d.weight_min_jerk, d.weight_dmj};
  const double total = weights[0] + weights[1] + weights[2] + weights[3];
  if (total > 0.0) {
    constexpr std::array<ReachKind, 4> kinds = {ReachKind::Ellipse, ReachKind::Hyperbola,
                                                ReachKind::MinJerk,
                                                ReachKind::DecoupledMinJerk};
    double acc = 0.0;
    s.kind = kinds.back();
    for (std::size_t k = 0; k < 4; ++k) {
      acc += weights[k] / total;
      if (kind_draw < acc) {
        s.kind = kinds[k];
        break;
      }
    }
  }
  if (d.case2_fraction >= 0.0) {
    s.preamble = case_draw < d.case2_fraction ? ReachCase::Case2 : ReachCase::Case1;
  }

  if (s.kind == ReachKind::Hyperbola && !d.jitter && total > 0.0) {
    s.inclination = -std::numbers::pi / 2;
    s.semi_a = 140.0;
    s.semi_b = 140.0;
    s.conic_center = Point2(0.0, s.semi_a);
    s.arc_start = -1.2;
    s.arc_end = 1.2;
  }
  if (d.jitter) {
    s.plane_yaw = uniform(-0.3, 0.3);
    s.plane_tilt = uniform(0.0, 0.5);
    s.reach_duration_s = uniform(0.9, 1.4);
    switch (s.kind) {
      case ReachKind::Ellipse:
        s.semi_a = uniform(200.0, 300.0);
        s.semi_b = s.semi_a * uniform(0.35, 0.65);
        s.inclination = uniform(-0.25, 0.25);
        s.conic_center = Point2::Zero();
        s.arc_start = uniform(150.0, 170.0) * std::numbers::pi / 180.0;
        s.arc_end = uniform(10.0, 30.0) * std::numbers::pi / 180.0;
        break;
      case ReachKind::Hyperbola:
        s.semi_a = uniform(100.0, 180.0);
        s.semi_b = uniform(100.0, 180.0);
        s.inclination = -std::numbers::pi / 2 + uniform(-0.2, 0.2);
        s.conic_center = Point2(0.0, s.semi_a);
        s.arc_start = -uniform(1.0, 1.4);
        s.arc_end = uniform(1.0, 1.4);
        break;
      case ReachKind::MinJerk:
        s.chord_mm = uniform(350.0, 550.0);
        s.rise_mm = uniform(-50.0, 150.0);
        break;
      case ReachKind::DecoupledMinJerk:
        s.chord_mm = uniform(350.0, 550.0);
        s.rise_mm = uniform(150.0, 280.0);
        s.dmj_ratio = uniform(0.3, 0.7);
        break;
    }
  }
  s.seed = rng();
  char id[32];
  std::snprintf(id, sizeof(id), "synth-%04zu", index);
  s.trial_id = id;
  return s;
}

DatasetSpec parse_dataset_spec(std::istream& in) {
  DatasetSpec d;
  SynthSpec& s = d.base;
  for (const auto& kv : detail::parse_key_values(in)) {
    const std::string& k = kv.key;
    if (k == "kind") {
      if (kv.value == "ellipse") s.kind = ReachKind::Ellipse;
      else if (kv.value == "hyperbola") s.kind = ReachKind::Hyperbola;
      else if (kv.value == "mj") s.kind = ReachKind::MinJerk;
      else if (kv.value == "dmj") s.kind = ReachKind::DecoupledMinJerk;
      else detail::bad_value(kv, "ellipse|hyperbola|mj|dmj");
    } else if (k == "semi_a") s.semi_a = detail::to_double(kv);
    else if (k == "semi_b") s.semi_b = detail::to_double(kv);
    else if (k == "inclination") s.inclination = detail::to_double(kv);
    else if (k == "conic_center") {
      const auto v = detail::to_doubles(kv, 2);
      s.conic_center = Point2(v[0], v[1]);
    } else if (k == "arc_start") s.arc_start = detail::to_double(kv);
    else if (k == "arc_end") s.arc_end = detail::to_double(kv);
    else if (k == "chord_mm") s.chord_mm = detail::to_double(kv);
    else if (k == "rise_mm") s.rise_mm = detail::to_double(kv);
    else if (k == "dmj_ratio") s.dmj_ratio = detail::to_double(kv);
    else if (k == "plane_yaw") s.plane_yaw = detail::to_double(kv);
    else if (k == "plane_tilt") s.plane_tilt = detail::to_double(kv);
    else if (k == "plane_origin") {
      const auto v = detail::to_doubles(kv, 3);
      s.plane_origin = Point3(v[0], v[1], v[2]);
    } else if (k == "rate_hz") s.rate_hz = detail::to_double(kv);
    else if (k == "noise_mm") s.noise_mm = detail::to_double(kv);
    else if (k == "duration_s") s.reach_duration_s = detail::to_double(kv);
    else if (k == "preamble") {
      if (kv.value == "case1") s.preamble = ReachCase::Case1;
      else if (kv.value == "case2") s.preamble = ReachCase::Case2;
      else detail::bad_value(kv, "case1|case2");
    } else if (k == "seed") s.seed = detail::to_uint(kv);
    else if (k == "weight_ellipse") d.weight_ellipse = detail::to_double(kv);
    else if (k == "weight_hyperbola") d.weight_hyperbola = detail::to_double(kv);
    else if (k == "weight_mj") d.weight_min_jerk = detail::to_double(kv);
    else if (k == "weight_dmj") d.weight_dmj = detail::to_double(kv);
    else if (k == "case2_fraction") d.case2_fraction = detail::to_double(kv);
    else if (k == "jitter") d.jitter = detail::to_bool(kv);
    else if (k == "stratified") d.stratified = detail::to_bool(kv);
    else fail(ErrorCode::ConfigError, "line " + std::to_string(kv.line) + ": unknown key '" + k + "'");
  }
  validate(s);
  return d;
}

DatasetSpec load_dataset_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  return parse_dataset_spec(in);
}

void write_truth_csv(std::ostream& out, const std::vector<SynthTruth>& truth) {
  using detail::format_double;
  out << "trial_id,kind,case,t_ogc,t_start,t_end,dmj_ratio,A,B,C,D,E,F\n";
  for (const auto& t : truth) {
    out << t.trial_id << ',' << to_string(t.kind) << ',' << to_string(t.case_label) << ','
        << format_double(t.t_ogc) << ',' << format_double(t.t_start) << ','
        << format_double(t.t_end) << ',' << format_double(t.dmj_ratio);
    for (int i = 0; i < 6; ++i) out << ',' << format_double(t.conic_mm[i]);
    out << '\n';
  }
}

}  // namespace reachfit
