#pragma once

#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "sat/random.hpp"
#include "sat/types.hpp"

namespace sat {

/// Near-constant-velocity motion. The printed Q is scaled by `noise_scale`
/// (sigma_w^2, m^2/s^3) since only its shape is fixed by the model.
struct MotionModel {
    double dt = 1.0;
    double p_survival = 0.99;
    double noise_scale = 0.05;

    Eigen::Matrix4d transition() const;
    /// Unscaled Q.
    Eigen::Matrix4d process_noise_shape() const;
    /// noise_scale * Q.
    Eigen::Matrix4d process_noise() const;
};

/// Range-bearing sensor with a square field of view and uniform clutter.
struct SensorModel {
    double p_detect_max = 0.99;
    double side = 10.0;
    double range_noise_base = 1.0;      // zeta0, m
    double range_noise_slope = 5e-3;    // beta_zeta, 1/m
    double bearing_noise_base = std::numbers::pi / 180.0;  // phi0, rad
    double bearing_noise_slope = 1e-5;  // beta_phi, rad/m
    double clutter_rate = 10.0;         // lambda, per scan
    double max_range = 100.0 * std::numbers::sqrt2;

    double range_sigma(double true_range) const {
        return range_noise_base + range_noise_slope * true_range * true_range;
    }
    double bearing_sigma(double true_range) const {
        return bearing_noise_base + bearing_noise_slope * true_range;
    }
    /// Closed sensing square S_a(s).
    Rect footprint(const Vec2& s) const { return Rect::square(s, side); }
};

struct Measurement {
    double range = 0.0;
    double bearing = 0.0;

    friend bool operator==(const Measurement&, const Measurement&) = default;
};

struct AgentKinematics {
    double radial_step = 2.0;
    int radial_steps = 2;
    int heading_steps = 8;
    double comm_range = 50.0;
};

enum class TargetLabel { Virtual = 0, True = 1 };

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Noiseless range-bearing projection h(x, s). Throws InvalidArgument when the
/// target position coincides with s.
Measurement project(const KinematicState& x, const Vec2& s);

/// Position whose noiseless projection from s is z.
Vec2 unproject(const Measurement& z, const Vec2& s);
KinematicState transition_sample(const KinematicState& x, const MotionModel& model, Rng& rng);

double transition_density(const KinematicState& next, const KinematicState& prev, const MotionModel& model);

Measurement measure(const KinematicState& x, const Vec2& s, const SensorModel& sensor, Rng& rng);

double likelihood(const Measurement& z, const KinematicState& x, const Vec2& s, const SensorModel& sensor);

/// Same density as `likelihood` but never throws; a state on top of the sensor
/// gets bearing 0. Used inside the particle loops.
double likelihood_unchecked(const Measurement& z, const Vec2& target, const Vec2& s, const SensorModel& sensor);

bool in_footprint(const Vec2& p, const Vec2& s, const SensorModel& sensor);

double detection_prob(const Vec2& p, const Vec2& s, const SensorModel& sensor, TargetLabel label);

inline double detection_prob(const KinematicState& x, const Vec2& s, const SensorModel& sensor, TargetLabel label) {
    return detection_prob(x.position(), s, sensor, label);
}

/// Control set U(s): s first, then l1 = 1..N_R outer, l2 = 0..N_theta-1 inner.
/// Positions outside `area` are dropped.
std::vector<Vec2> admissible_actions(const Vec2& s, const AgentKinematics& kin, const Rect& area);

std::vector<Measurement> clutter_sample(const SensorModel& sensor, Rng& rng);

double clutter_intensity(const Measurement& z, const SensorModel& sensor);

}  // namespace sat
