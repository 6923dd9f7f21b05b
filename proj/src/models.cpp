#include "sat/models.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "sat/error.hpp"

namespace sat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct AxisNoise {
    double l11 = 0.0;
    double l21 = 0.0;
    double l22 = 0.0;
};

// Lower Cholesky factor of one position/velocity block of noise_scale * Q.
AxisNoise axis_noise(const MotionModel& m) {
    const double t = m.dt;
    const double q11 = m.noise_scale * t * t * t / 3.0;
    const double q21 = m.noise_scale * t * t / 2.0;
    const double q22 = m.noise_scale * t;
    AxisNoise a;
    if (q11 <= 0.0) return a;
    a.l11 = std::sqrt(q11);
    a.l21 = q21 / a.l11;
    a.l22 = std::sqrt(std::max(0.0, q22 - a.l21 * a.l21));
    return a;
}

}  // namespace

Eigen::Matrix4d MotionModel::transition() const {
    Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
    f(0, 1) = dt;
    f(2, 3) = dt;
    return f;
}

Eigen::Matrix4d MotionModel::process_noise_shape() const {
    Eigen::Matrix2d block;
    block << dt * dt * dt / 3.0, dt * dt / 2.0, dt * dt / 2.0, dt;
    Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
    q.block<2, 2>(0, 0) = block;
    q.block<2, 2>(2, 2) = block;
    return q;
}

Eigen::Matrix4d MotionModel::process_noise() const { return noise_scale * process_noise_shape(); }

double wrap_angle(double a) {
    double r = std::remainder(a, kTwoPi);
    if (r <= -std::numbers::pi) r += kTwoPi;
    return r;
}

Measurement project(const KinematicState& x, const Vec2& s) {
    const double dx = s.x - x.px;
    const double dy = s.y - x.py;
    if (dx == 0.0 && dy == 0.0) {
        throw Error(ErrorKind::InvalidArgument, "target position coincides with sensor position");
    }
    return {std::hypot(dx, dy), wrap_angle(std::atan2(dy, dx))};
}

Vec2 unproject(const Measurement& z, const Vec2& s) {
    return {s.x - z.range * std::cos(z.bearing), s.y - z.range * std::sin(z.bearing)};
}

KinematicState transition_sample(const KinematicState& x, const MotionModel& model, Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    const AxisNoise a = axis_noise(model);
    const double n1 = n01(rng);
    const double n2 = n01(rng);
    const double n3 = n01(rng);
    const double n4 = n01(rng);
    const double t = model.dt;
    return {x.px + t * x.vx + a.l11 * n1, x.vx + a.l21 * n1 + a.l22 * n2,
            x.py + t * x.vy + a.l11 * n3, x.vy + a.l21 * n3 + a.l22 * n4};
}

double transition_density(const KinematicState& next, const KinematicState& prev, const MotionModel& model) {
    const Eigen::Matrix4d cov = model.process_noise();
    Eigen::LLT<Eigen::Matrix4d> llt(cov);
    if (llt.info() != Eigen::Success || model.noise_scale <= 0.0) {
        throw Error(ErrorKind::InvalidArgument, "process noise covariance is singular");
    }
    const Eigen::Vector4d xp(prev.px, prev.vx, prev.py, prev.vy);
    const Eigen::Vector4d xn(next.px, next.vx, next.py, next.vy);
    const Eigen::Vector4d d = xn - model.transition() * xp;
    const Eigen::Vector4d sol = llt.solve(d);
    const double quad = d.dot(sol);
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return std::exp(-0.5 * quad - 0.5 * logdet - 2.0 * std::log(kTwoPi));
}

Measurement measure(const KinematicState& x, const Vec2& s, const SensorModel& sensor, Rng& rng) {
    const Measurement h = project(x, s);
    std::normal_distribution<double> n01(0.0, 1.0);
    const double nr = n01(rng);
    const double nb = n01(rng);
    return {std::max(0.0, h.range + sensor.range_sigma(h.range) * nr),
            wrap_angle(h.bearing + sensor.bearing_sigma(h.range) * nb)};
}

double likelihood_unchecked(const Measurement& z, const Vec2& target, const Vec2& s, const SensorModel& sensor) {
    const double dx = s.x - target.x;
    const double dy = s.y - target.y;
    const double r = std::hypot(dx, dy);
    const double b = (dx == 0.0 && dy == 0.0) ? 0.0 : std::atan2(dy, dx);
    const double sr = sensor.range_sigma(r);
    const double sb = sensor.bearing_sigma(r);
    const double er = (z.range - r) / sr;
    const double eb = wrap_angle(z.bearing - b) / sb;
    return std::exp(-0.5 * (er * er + eb * eb)) / (kTwoPi * sr * sb);
}

double likelihood(const Measurement& z, const KinematicState& x, const Vec2& s, const SensorModel& sensor) {
    if (x.px == s.x && x.py == s.y) {
        throw Error(ErrorKind::InvalidArgument, "target position coincides with sensor position");
    }
    return likelihood_unchecked(z, x.position(), s, sensor);
}

bool in_footprint(const Vec2& p, const Vec2& s, const SensorModel& sensor) {
    return std::max(std::abs(p.x - s.x), std::abs(p.y - s.y)) <= sensor.side / 2.0;
}

double detection_prob(const Vec2& p, const Vec2& s, const SensorModel& sensor, TargetLabel label) {
    if (!in_footprint(p, s, sensor)) return 0.0;
    return label == TargetLabel::True ? sensor.p_detect_max : 1.0;
}

std::vector<Vec2> admissible_actions(const Vec2& s, const AgentKinematics& kin, const Rect& area) {
    std::vector<Vec2> out;
    out.reserve(1 + static_cast<std::size_t>(std::max(0, kin.radial_steps * kin.heading_steps)));
    auto push_unique = [&](Vec2 p) {
        if (!area.contains(p)) return;
        for (const auto& q : out) {
            if (squared_distance(p, q) < 1e-18) return;
        }
        out.push_back(p);
    };
    push_unique(s);
    // Stay is always available even if s sits on the boundary after rounding.
    if (out.empty()) out.push_back(s);
    const double dtheta = kTwoPi / kin.heading_steps;
    for (int l1 = 1; l1 <= kin.radial_steps; ++l1) {
        for (int l2 = 0; l2 <= kin.heading_steps; ++l2) {
            double ox = l1 * kin.radial_step * std::cos(l2 * dtheta);
            double oy = l1 * kin.radial_step * std::sin(l2 * dtheta);
            if (std::abs(ox) < 1e-12) ox = 0.0;
            if (std::abs(oy) < 1e-12) oy = 0.0;
            push_unique({s.x + ox, s.y + oy});
        }
    }
    return out;
}

std::vector<Measurement> clutter_sample(const SensorModel& sensor, Rng& rng) {
    std::vector<Measurement> out;
    if (sensor.clutter_rate <= 0.0) return out;
    std::poisson_distribution<int> count(sensor.clutter_rate);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int n = count(rng);
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double r = sensor.max_range * u01(rng);
        const double b = std::numbers::pi - kTwoPi * u01(rng);
        out.push_back({r, b});
    }
    return out;
}

double clutter_intensity(const Measurement& z, const SensorModel& sensor) {
    if (!(z.range >= 0.0 && z.range <= sensor.max_range)) return 0.0;
    if (!(z.bearing > -std::numbers::pi && z.bearing <= std::numbers::pi)) return 0.0;
    return sensor.clutter_rate / (sensor.max_range * kTwoPi);
}

}  // namespace sat
