#pragma once

#include <string>
#include <vector>

#include "sat/filter.hpp"
#include "sat/models.hpp"
#include "sat/planner.hpp"
#include "sat/track.hpp"
#include "sat/types.hpp"

namespace sat {

struct AgentSpec {
    AgentId id = 0;
    Vec2 start;
};

struct TargetSpec {
    int id = 0;
    int birth_step = 1;
    int death_step = 2;
    KinematicState birth_state;
};

/// Every tunable of one simulation. Defaults reproduce the reference
/// experimental setup (100 m x 100 m area, T = 1 s, pS = 0.99, ...).
struct ScenarioConfig {
    Rect area{0.0, 0.0, 100.0, 100.0};
    double cell_side = 10.0;
    int steps = 200;
    std::vector<AgentSpec> agents;
    std::vector<TargetSpec> targets;

    MotionModel motion;
    /// Process-noise scale of the ground truth; the filter uses motion.noise_scale.
    double truth_noise_scale = 0.05;
    SensorModel sensor;
    FilterConfig filter;
    std::size_t particles_per_target = 1000;
    std::size_t birth_particles = 200;
    PlannerConfig planner;
    OverlapConfig overlap;
    RenyiConfig renyi;
    AgentKinematics kinematics;

    /// Copies area, motion and sensor into the filter config.
    FilterConfig filter_config() const;
};

/// Throws Error(Config) naming the first violated field.
void validate(const ScenarioConfig& cfg);

/// Parses JSON text; Parse errors for malformed JSON, Config for bad values.
ScenarioConfig parse_scenario(const std::string& text);

/// Io error when the file cannot be read.
ScenarioConfig load_scenario(const std::string& path);

std::string scenario_to_json(const ScenarioConfig& cfg);

}  // namespace sat
