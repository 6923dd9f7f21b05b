#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "sat/filter.hpp"
#include "sat/models.hpp"
#include "sat/planner.hpp"
#include "sat/random.hpp"
#include "sat/scenario.hpp"
#include "sat/trace.hpp"
#include "sat/track.hpp"

namespace sat {

/// Ground-truth target driven by a scripted birth/death schedule.
/// Alive exactly on [birth_step, death_step).
struct GroundTruthTarget {
    int id = 0;
    int birth_step = 0;
    int death_step = 0;
    KinematicState birth_state;
    KinematicState state;
    bool born = false;

    bool alive(int k) const { return born && k >= birth_step && k < death_step; }
};

enum class PayloadKind { SearchGrid, PredictedStates, Mode };

const char* to_string(PayloadKind k);

struct Message {
    AgentId sender = 0;
    AgentId receiver = 0;
    PayloadKind kind = PayloadKind::SearchGrid;
    SearchGrid grid;
    std::vector<Vec2> predicted;
    Mode mode = Mode::Search;
};

struct AgentRecord {
    AgentId id = 0;
    Vec2 position;
    /// Position of the last corrector step; drives the search-decay footprint.
    Vec2 last_update_position;
    Mode mode = Mode::Search;
    FilterState filter;
    WalkPlan plan;
    OverlapLedger ledger;

    int n_hat = 0;
    std::vector<KinematicState> estimates;
    std::vector<KinematicState> predicted_states;

    /// Set after yielding a track to `handoff_peer`; the agent keeps searching
    /// while everything it sees is what that peer announces.
    std::optional<AgentId> handoff_peer;
    std::map<AgentId, std::vector<Vec2>> last_peer_states;
    std::set<AgentId> searching_peers;
    bool needs_replan = true;
    bool patrol = false;
};

/// Shared, read-only context of one simulation.
struct SimContext {
    ScenarioConfig scenario;
    FilterConfig filter;
    SearchMap map;

    explicit SimContext(const ScenarioConfig& cfg);
};

/// Symmetric adjacency over agent indices (not ids).
using Adjacency = std::vector<std::vector<bool>>;

std::vector<GroundTruthTarget> make_targets(const std::vector<TargetSpec>& specs);

AgentRecord make_agent(const AgentSpec& spec, const SimContext& ctx);

/// Births at their step, deaths after their last step, CV propagation
/// otherwise. `model.noise_scale` is the ground-truth process noise.
void step_world(std::vector<GroundTruthTarget>& targets, int k, const MotionModel& model, Rng& rng);

std::vector<Measurement> generate_measurements(const std::vector<GroundTruthTarget>& targets, int k,
                                               const AgentRecord& agent, const SensorModel& sensor, Rng& rng);

Adjacency comm_graph(const std::vector<AgentRecord>& agents, double comm_range);

struct StepOutput {
    std::vector<Message> messages;
    std::vector<OverlapLog> overlaps;
    std::vector<Vec2> sensed_at;
    std::vector<std::vector<double>> gains;
};

/// One synchronous round. `agents` must be sorted by id; z, rngs and the
/// adjacency are indexed like `agents`.
StepOutput step_agents(std::vector<AgentRecord>& agents, const std::vector<std::vector<Measurement>>& z,
                       const Adjacency& adjacency, const SimContext& ctx, std::vector<Rng>& rngs);

/// Runs steps 1..K. Bitwise reproducible for a fixed (scenario, seed).
Trace run(const ScenarioConfig& scenario, std::uint64_t seed);

}  // namespace sat
