#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sat/types.hpp"

namespace sat {

inline constexpr int kTraceSchemaMajor = 1;
inline constexpr int kTraceSchemaMinor = 0;

struct TraceHeader {
    std::string schema_version = "1.0";
    std::uint64_t seed = 0;
    int steps = 0;
    Rect area;
    double cell_side = 0.0;
    double cutoff = 10.0;
    double beta = 0.4;
    double sensor_side = 10.0;
    std::vector<int> agent_ids;
};

struct TargetRecord {
    int id = 0;
    KinematicState state;
};

struct AgentRecordLog {
    int id = 0;
    Vec2 position;  // where the agent sensed during the step
    Vec2 action;    // position chosen for the next step
    Mode mode = Mode::Search;
    int n_hat = 0;
    std::vector<KinematicState> estimates;
    double coverage = 0.0;
    std::string searched;  // '1' per cell whose search value exceeds beta
    std::size_t plan_remaining = 0;
    std::vector<double> gains;  // per-action Renyi scores when tracking
};

struct MessageLog {
    int from = 0;
    int to = 0;
    std::string payload;  // search_grid | predicted_states | mode
};

struct OverlapLog {
    int agent = 0;
    int peer = 0;
    double score_sum = 0.0;
    int count = 0;
    std::string decision;  // continue | exit_to_search
};

struct StepLog {
    int step = 0;
    std::vector<TargetRecord> targets;
    std::vector<AgentRecordLog> agents;
    std::vector<MessageLog> messages;
    std::vector<OverlapLog> overlaps;
};

struct Trace {
    std::optional<TraceHeader> header;
    std::vector<StepLog> steps;

    bool empty() const { return !header && steps.empty(); }
};

/// Newline-delimited JSON, keys sorted, doubles printed with 17 significant
/// digits. Throws Io on failure.
void write_trace(const Trace& trace, const std::string& path);
std::string trace_to_string(const Trace& trace);

/// Throws Io, Parse (bad JSON) or Schema (unknown major version, bad records).
Trace read_trace(const std::string& path);
Trace trace_from_string(const std::string& text);

}  // namespace sat
