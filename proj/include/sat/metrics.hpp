#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sat/trace.hpp"
#include "sat/track.hpp"

namespace sat {

struct OverlapEvent {
    int step = 0;
    int agent = 0;
    int peer = 0;
};

struct MetricsReport {
    std::vector<int> steps;
    std::vector<double> ospa;      // union of agent estimates vs alive truth
    std::vector<double> coverage;  // cells searched by any agent
    /// Steps from birth to first estimate within the cutoff; nullopt if never.
    std::map<int, std::optional<int>> detection_latency;
    /// Mean OSPA over the steps each target is alive.
    std::map<int, double> target_window_ospa;
    std::vector<OverlapEvent> overlap_events;
    double mean_ospa = 0.0;
};

/// Throws Schema when the trace has no header.
MetricsReport compute_metrics(const Trace& trace, const OverlapConfig& ocfg);

std::string metrics_to_json(const MetricsReport& report);

}  // namespace sat
