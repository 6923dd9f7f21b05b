#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "sat/filter.hpp"
#include "sat/models.hpp"
#include "sat/types.hpp"

namespace sat {

using AgentId = int;

struct OverlapConfig {
    double cutoff = 10.0;    // c, m
    int window = 5;          // W, steps
    double threshold = 25.0; // Q^Th
};

struct RenyiConfig {
    double alpha = 0.5;
};

/// Per-peer overlap bookkeeping: scores of the most recent intersecting steps
/// (at most `window` of them) and the length of the current intersecting run.
struct OverlapEntry {
    std::deque<double> scores;
    double sum = 0.0;
    int count = 0;
};

struct OverlapLedger {
    std::map<AgentId, OverlapEntry> peers;

    const OverlapEntry& at(AgentId peer) const;
    void reset(AgentId peer) { peers[peer] = {}; }
};

enum class OverlapDecision { Continue, ExitToSearch };

/// Predicted ideal measurement set: one noiseless measurement per state,
/// skipping states that sit exactly on the action position.
std::vector<Measurement> pims(const std::vector<KinematicState>& predicted, const Vec2& action);

/// Particle form of the Renyi divergence between the predicted and the
/// pseudo-updated intensity. Throws InvalidArgument for alpha outside (0,1).
double renyi_gain(const ParticleSet& predicted, const Vec2& action, const std::vector<Measurement>& z_hyp,
                  const FilterConfig& cfg, const RenyiConfig& rcfg);

/// Region holding every target some admissible action can bring into view.
Rect reachable_footprint(const Vec2& s, const AgentKinematics& kin, const SensorModel& sensor);

struct TrackDecision {
    /// nullopt when no target is predicted; the agent should switch to search.
    std::optional<Vec2> action;
    std::vector<Vec2> actions;
    std::vector<double> gains;
    std::vector<KinematicState> predicted_states;
};

TrackDecision track_control(const ParticleSet& particles, const SearchGrid& grid, const Vec2& s,
                            const AgentKinematics& kin, const FilterConfig& cfg, const RenyiConfig& rcfg, Rng& rng);

/// Scores candidate actions against an already predicted intensity and its
/// extracted states; returns the index of the best action (ties: lowest index).
std::size_t best_track_action(const ParticleSet& predicted, const std::vector<KinematicState>& predicted_states,
                              const std::vector<Vec2>& actions, const FilterConfig& cfg, const RenyiConfig& rcfg,
                              std::vector<double>* gains = nullptr);

/// Order-2 OSPA distance with cutoff c between two position sets.
double ospa(const std::vector<Vec2>& x, const std::vector<Vec2>& y, double c);

/// Minimum-cost assignment of every row to a distinct column (rows <= cols).
/// Returns the column chosen for each row.
std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost);

OverlapLedger overlap_step(OverlapLedger ledger, AgentId peer, const std::vector<Vec2>& x_self,
                           const std::vector<Vec2>& x_peer, const Vec2& s_self, const Vec2& s_peer,
                           const SensorModel& sensor, const OverlapConfig& ocfg);

OverlapDecision resolve_overlap(const OverlapLedger& ledger, AgentId self_id, AgentId peer_id,
                                const OverlapConfig& ocfg);

}  // namespace sat
