#include "sat/track.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sat/error.hpp"

namespace sat {

const OverlapEntry& OverlapLedger::at(AgentId peer) const {
    static const OverlapEntry empty{};
    const auto it = peers.find(peer);
    return it == peers.end() ? empty : it->second;
}

std::vector<Measurement> pims(const std::vector<KinematicState>& predicted, const Vec2& action) {
    std::vector<Measurement> z;
    z.reserve(predicted.size());
    for (const auto& x : predicted) {
        if (x.px == action.x && x.py == action.y) continue;
        z.push_back(project(x, action));
    }
    return z;
}

double renyi_gain(const ParticleSet& predicted, const Vec2& action, const std::vector<Measurement>& z_hyp,
                  const FilterConfig& cfg, const RenyiConfig& rcfg) {
    const double alpha = rcfg.alpha;
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "renyi alpha must lie in (0,1)");
    const auto mult = update_multipliers(predicted, z_hyp, action, cfg);
    const double a = alpha / (1.0 - alpha);
    const double b = 1.0 / (1.0 - alpha);
    double gain = 0.0;
    for (std::size_t i = 0; i < mult.size(); ++i) {
        const double m = mult[i];
        if (m == 1.0) continue;  // identical intensities contribute nothing
        gain += predicted.particles[i].weight * (1.0 + a * m - b * std::pow(m, alpha));
    }
    return gain;
}

Rect reachable_footprint(const Vec2& s, const AgentKinematics& kin, const SensorModel& sensor) {
    const double reach = kin.radial_step * std::max(0, kin.radial_steps);
    return Rect::square(s, sensor.side + 2.0 * reach);
}

std::size_t best_track_action(const ParticleSet& predicted, const std::vector<KinematicState>& predicted_states,
                              const std::vector<Vec2>& actions, const FilterConfig& cfg, const RenyiConfig& rcfg,
                              std::vector<double>* gains) {
    std::size_t best = 0;
    double best_gain = -std::numeric_limits<double>::infinity();
    if (gains) gains->clear();
    for (std::size_t a = 0; a < actions.size(); ++a) {
        const auto z = pims(predicted_states, actions[a]);
        const double g = renyi_gain(predicted, actions[a], z, cfg, rcfg);
        if (gains) gains->push_back(g);
        if (g > best_gain) {
            best_gain = g;
            best = a;
        }
    }
    return best;
}

TrackDecision track_control(const ParticleSet& particles, const SearchGrid& grid, const Vec2& s,
                            const AgentKinematics& kin, const FilterConfig& cfg, const RenyiConfig& rcfg, Rng& rng) {
    TrackDecision d;
    const FilterState pred = predict(particles, grid, s, cfg, rng);
    // Particles outside every reachable footprint have multiplier 1 under all
    // actions and add nothing to any gain, so scoring can skip them.
    const Rect region = reachable_footprint(s, kin, cfg.sensor);
    const ParticleSet local = restrict_to(pred.particles, region);
    const int n_hat = round_count(local.mass());
    if (n_hat < 1) return d;
    d.predicted_states = extract_states(local, n_hat, cfg.peak_separation, cfg.kmeans_iterations);
    d.actions = admissible_actions(s, kin, cfg.area);
    const std::size_t best = best_track_action(local, d.predicted_states, d.actions, cfg, rcfg, &d.gains);
    d.action = d.actions[best];
    return d;
}

std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    if (n == 0) return {};
    const std::size_t m = cost.front().size();
    if (m < n) throw Error(ErrorKind::InvalidArgument, "assignment needs rows <= columns");
    // Shortest augmenting path with potentials; 1-based, column 0 is a sentinel.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n, 0);
    for (std::size_t j = 1; j <= m; ++j) {
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    }
    return row_to_col;
}

double ospa(const std::vector<Vec2>& x, const std::vector<Vec2>& y, double c) {
    // Equal sizes use a canonical orientation so the result is exactly symmetric.
    auto before = [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); };
    const bool swap = x.size() > y.size() ||
                      (x.size() == y.size() && std::lexicographical_compare(y.begin(), y.end(), x.begin(), x.end(), before));
    const auto& small = swap ? y : x;
    const auto& large = swap ? x : y;
    const std::size_t m = small.size();
    const std::size_t n = large.size();
    if (n == 0) return 0.0;
    const double c2 = c * c;
    double total = static_cast<double>(n - m) * c2;
    if (m > 0) {
        std::vector<std::vector<double>> cost(m, std::vector<double>(n));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) cost[i][j] = std::min(c2, squared_distance(small[i], large[j]));
        }
        const auto match = min_cost_assignment(cost);
        for (std::size_t i = 0; i < m; ++i) total += cost[i][match[i]];
    }
    return std::min(c, std::sqrt(total / static_cast<double>(n)));
}

OverlapLedger overlap_step(OverlapLedger ledger, AgentId peer, const std::vector<Vec2>& x_self,
                           const std::vector<Vec2>& x_peer, const Vec2& s_self, const Vec2& s_peer,
                           const SensorModel& sensor, const OverlapConfig& ocfg) {
    if (!sensor.footprint(s_self).intersects(sensor.footprint(s_peer))) {
        ledger.reset(peer);
        return ledger;
    }
    auto& e = ledger.peers[peer];
    e.scores.push_back(ospa(x_self, x_peer, ocfg.cutoff));
    while (static_cast<int>(e.scores.size()) > std::max(1, ocfg.window)) e.scores.pop_front();
    e.sum = std::accumulate(e.scores.begin(), e.scores.end(), 0.0);
    ++e.count;
    return ledger;
}

OverlapDecision resolve_overlap(const OverlapLedger& ledger, AgentId self_id, AgentId peer_id,
                                const OverlapConfig& ocfg) {
    const auto& e = ledger.at(peer_id);
    if (e.count >= ocfg.window && e.sum <= ocfg.threshold && self_id > peer_id) {
        return OverlapDecision::ExitToSearch;
    }
    return OverlapDecision::Continue;
}

}  // namespace sat
