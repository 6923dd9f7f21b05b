#include "sat/metrics.hpp"

#include <algorithm>

#include "json.hpp"
#include "sat/error.hpp"

namespace sat {

MetricsReport compute_metrics(const Trace& trace, const OverlapConfig& ocfg) {
    if (!trace.header) throw Error(ErrorKind::Schema, "malformed trace: missing header");
    MetricsReport r;
    const double c = ocfg.cutoff;
    std::map<int, int> birth;
    std::map<int, std::pair<double, int>> window;

    for (const auto& s : trace.steps) {
        std::vector<Vec2> truth;
        for (const auto& t : s.targets) truth.push_back(t.state.position());
        std::vector<Vec2> est;
        std::size_t cells = 0;
        for (const auto& a : s.agents) {
            for (const auto& e : a.estimates) est.push_back(e.position());
            cells = std::max(cells, a.searched.size());
        }
        std::vector<bool> covered(cells, false);
        for (const auto& a : s.agents) {
            if (a.searched.size() != cells) throw Error(ErrorKind::Schema, "malformed trace: inconsistent grid summaries");
            for (std::size_t k = 0; k < cells; ++k) covered[k] = covered[k] || a.searched[k] == '1';
        }

        const double d = ospa(est, truth, c);
        r.steps.push_back(s.step);
        r.ospa.push_back(d);
        r.coverage.push_back(cells ? static_cast<double>(std::count(covered.begin(), covered.end(), true)) /
                                         static_cast<double>(cells)
                                   : 0.0);

        for (const auto& t : s.targets) {
            if (!birth.count(t.id)) {
                birth[t.id] = s.step;
                r.detection_latency[t.id] = std::nullopt;
            }
            auto& w = window[t.id];
            w.first += d;
            w.second += 1;
            if (!r.detection_latency[t.id]) {
                for (const auto& e : est) {
                    if (distance(e, t.state.position()) <= c) {
                        r.detection_latency[t.id] = s.step - birth[t.id];
                        break;
                    }
                }
            }
        }
        for (const auto& o : s.overlaps) {
            if (o.decision == "exit_to_search") r.overlap_events.push_back({s.step, o.agent, o.peer});
        }
    }
    for (const auto& [id, w] : window) r.target_window_ospa[id] = w.first / w.second;
    if (!r.ospa.empty()) {
        double sum = 0.0;
        for (double v : r.ospa) sum += v;
        r.mean_ospa = sum / static_cast<double>(r.ospa.size());
    }
    return r;
}

std::string metrics_to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["steps"] = r.steps;
    j["ospa"] = r.ospa;
    j["coverage"] = r.coverage;
    j["mean_ospa"] = r.mean_ospa;
    nlohmann::json lat = nlohmann::json::object();
    for (const auto& [id, l] : r.detection_latency) lat[std::to_string(id)] = l ? nlohmann::json(*l) : nlohmann::json();
    j["detection_latency"] = lat;
    nlohmann::json win = nlohmann::json::object();
    for (const auto& [id, v] : r.target_window_ospa) win[std::to_string(id)] = v;
    j["target_window_ospa"] = win;
    j["overlap_events"] = nlohmann::json::array();
    for (const auto& e : r.overlap_events) {
        j["overlap_events"].push_back({{"step", e.step}, {"agent", e.agent}, {"peer", e.peer}});
    }
    return j.dump(2);
}

}  // namespace sat
