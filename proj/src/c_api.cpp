#include "sat/sat.h"

#include <cstring>
#include <fstream>
#include <string>

#include "json.hpp"
#include "sat/error.hpp"
#include "sat/harness.hpp"
#include "sat/metrics.hpp"
#include "sat/planner.hpp"
#include "sat/scenario.hpp"
#include "sat/trace.hpp"

struct sat_scenario {
    sat::ScenarioConfig config;
};

struct sat_trace {
    sat::Trace trace;
};

struct sat_metrics {
    sat::MetricsReport report;
};

namespace {

thread_local std::string g_last_error;

sat_status to_status(sat::ErrorKind k) {
    switch (k) {
        case sat::ErrorKind::InvalidArgument: return SAT_ERR_INVALID_ARGUMENT;
        case sat::ErrorKind::Io: return SAT_ERR_IO;
        case sat::ErrorKind::Parse: return SAT_ERR_PARSE;
        case sat::ErrorKind::Config: return SAT_ERR_CONFIG;
        case sat::ErrorKind::Schema: return SAT_ERR_SCHEMA;
        case sat::ErrorKind::Runtime: return SAT_ERR_RUNTIME;
    }
    return SAT_ERR_RUNTIME;
}

template <typename F>
sat_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return SAT_OK;
    } catch (const sat::Error& e) {
        g_last_error = e.what();
        return to_status(e.kind());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SAT_ERR_RUNTIME;
    } catch (...) {
        g_last_error = "unknown error";
        return SAT_ERR_RUNTIME;
    }
}

sat_status null_arg(const char* what) {
    g_last_error = std::string("null argument: ") + what;
    return SAT_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* sat_last_error(void) { return g_last_error.c_str(); }

const char* sat_version(void) { return "1.0.0"; }

sat_status sat_scenario_load(const char* path, sat_scenario** out) {
    if (!path || !out) return null_arg("path/out");
    return guarded([&] { *out = new sat_scenario{sat::load_scenario(path)}; });
}

sat_status sat_scenario_parse(const char* json_text, sat_scenario** out) {
    if (!json_text || !out) return null_arg("json_text/out");
    return guarded([&] { *out = new sat_scenario{sat::parse_scenario(json_text)}; });
}

void sat_scenario_free(sat_scenario* scenario) { delete scenario; }

int sat_scenario_steps(const sat_scenario* scenario) { return scenario ? scenario->config.steps : 0; }

size_t sat_scenario_agent_count(const sat_scenario* scenario) {
    return scenario ? scenario->config.agents.size() : 0;
}

size_t sat_scenario_target_count(const sat_scenario* scenario) {
    return scenario ? scenario->config.targets.size() : 0;
}

sat_status sat_simulate(const sat_scenario* scenario, uint64_t seed, sat_trace** out) {
    if (!scenario || !out) return null_arg("scenario/out");
    return guarded([&] { *out = new sat_trace{sat::run(scenario->config, seed)}; });
}

sat_status sat_trace_write(const sat_trace* trace, const char* path) {
    if (!trace || !path) return null_arg("trace/path");
    return guarded([&] { sat::write_trace(trace->trace, path); });
}

sat_status sat_trace_read(const char* path, sat_trace** out) {
    if (!path || !out) return null_arg("path/out");
    return guarded([&] { *out = new sat_trace{sat::read_trace(path)}; });
}

size_t sat_trace_step_count(const sat_trace* trace) { return trace ? trace->trace.steps.size() : 0; }

void sat_trace_free(sat_trace* trace) { delete trace; }

sat_status sat_metrics_compute(const sat_trace* trace, const sat_scenario* scenario, sat_metrics** out) {
    if (!trace || !out) return null_arg("trace/out");
    return guarded([&] {
        sat::OverlapConfig ocfg;
        if (scenario) {
            ocfg = scenario->config.overlap;
        } else if (trace->trace.header) {
            ocfg.cutoff = trace->trace.header->cutoff;
        }
        *out = new sat_metrics{sat::compute_metrics(trace->trace, ocfg)};
    });
}

double sat_metrics_mean_ospa(const sat_metrics* metrics) { return metrics ? metrics->report.mean_ospa : 0.0; }

sat_status sat_metrics_write(const sat_metrics* metrics, const char* path) {
    if (!metrics || !path) return null_arg("metrics/path");
    return guarded([&] {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw sat::Error(sat::ErrorKind::Io, std::string("cannot open '") + path + "' for writing");
        out << sat::metrics_to_json(metrics->report) << '\n';
        if (!out) throw sat::Error(sat::ErrorKind::Io, std::string("failed writing '") + path + "'");
    });
}

void sat_metrics_free(sat_metrics* metrics) { delete metrics; }

sat_status sat_plan_json(const sat_scenario* scenario, char** out) {
    if (!scenario || !out) return null_arg("scenario/out");
    return guarded([&] {
        const auto& cfg = scenario->config;
        const auto map = sat::build_search_map(cfg.area, cfg.cell_side);
        const sat::SearchGrid grid(cfg.area, cfg.cell_side);
        const auto unvisited = sat::unvisited_nodes(map, grid, cfg.planner);
        nlohmann::json j;
        j["cell_side"] = cfg.cell_side;
        j["nodes"] = map.size();
        j["agents"] = nlohmann::json::array();
        for (const auto& a : cfg.agents) {
            const auto plan = sat::plan_walk(map, a.start, unvisited);
            nlohmann::json waypoints = nlohmann::json::array();
            for (auto id : plan.nodes) waypoints.push_back({map.nodes[id].center.x, map.nodes[id].center.y});
            j["agents"].push_back({{"id", a.id}, {"nodes", plan.nodes}, {"waypoints", waypoints}});
        }
        const std::string text = j.dump(2);
        char* buf = static_cast<char*>(std::malloc(text.size() + 1));
        if (!buf) throw sat::Error(sat::ErrorKind::Runtime, "out of memory");
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *out = buf;
    });
}

void sat_string_free(char* s) { std::free(s); }

}  // extern "C"
