// satsim: command-line front end over the C API.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "CLI11.hpp"
#include "sat/sat.h"

namespace {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kRuntimeError = 3,
    kTraceError = 4,
    kUsageError = 64,
};

int log_level() {
    const char* v = std::getenv("SATSIM_LOG");
    if (!v) return 1;
    const std::string s(v);
    if (s == "quiet" || s == "0") return 0;
    if (s == "debug" || s == "2") return 2;
    return 1;
}

void info(const std::string& msg) {
    if (log_level() >= 1) std::fprintf(stderr, "satsim: %s\n", msg.c_str());
}

void debug(const std::string& msg) {
    if (log_level() >= 2) std::fprintf(stderr, "satsim[debug]: %s\n", msg.c_str());
}

int report(const char* stage, sat_status st, int code) {
    std::fprintf(stderr, "satsim: %s failed (status %d): %s\n", stage, static_cast<int>(st), sat_last_error());
    return code;
}

int load(const std::string& path, sat_scenario** out) {
    const sat_status st = sat_scenario_load(path.c_str(), out);
    if (st != SAT_OK) return report("loading scenario", st, kConfigError);
    debug("loaded " + path);
    return kOk;
}

int cmd_simulate(const std::string& config, std::uint64_t seed, const std::string& out_path) {
    sat_scenario* sc = nullptr;
    if (int rc = load(config, &sc); rc != kOk) return rc;
    sat_trace* tr = nullptr;
    sat_status st = sat_simulate(sc, seed, &tr);
    sat_scenario_free(sc);
    if (st != SAT_OK) return report("simulation", st, kRuntimeError);
    st = sat_trace_write(tr, out_path.c_str());
    const std::size_t steps = sat_trace_step_count(tr);
    sat_trace_free(tr);
    if (st != SAT_OK) return report("writing trace", st, kRuntimeError);
    info("wrote " + std::to_string(steps) + " steps to " + out_path);
    return kOk;
}

int cmd_metrics(const std::string& trace_path, const std::string& out_path, const std::string& config) {
    sat_trace* tr = nullptr;
    sat_status st = sat_trace_read(trace_path.c_str(), &tr);
    if (st != SAT_OK) return report("reading trace", st, kTraceError);
    sat_scenario* sc = nullptr;
    if (!config.empty()) {
        if (int rc = load(config, &sc); rc != kOk) {
            sat_trace_free(tr);
            return rc;
        }
    }
    sat_metrics* m = nullptr;
    st = sat_metrics_compute(tr, sc, &m);
    sat_trace_free(tr);
    sat_scenario_free(sc);
    if (st != SAT_OK) return report("computing metrics", st, kTraceError);
    st = sat_metrics_write(m, out_path.c_str());
    const double mean = sat_metrics_mean_ospa(m);
    sat_metrics_free(m);
    if (st != SAT_OK) return report("writing metrics", st, kRuntimeError);
    info("mean OSPA " + std::to_string(mean) + " m, report in " + out_path);
    return kOk;
}

int cmd_plan(const std::string& config) {
    sat_scenario* sc = nullptr;
    if (int rc = load(config, &sc); rc != kOk) return rc;
    char* text = nullptr;
    const sat_status st = sat_plan_json(sc, &text);
    sat_scenario_free(sc);
    if (st != SAT_OK) return report("planning", st, kRuntimeError);
    std::printf("%s\n", text);
    sat_string_free(text);
    return kOk;
}

int cmd_validate(const std::string& config) {
    sat_scenario* sc = nullptr;
    if (int rc = load(config, &sc); rc != kOk) return rc;
    std::printf("ok: %zu agents, %zu targets, %d steps\n", sat_scenario_agent_count(sc), sat_scenario_target_count(sc),
                sat_scenario_steps(sc));
    sat_scenario_free(sc);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decentralized multi-agent search-and-track simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", sat_version());

    std::string config, out, trace;
    std::uint64_t seed = 0;

    auto* sim = app.add_subcommand("simulate", "Run a scenario and write a trace");
    sim->add_option("--config", config, "Scenario JSON")->required();
    sim->add_option("--seed", seed, "Master random seed")->required();
    sim->add_option("--out", out, "Trace output path")->required();

    std::string metrics_config;
    auto* met = app.add_subcommand("metrics", "Compute OSPA, coverage and latency from a trace");
    met->add_option("--trace", trace, "Trace file")->required();
    met->add_option("--out", out, "Report output path")->required();
    met->add_option("--config", metrics_config, "Scenario for OSPA cutoff (defaults to the trace header)");

    auto* plan = app.add_subcommand("plan", "Print the initial search plans");
    plan->add_option("--config", config, "Scenario JSON")->required();

    auto* val = app.add_subcommand("validate", "Check a scenario file");
    val->add_option("--config", config, "Scenario JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsageError;
    }

    if (*sim) return cmd_simulate(config, seed, out);
    if (*met) return cmd_metrics(trace, out, metrics_config);
    if (*plan) return cmd_plan(config);
    if (*val) return cmd_validate(config);
    return kUsageError;
}
