#include "sat/trace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sat/error.hpp"

namespace sat {

using nlohmann::json;

namespace {

void dump_value(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (const auto& [k, v] : j.items()) {  // std::map keeps keys sorted
                if (!first) out += ',';
                first = false;
                out += json(k).dump();
                out += ':';
                dump_value(v, out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump_value(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            const double d = j.get<double>();
            if (!std::isfinite(d)) {
                out += "null";
                break;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", d);
            out += buf;
            break;
        }
        default:
            out += j.dump();
    }
}

json vec2(const Vec2& v) { return json::array({v.x, v.y}); }
json state(const KinematicState& s) { return json::array({s.px, s.vx, s.py, s.vy}); }

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::Schema, "malformed trace: " + what); }

Vec2 get_vec2(const json& j) {
    if (!j.is_array() || j.size() != 2) bad("expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

KinematicState get_state(const json& j) {
    if (!j.is_array() || j.size() != 4) bad("expected [x, vx, y, vy]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

StepLog& step_block(Trace& t, int step) {
    if (t.steps.empty() || t.steps.back().step != step) {
        if (!t.steps.empty() && t.steps.back().step > step) bad("steps out of order");
        t.steps.push_back({});
        t.steps.back().step = step;
    }
    return t.steps.back();
}

}  // namespace

std::string trace_to_string(const Trace& trace) {
    std::string out;
    auto emit = [&](const json& j) {
        dump_value(j, out);
        out += '\n';
    };
    if (trace.header) {
        const auto& h = *trace.header;
        emit({{"kind", "header"},
              {"schema_version", h.schema_version},
              {"seed", h.seed},
              {"steps", h.steps},
              {"area", json::array({h.area.x_min, h.area.y_min, h.area.x_max, h.area.y_max})},
              {"cell_side", h.cell_side},
              {"cutoff", h.cutoff},
              {"beta", h.beta},
              {"sensor_side", h.sensor_side},
              {"agent_ids", h.agent_ids}});
    }
    for (const auto& s : trace.steps) {
        json targets = json::array();
        for (const auto& t : s.targets) targets.push_back({{"id", t.id}, {"state", state(t.state)}});
        emit({{"kind", "world"}, {"step", s.step}, {"targets", targets}});
        for (const auto& a : s.agents) {
            json est = json::array();
            for (const auto& e : a.estimates) est.push_back(state(e));
            emit({{"kind", "agent"},
                  {"step", s.step},
                  {"id", a.id},
                  {"position", vec2(a.position)},
                  {"action", vec2(a.action)},
                  {"mode", to_string(a.mode)},
                  {"n_hat", a.n_hat},
                  {"estimates", est},
                  {"coverage", a.coverage},
                  {"searched", a.searched},
                  {"plan_remaining", a.plan_remaining},
                  {"gains", a.gains}});
        }
        for (const auto& m : s.messages) {
            emit({{"kind", "message"}, {"step", s.step}, {"from", m.from}, {"to", m.to}, {"payload", m.payload}});
        }
        for (const auto& o : s.overlaps) {
            emit({{"kind", "overlap"},
                  {"step", s.step},
                  {"agent", o.agent},
                  {"peer", o.peer},
                  {"score_sum", o.score_sum},
                  {"count", o.count},
                  {"decision", o.decision}});
        }
    }
    return out;
}

void write_trace(const Trace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    const std::string text = trace_to_string(trace);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

Trace trace_from_string(const std::string& text) {
    Trace t;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorKind::Parse, "trace line " + std::to_string(lineno) + ": " + e.what());
        }
        try {
            if (!j.is_object() || !j.contains("kind")) bad("line " + std::to_string(lineno) + " has no kind");
            const std::string kind = j.at("kind").get<std::string>();
            if (kind == "header") {
                TraceHeader h;
                h.schema_version = j.at("schema_version").get<std::string>();
                const int major = std::stoi(h.schema_version.substr(0, h.schema_version.find('.')));
                if (major != kTraceSchemaMajor) {
                    bad("unsupported schema version " + h.schema_version);
                }
                h.seed = j.at("seed").get<std::uint64_t>();
                h.steps = j.at("steps").get<int>();
                const auto& a = j.at("area");
                h.area = {a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>(), a.at(3).get<double>()};
                h.cell_side = j.at("cell_side").get<double>();
                h.cutoff = j.at("cutoff").get<double>();
                h.beta = j.at("beta").get<double>();
                h.sensor_side = j.at("sensor_side").get<double>();
                h.agent_ids = j.at("agent_ids").get<std::vector<int>>();
                t.header = h;
                continue;
            }
            if (!t.header) bad("record before header");
            const int step = j.at("step").get<int>();
            auto& block = step_block(t, step);
            if (kind == "world") {
                for (const auto& r : j.at("targets")) block.targets.push_back({r.at("id").get<int>(), get_state(r.at("state"))});
            } else if (kind == "agent") {
                AgentRecordLog a;
                a.id = j.at("id").get<int>();
                a.position = get_vec2(j.at("position"));
                a.action = get_vec2(j.at("action"));
                const auto mode = j.at("mode").get<std::string>();
                if (mode != "search" && mode != "track") bad("unknown mode " + mode);
                a.mode = mode == "track" ? Mode::Track : Mode::Search;
                a.n_hat = j.at("n_hat").get<int>();
                for (const auto& e : j.at("estimates")) a.estimates.push_back(get_state(e));
                a.coverage = j.at("coverage").get<double>();
                a.searched = j.at("searched").get<std::string>();
                a.plan_remaining = j.at("plan_remaining").get<std::size_t>();
                a.gains = j.at("gains").get<std::vector<double>>();
                block.agents.push_back(std::move(a));
            } else if (kind == "message") {
                block.messages.push_back(
                    {j.at("from").get<int>(), j.at("to").get<int>(), j.at("payload").get<std::string>()});
            } else if (kind == "overlap") {
                block.overlaps.push_back({j.at("agent").get<int>(), j.at("peer").get<int>(),
                                          j.at("score_sum").get<double>(), j.at("count").get<int>(),
                                          j.at("decision").get<std::string>()});
            } else {
                bad("unknown record kind " + kind);
            }
        } catch (const json::exception& e) {
            throw Error(ErrorKind::Schema, "trace line " + std::to_string(lineno) + ": " + e.what());
        } catch (const std::invalid_argument&) {
            throw Error(ErrorKind::Schema, "trace line " + std::to_string(lineno) + ": bad schema version");
        }
    }
    return t;
}

Trace read_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open trace '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return trace_from_string(ss.str());
}

}  // namespace sat
