#include "sat/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sat/error.hpp"

namespace sat {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw Error(ErrorKind::Config, what, field);
}

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

// Reads optional members of one JSON object, rejecting unknown keys.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path, std::set<std::string> allowed)
        : j_(j), path_(std::move(path)), allowed_(std::move(allowed)) {
        if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
        for (const auto& [k, _] : j_.items()) {
            if (!allowed_.count(k)) fail(join(path_, k), "unknown key");
        }
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    const json& raw(const std::string& key) const { return j_.at(key); }
    std::string path(const std::string& key) const { return join(path_, key); }

    void number(const std::string& key, double& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number()) fail(path(key), "expected a number");
        out = v.get<double>();
        if (!std::isfinite(out)) fail(path(key), "must be finite");
    }

    template <typename Int>
    void integer(const std::string& key, Int& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) fail(path(key), "expected an integer");
        if constexpr (std::is_unsigned_v<Int>) {
            if (v.get<long long>() < 0) fail(path(key), "must be non-negative");
        }
        out = v.get<Int>();
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> allowed_;
};

Vec2 read_vec2(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        fail(path, "expected [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

KinematicState read_state(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 4) fail(path, "expected [x, vx, y, vy]");
    for (const auto& e : v) {
        if (!e.is_number()) fail(path, "expected [x, vx, y, vy]");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
}

void check(bool ok, const std::string& field, const std::string& what) {
    if (!ok) fail(field, what);
}

}  // namespace

FilterConfig ScenarioConfig::filter_config() const {
    FilterConfig f = filter;
    f.area = area;
    f.motion = motion;
    f.sensor = sensor;
    return f;
}

void validate(const ScenarioConfig& c) {
    check(c.area.width() > 0.0 && c.area.height() > 0.0, "area", "width and height must be positive");
    check(c.cell_side > 0.0, "cell_side", "must be positive");
    {
        const double fx = c.area.width() / c.cell_side;
        const double fy = c.area.height() / c.cell_side;
        check(std::abs(fx - std::round(fx)) <= 1e-9 && std::abs(fy - std::round(fy)) <= 1e-9 && fx >= 1 && fy >= 1,
              "cell_side", "area sides must be integer multiples of the cell side");
    }
    check(c.steps >= 0, "steps", "must be non-negative");

    std::set<AgentId> ids;
    for (std::size_t i = 0; i < c.agents.size(); ++i) {
        const std::string p = "agents[" + std::to_string(i) + "]";
        check(ids.insert(c.agents[i].id).second, p + ".id", "duplicate agent id");
        const Vec2 s = c.agents[i].start;
        check(std::isfinite(s.x) && std::isfinite(s.y) && c.area.contains(s), p + ".start",
              "(" + std::to_string(s.x) + "," + std::to_string(s.y) + ") lies outside the area");
    }
    std::set<int> tids;
    for (std::size_t i = 0; i < c.targets.size(); ++i) {
        const std::string p = "targets[" + std::to_string(i) + "]";
        const auto& t = c.targets[i];
        check(tids.insert(t.id).second, p + ".id", "duplicate target id");
        check(t.birth_step < t.death_step, p + ".death_step", "must be greater than birth_step");
        check(t.birth_state.finite(), p + ".birth_state", "must be finite");
        check(c.area.contains(t.birth_state.position()), p + ".birth_state", "birth position lies outside the area");
    }

    check(c.motion.dt > 0.0, "motion.dt", "must be positive");
    check(c.motion.p_survival > 0.0 && c.motion.p_survival <= 1.0, "motion.p_survival", "must lie in (0,1]");
    check(c.motion.noise_scale >= 0.0, "motion.noise_scale", "must be non-negative");
    check(c.truth_noise_scale >= 0.0, "truth_noise_scale", "must be non-negative");

    const auto& s = c.sensor;
    check(s.p_detect_max >= 0.0 && s.p_detect_max <= 1.0, "sensor.p_detect_max", "must lie in [0,1]");
    check(s.side > 0.0, "sensor.side", "must be positive");
    check(s.range_noise_base >= 0.0, "sensor.range_noise_base", "must be non-negative");
    check(s.range_noise_slope >= 0.0, "sensor.range_noise_slope", "must be non-negative");
    check(s.bearing_noise_base >= 0.0, "sensor.bearing_noise_base", "must be non-negative");
    check(s.bearing_noise_slope >= 0.0, "sensor.bearing_noise_slope", "must be non-negative");
    check(s.range_noise_base > 0.0 && s.bearing_noise_base > 0.0, "sensor",
          "base noise levels must be positive for a proper likelihood");
    check(s.clutter_rate >= 0.0, "sensor.clutter_rate", "must be non-negative");
    check(s.max_range > 0.0, "sensor.max_range", "must be positive");

    const auto& f = c.filter;
    check(f.birth_mass >= 0.0, "filter.birth_mass", "must be non-negative");
    check(f.decay > 0.0 && f.decay <= 1.0, "filter.search_decay", "must lie in (0,1]");
    check(f.birth_velocity_std >= 0.0, "filter.birth_velocity_std", "must be non-negative");
    check(f.birth_focus_fraction >= 0.0 && f.birth_focus_fraction <= 1.0, "filter.birth_focus_fraction",
          "must lie in [0,1]");
    check(f.birth_measurement_fraction >= 0.0 && f.birth_focus_fraction + f.birth_measurement_fraction < 1.0,
          "filter.birth_measurement_fraction", "must be non-negative and leave a uniform share with the focus share");
    check(f.peak_separation >= 0.0, "filter.peak_separation", "must be non-negative");
    check(f.kmeans_iterations >= 1, "filter.kmeans_iterations", "must be at least 1");
    check(c.particles_per_target >= 1, "filter.particles_per_target", "must be at least 1");

    check(c.planner.beta > 0.0 && c.planner.beta < 1.0, "planner.beta", "must lie in (0,1)");
    check(c.overlap.cutoff > 0.0, "overlap.cutoff", "must be positive");
    check(c.overlap.window >= 1, "overlap.window", "must be at least 1");
    check(c.overlap.threshold > 0.0, "overlap.threshold", "must be positive");
    check(c.renyi.alpha > 0.0 && c.renyi.alpha < 1.0, "renyi.alpha", "must lie in (0,1)");

    const auto& k = c.kinematics;
    check(k.radial_step > 0.0, "agent.radial_step", "must be positive");
    check(k.radial_steps >= 1, "agent.radial_steps", "must be at least 1");
    check(k.heading_steps >= 1, "agent.heading_steps", "must be at least 1");
    check(k.comm_range >= 0.0, "agent.comm_range", "must be non-negative");
}

ScenarioConfig parse_scenario(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, std::string("malformed scenario JSON: ") + e.what());
    }

    ScenarioConfig c;
    const ObjectReader top(root, "",
                           {"name", "area", "cell_side", "steps", "agents", "targets", "motion", "truth_noise_scale",
                            "sensor", "filter", "planner", "overlap", "renyi", "agent"});
    if (top.has("area")) {
        const ObjectReader a(top.raw("area"), "area", {"x_min", "y_min", "width", "height"});
        double x0 = 0, y0 = 0, w = c.area.width(), h = c.area.height();
        a.number("x_min", x0);
        a.number("y_min", y0);
        a.number("width", w);
        a.number("height", h);
        c.area = {x0, y0, x0 + w, y0 + h};
    }
    top.number("cell_side", c.cell_side);
    top.integer("steps", c.steps);

    bool max_range_given = false;
    if (top.has("motion")) {
        const ObjectReader m(top.raw("motion"), "motion", {"dt", "p_survival", "noise_scale"});
        m.number("dt", c.motion.dt);
        m.number("p_survival", c.motion.p_survival);
        m.number("noise_scale", c.motion.noise_scale);
        c.truth_noise_scale = c.motion.noise_scale;
    }
    top.number("truth_noise_scale", c.truth_noise_scale);
    if (top.has("sensor")) {
        const ObjectReader s(top.raw("sensor"), "sensor",
                             {"p_detect_max", "side", "range_noise_base", "range_noise_slope", "bearing_noise_base",
                              "bearing_noise_slope", "clutter_rate", "max_range"});
        s.number("p_detect_max", c.sensor.p_detect_max);
        s.number("side", c.sensor.side);
        s.number("range_noise_base", c.sensor.range_noise_base);
        s.number("range_noise_slope", c.sensor.range_noise_slope);
        s.number("bearing_noise_base", c.sensor.bearing_noise_base);
        s.number("bearing_noise_slope", c.sensor.bearing_noise_slope);
        s.number("clutter_rate", c.sensor.clutter_rate);
        max_range_given = s.has("max_range");
        s.number("max_range", c.sensor.max_range);
    }
    if (!max_range_given) c.sensor.max_range = c.area.diagonal();

    if (top.has("filter")) {
        const ObjectReader f(top.raw("filter"), "filter",
                             {"birth_mass", "search_decay", "particles_per_target", "birth_particles",
                              "birth_velocity_std", "birth_focus_fraction", "birth_measurement_fraction",
                              "peak_separation", "kmeans_iterations"});
        f.number("birth_mass", c.filter.birth_mass);
        f.number("search_decay", c.filter.decay);
        f.integer("particles_per_target", c.particles_per_target);
        f.integer("birth_particles", c.birth_particles);
        f.number("birth_velocity_std", c.filter.birth_velocity_std);
        f.number("birth_focus_fraction", c.filter.birth_focus_fraction);
        f.number("birth_measurement_fraction", c.filter.birth_measurement_fraction);
        f.number("peak_separation", c.filter.peak_separation);
        f.integer("kmeans_iterations", c.filter.kmeans_iterations);
    }
    if (top.has("planner")) {
        const ObjectReader p(top.raw("planner"), "planner", {"beta"});
        p.number("beta", c.planner.beta);
    }
    if (top.has("overlap")) {
        const ObjectReader o(top.raw("overlap"), "overlap", {"cutoff", "window", "threshold"});
        o.number("cutoff", c.overlap.cutoff);
        o.integer("window", c.overlap.window);
        o.number("threshold", c.overlap.threshold);
    }
    if (top.has("renyi")) {
        const ObjectReader r(top.raw("renyi"), "renyi", {"alpha"});
        r.number("alpha", c.renyi.alpha);
    }
    if (top.has("agent")) {
        const ObjectReader k(top.raw("agent"), "agent", {"radial_step", "radial_steps", "heading_steps", "comm_range"});
        k.number("radial_step", c.kinematics.radial_step);
        k.integer("radial_steps", c.kinematics.radial_steps);
        k.integer("heading_steps", c.kinematics.heading_steps);
        k.number("comm_range", c.kinematics.comm_range);
    }

    if (top.has("agents")) {
        const auto& arr = top.raw("agents");
        if (!arr.is_array()) fail("agents", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = "agents[" + std::to_string(i) + "]";
            const ObjectReader a(arr[i], p, {"id", "start"});
            AgentSpec spec;
            spec.id = static_cast<AgentId>(i + 1);
            a.integer("id", spec.id);
            if (!a.has("start")) fail(p + ".start", "missing");
            spec.start = read_vec2(a.raw("start"), p + ".start");
            c.agents.push_back(spec);
        }
    }
    if (top.has("targets")) {
        const auto& arr = top.raw("targets");
        if (!arr.is_array()) fail("targets", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = "targets[" + std::to_string(i) + "]";
            const ObjectReader t(arr[i], p, {"id", "birth_step", "death_step", "birth_state"});
            TargetSpec spec;
            spec.id = static_cast<int>(i + 1);
            spec.death_step = c.steps + 1;
            t.integer("id", spec.id);
            t.integer("birth_step", spec.birth_step);
            t.integer("death_step", spec.death_step);
            if (!t.has("birth_state")) fail(p + ".birth_state", "missing");
            spec.birth_state = read_state(t.raw("birth_state"), p + ".birth_state");
            c.targets.push_back(spec);
        }
    }

    validate(c);
    return c;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(ErrorKind::Io, "failed reading scenario file '" + path + "'");
    return parse_scenario(ss.str());
}

std::string scenario_to_json(const ScenarioConfig& c) {
    json j;
    j["area"] = {{"x_min", c.area.x_min}, {"y_min", c.area.y_min}, {"width", c.area.width()}, {"height", c.area.height()}};
    j["cell_side"] = c.cell_side;
    j["steps"] = c.steps;
    j["agents"] = json::array();
    for (const auto& a : c.agents) j["agents"].push_back({{"id", a.id}, {"start", {a.start.x, a.start.y}}});
    j["targets"] = json::array();
    for (const auto& t : c.targets) {
        const auto& s = t.birth_state;
        j["targets"].push_back({{"id", t.id},
                                {"birth_step", t.birth_step},
                                {"death_step", t.death_step},
                                {"birth_state", {s.px, s.vx, s.py, s.vy}}});
    }
    j["motion"] = {{"dt", c.motion.dt}, {"p_survival", c.motion.p_survival}, {"noise_scale", c.motion.noise_scale}};
    j["truth_noise_scale"] = c.truth_noise_scale;
    const auto& s = c.sensor;
    j["sensor"] = {{"p_detect_max", s.p_detect_max},         {"side", s.side},
                   {"range_noise_base", s.range_noise_base}, {"range_noise_slope", s.range_noise_slope},
                   {"bearing_noise_base", s.bearing_noise_base}, {"bearing_noise_slope", s.bearing_noise_slope},
                   {"clutter_rate", s.clutter_rate},         {"max_range", s.max_range}};
    const auto& f = c.filter;
    j["filter"] = {{"birth_mass", f.birth_mass},
                   {"search_decay", f.decay},
                   {"particles_per_target", c.particles_per_target},
                   {"birth_particles", c.birth_particles},
                   {"birth_velocity_std", f.birth_velocity_std},
                   {"birth_focus_fraction", f.birth_focus_fraction},
                   {"birth_measurement_fraction", f.birth_measurement_fraction},
                   {"peak_separation", f.peak_separation},
                   {"kmeans_iterations", f.kmeans_iterations}};
    j["planner"] = {{"beta", c.planner.beta}};
    j["overlap"] = {{"cutoff", c.overlap.cutoff}, {"window", c.overlap.window}, {"threshold", c.overlap.threshold}};
    j["renyi"] = {{"alpha", c.renyi.alpha}};
    const auto& k = c.kinematics;
    j["agent"] = {{"radial_step", k.radial_step},
                  {"radial_steps", k.radial_steps},
                  {"heading_steps", k.heading_steps},
                  {"comm_range", k.comm_range}};
    return j.dump();
}

}  // namespace sat
