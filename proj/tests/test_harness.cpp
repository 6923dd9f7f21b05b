#include <cmath>

#include "doctest.h"
#include "sat/harness.hpp"

using namespace sat;

namespace {

ScenarioConfig small_scenario() {
    ScenarioConfig c;
    c.steps = 12;
    c.agents = {{1, {20, 20}}, {2, {80, 80}}};
    c.targets = {{7, 3, 8, {50, 1, 50, 0}}};
    c.particles_per_target = 200;
    c.birth_particles = 50;
    return c;
}

}  // namespace

TEST_CASE("ground truth schedule") {
    auto targets = make_targets({{1, 3, 6, {10, 1, 20, -1}}});
    MotionModel m;
    m.noise_scale = 0.0;
    Rng rng = make_stream(1, "world");
    for (int k = 1; k <= 7; ++k) {
        step_world(targets, k, m, rng);
        CHECK(targets[0].alive(k) == (k >= 3 && k < 6));
        if (k == 3) CHECK(targets[0].state.px == 10.0);
        if (k == 5) {
            CHECK(targets[0].state.px == doctest::Approx(12.0));
            CHECK(targets[0].state.py == doctest::Approx(18.0));
        }
    }
}

TEST_CASE("measurements only come from live targets in view") {
    SensorModel quiet;
    quiet.clutter_rate = 0.0;
    quiet.p_detect_max = 1.0;
    auto targets = make_targets({{1, 1, 5, {52, 0, 51, 0}}, {2, 1, 5, {90, 0, 90, 0}}});
    MotionModel m;
    Rng rng = make_stream(2, "meas");
    step_world(targets, 1, m, rng);
    AgentRecord a;
    a.position = {50, 50};
    const auto z = generate_measurements(targets, 1, a, quiet, rng);
    REQUIRE(z.size() == 1);
    const Vec2 back = unproject(z[0], a.position);
    CHECK(distance(back, {52, 51}) < 8.0);
    CHECK(generate_measurements(targets, 5, a, quiet, rng).empty());
}

TEST_CASE("communication graph") {
    std::vector<AgentRecord> agents(3);
    agents[0].position = {0, 0};
    agents[1].position = {30, 40};
    agents[2].position = {100, 100};
    const auto adj = comm_graph(agents, 50.0);
    CHECK(adj[0][1]);
    CHECK(adj[1][0]);
    CHECK_FALSE(adj[0][2]);
    CHECK_FALSE(adj[0][0]);
    CHECK(adj[1][2] == (distance(agents[1].position, agents[2].position) <= 50.0));
}

TEST_CASE("run records every step and agent") {
    const auto sc = small_scenario();
    const Trace t = run(sc, 3);
    REQUIRE(t.header);
    CHECK(t.header->seed == 3);
    CHECK(t.header->agent_ids == std::vector<int>{1, 2});
    REQUIRE(t.steps.size() == 12);
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
        const auto& s = t.steps[k];
        CHECK(s.step == static_cast<int>(k) + 1);
        CHECK(s.agents.size() == 2);
        const bool alive = s.step >= 3 && s.step < 8;
        CHECK(s.targets.size() == (alive ? 1u : 0u));
        for (const auto& a : s.agents) {
            CHECK(sc.area.contains(a.position));
            CHECK(distance(a.position, a.action) <= 4.0 + 1e-9);
            CHECK(a.coverage >= 0.0);
            CHECK(a.coverage <= 1.0);
        }
    }
    for (std::size_t k = 1; k < t.steps.size(); ++k) {
        for (std::size_t i = 0; i < 2; ++i) CHECK(t.steps[k].agents[i].position == t.steps[k - 1].agents[i].action);
    }
}

TEST_CASE("run is reproducible and seed dependent") {
    const auto sc = small_scenario();
    const auto a = trace_to_string(run(sc, 11));
    CHECK(a == trace_to_string(run(sc, 11)));
    CHECK(a != trace_to_string(run(sc, 12)));
}
