#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "sat/error.hpp"
#include "sat/planner.hpp"

using namespace sat;

namespace {

const Rect kArea{0, 0, 100, 100};

std::set<NodeId> all_nodes(const SearchMap& m) {
    std::set<NodeId> s;
    for (const auto& n : m.nodes) s.insert(n.id);
    return s;
}

std::set<NodeId> random_subset(Rng& rng, std::size_t n) {
    std::bernoulli_distribution keep(0.5);
    std::set<NodeId> s;
    for (std::size_t i = 0; i < n; ++i) {
        if (keep(rng)) s.insert(i);
    }
    return s;
}

}  // namespace

TEST_CASE("search map lattice") {
    const auto m = build_search_map(kArea, 10);
    CHECK(m.size() == 100);
    CHECK(m.adjacency[0].size() == 3);
    CHECK(m.adjacency[m.nodes.size() - 1].size() == 3);
    CHECK(m.adjacency[55].size() == 8);
    CHECK(m.adjacency[5].size() == 5);
    for (const auto& e : m.adjacency[55]) {
        const auto& a = m.nodes[55];
        const auto& b = m.nodes[e.to];
        const bool diagonal = a.i != b.i && a.j != b.j;
        CHECK(e.cost == doctest::Approx(diagonal ? 10 * std::sqrt(2.0) : 10.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(build_search_map(kArea, 30), Error);
}

TEST_CASE("unvisited nodes") {
    const auto m = build_search_map(kArea, 10);
    SearchGrid g(kArea, 10);
    CHECK(unvisited_nodes(m, g, {}).size() == 100);
    for (std::size_t c = 0; c < g.cell_count(); ++c) g.set_value(c, 1.0);
    CHECK(unvisited_nodes(m, g, {}).empty());
    g.set_value(7, 0.904792);
    CHECK(unvisited_nodes(m, g, {0.4}).empty());
    PlannerConfig high;
    high.beta = 0.95;
    CHECK(unvisited_nodes(m, g, high) == std::set<NodeId>{7});
    CHECK_THROWS_AS(unvisited_nodes(m, SearchGrid(kArea, 20), {}), Error);
}

TEST_CASE("stale nodes cover at least half the map") {
    const auto m = build_search_map(kArea, 10);
    SearchGrid g(kArea, 10);
    for (std::size_t c = 0; c < g.cell_count(); ++c) g.set_value(c, 0.5 + 0.004 * static_cast<double>(c));
    const auto s = stale_nodes(m, g);
    CHECK(s.size() == 50);
    CHECK(*s.rbegin() == 49);
    SearchGrid flat(kArea, 10);
    CHECK(stale_nodes(m, flat).size() == 100);
}

TEST_CASE("plan walk") {
    const auto m = build_search_map(kArea, 10);
    CHECK(plan_walk(m, {50, 50}, {}).nodes.empty());
    CHECK(plan_walk(m, {50, 50}, {42}).nodes == std::vector<NodeId>{42});
    // Centers at x = 15, 25, 35 in the bottom row, start left of all of them.
    const auto p = plan_walk(m, {0, 5}, {3, 1, 2});
    CHECK(p.nodes == std::vector<NodeId>{1, 2, 3});

    Rng rng = make_stream(1, "walk");
    for (int t = 0; t < 100; ++t) {
        const auto u = random_subset(rng, 100);
        const auto w = plan_walk(m, {37, 81}, u);
        CHECK(w.nodes.size() == u.size());
        CHECK(std::set<NodeId>(w.nodes.begin(), w.nodes.end()) == u);
    }
}

TEST_CASE("joint walks") {
    const auto m = build_search_map(kArea, 10);
    CHECK_THROWS_AS(plan_joint_walks(m, {}, {1, 2}), Error);
    const auto single = plan_joint_walks(m, {{12, 77}}, all_nodes(m));
    CHECK(single[0].nodes == plan_walk(m, {12, 77}, all_nodes(m)).nodes);

    const auto corners = plan_joint_walks(m, {{0, 0}, {100, 100}}, all_nodes(m));
    const auto d = static_cast<long>(corners[0].nodes.size()) - static_cast<long>(corners[1].nodes.size());
    CHECK(std::abs(d) <= 1);

    // Node 0 is nearest agent A, node 99 nearest agent B.
    const auto two = plan_joint_walks(m, {{1, 1}, {99, 99}}, {0, 99});
    CHECK(two[0].nodes == std::vector<NodeId>{0});
    CHECK(two[1].nodes == std::vector<NodeId>{99});

    SUBCASE("property: disjoint plans covering the unvisited set") {
        Rng rng = make_stream(2, "joint");
        std::uniform_real_distribution<double> pos(0, 100);
        for (int agents = 1; agents <= 4; ++agents) {
            for (int t = 0; t < 50; ++t) {
                const auto u = random_subset(rng, 100);
                std::vector<Vec2> starts;
                for (int a = 0; a < agents; ++a) starts.push_back({pos(rng), pos(rng)});
                const auto plans = plan_joint_walks(m, starts, u);
                REQUIRE(plans.size() == static_cast<std::size_t>(agents));
                std::set<NodeId> seen;
                std::size_t total = 0;
                for (const auto& p : plans) {
                    total += p.nodes.size();
                    seen.insert(p.nodes.begin(), p.nodes.end());
                }
                CHECK(total == seen.size());
                CHECK(seen == u);
            }
        }
    }
}

TEST_CASE("grid fusion") {
    SearchGrid a(kArea, 10), b(kArea, 10);
    Rng rng = make_stream(3, "fuse");
    std::uniform_real_distribution<double> u(0, 1);
    for (std::size_t c = 0; c < a.cell_count(); ++c) {
        a.set_value(c, u(rng));
        b.set_value(c, u(rng));
    }
    const auto same = fuse_search_grids(a, {});
    const auto ab = fuse_search_grids(a, {b});
    const auto ba = fuse_search_grids(b, {a});
    for (std::size_t c = 0; c < a.cell_count(); ++c) {
        CHECK(same.value(c) == a.value(c));
        CHECK(ab.value(c) == ba.value(c));
        CHECK(ab.value(c) >= a.value(c));
        CHECK(ab.value(c) >= b.value(c));
    }
    CHECK_THROWS_AS(fuse_search_grids(a, {SearchGrid(kArea, 20)}), Error);
}

TEST_CASE("search control") {
    const auto m = build_search_map(kArea, 10);
    AgentKinematics k;
    WalkPlan p;
    p.nodes = {m.nodes[0].id};
    const Vec2 at_center{5, 5};
    CHECK(search_control(at_center, p, m, admissible_actions(at_center, k, kArea)) == at_center);

    // Next node 2 m due east of the agent.
    const Vec2 s{13, 5};
    p.nodes = {1};
    const auto east = search_control(s, p, m, admissible_actions(s, k, kArea));
    REQUIRE(east);
    CHECK(east->x == doctest::Approx(15.0));
    CHECK(east->y == doctest::Approx(5.0));

    // Two actions equally close to the target: the lower index wins.
    const std::vector<Vec2> tie{{14, 5}, {16, 5}};
    p.nodes = {1};
    CHECK(search_control(s, p, m, tie) == Vec2{14, 5});

    WalkPlan done;
    CHECK_FALSE(search_control(s, done, m, tie).has_value());
}

TEST_CASE("mark visited") {
    const auto m = build_search_map(kArea, 10);
    SensorModel sensor;
    WalkPlan p;
    p.nodes = {0, 1, 2};
    CHECK(mark_visited(p, {5, 5}, m, sensor).cursor == 1);
    CHECK(mark_visited(p, {10 + 1e-9, 5}, m, sensor).cursor == 0);
    // A 10 m square centered on the shared edge covers both centers.
    CHECK(mark_visited(p, {10, 5}, m, sensor).cursor == 2);
    CHECK(mark_visited(p, {60, 60}, m, sensor).cursor == 0);
}
