#include "sat/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sat/error.hpp"

namespace sat {

SearchMap build_search_map(const Rect& area, double cell_side) {
    // Reuse the grid's divisibility check so map and grid agree on tiling.
    const SearchGrid grid(area, cell_side);
    SearchMap map;
    map.area = area;
    map.cell_side = cell_side;
    map.nx = grid.nx();
    map.ny = grid.ny();
    map.nodes.reserve(grid.cell_count());
    for (std::size_t id = 0; id < grid.cell_count(); ++id) {
        map.nodes.push_back({id, grid.center(id), static_cast<int>(id % map.nx), static_cast<int>(id / map.nx)});
    }
    map.adjacency.resize(map.nodes.size());
    for (const auto& n : map.nodes) {
        for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                if (di == 0 && dj == 0) continue;
                const int i = n.i + di;
                const int j = n.j + dj;
                if (i < 0 || j < 0 || i >= map.nx || j >= map.ny) continue;
                const NodeId to = static_cast<NodeId>(j) * map.nx + i;
                map.adjacency[n.id].push_back({to, distance(n.center, map.nodes[to].center)});
            }
        }
    }
    return map;
}

std::set<NodeId> unvisited_nodes(const SearchMap& map, const SearchGrid& grid, const PlannerConfig& cfg) {
    if (!map.matches(grid)) throw Error(ErrorKind::InvalidArgument, "search map and grid tilings differ");
    std::set<NodeId> out;
    for (const auto& n : map.nodes) {
        if (grid.value(n.id) <= cfg.beta) out.insert(n.id);
    }
    return out;
}

std::set<NodeId> stale_nodes(const SearchMap& map, const SearchGrid& grid) {
    if (!map.matches(grid)) throw Error(ErrorKind::InvalidArgument, "search map and grid tilings differ");
    std::vector<double> v;
    v.reserve(map.size());
    for (const auto& n : map.nodes) v.push_back(grid.value(n.id));
    if (v.empty()) return {};
    auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
    std::nth_element(v.begin(), mid, v.end());
    const double median = *mid;
    std::set<NodeId> out;
    for (const auto& n : map.nodes) {
        if (grid.value(n.id) <= median) out.insert(n.id);
    }
    return out;
}

namespace {

// Lowest-id node in `pool` nearest to `from`; pool must be non-empty.
NodeId nearest(const SearchMap& map, const Vec2& from, const std::set<NodeId>& pool) {
    NodeId best = *pool.begin();
    double best_d = std::numeric_limits<double>::infinity();
    for (NodeId id : pool) {
        const double d = squared_distance(from, map.nodes.at(id).center);
        if (d < best_d) {
            best_d = d;
            best = id;
        }
    }
    return best;
}

}  // namespace

WalkPlan plan_walk(const SearchMap& map, const Vec2& start, const std::set<NodeId>& unvisited) {
    return plan_joint_walks(map, {start}, unvisited).front();
}

std::vector<WalkPlan> plan_joint_walks(const SearchMap& map, const std::vector<Vec2>& starts,
                                       const std::set<NodeId>& unvisited) {
    if (starts.empty()) throw Error(ErrorKind::InvalidArgument, "joint planning needs at least one agent");
    std::vector<WalkPlan> plans(starts.size());
    std::vector<Vec2> tails = starts;
    std::set<NodeId> pool = unvisited;
    while (!pool.empty()) {
        for (std::size_t a = 0; a < plans.size() && !pool.empty(); ++a) {
            const NodeId next = nearest(map, tails[a], pool);
            plans[a].nodes.push_back(next);
            tails[a] = map.nodes[next].center;
            pool.erase(next);
        }
    }
    return plans;
}

SearchGrid fuse_search_grids(const SearchGrid& local, const std::vector<SearchGrid>& remotes) {
    SearchGrid out = local;
    for (const auto& r : remotes) {
        if (!r.same_tiling(local)) throw Error(ErrorKind::InvalidArgument, "cannot fuse grids with different tilings");
        for (std::size_t c = 0; c < out.cell_count(); ++c) out.set_value(c, std::max(out.value(c), r.value(c)));
    }
    return out;
}

std::optional<Vec2> search_control([[maybe_unused]] const Vec2& s, const WalkPlan& plan, const SearchMap& map,
                                   const std::vector<Vec2>& actions) {
    if (plan.exhausted() || actions.empty()) return std::nullopt;
    const Vec2 goal = map.nodes.at(plan.nodes[plan.cursor]).center;
    std::size_t best = 0;
    double best_d = squared_distance(actions[0], goal);
    for (std::size_t a = 1; a < actions.size(); ++a) {
        const double d = squared_distance(actions[a], goal);
        if (d < best_d) {
            best_d = d;
            best = a;
        }
    }
    return actions[best];
}

WalkPlan mark_visited(WalkPlan plan, const Vec2& s, const SearchMap& map, const SensorModel& sensor) {
    while (!plan.exhausted() && in_footprint(map.nodes.at(plan.nodes[plan.cursor]).center, s, sensor)) {
        ++plan.cursor;
    }
    return plan;
}

}  // namespace sat
