#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "sat/filter.hpp"
#include "sat/models.hpp"
#include "sat/types.hpp"

namespace sat {

using NodeId = std::size_t;

struct SearchNode {
    NodeId id = 0;
    Vec2 center;
    int i = 0;
    int j = 0;
};

struct SearchEdge {
    NodeId to = 0;
    double cost = 0.0;
};

/// Lattice graph over the search cells, 8-connected, Euclidean edge costs.
struct SearchMap {
    Rect area;
    double cell_side = 0.0;
    int nx = 0;
    int ny = 0;
    std::vector<SearchNode> nodes;
    std::vector<std::vector<SearchEdge>> adjacency;

    std::size_t size() const { return nodes.size(); }
    bool matches(const SearchGrid& grid) const {
        return grid.area() == area && grid.cell_side() == cell_side && grid.nx() == nx && grid.ny() == ny;
    }
};

struct PlannerConfig {
    double beta = 0.4;
};

/// Ordered walk through search nodes; `cursor` indexes the next node to visit.
struct WalkPlan {
    std::vector<NodeId> nodes;
    std::size_t cursor = 0;

    bool exhausted() const { return cursor >= nodes.size(); }
    std::size_t remaining() const { return exhausted() ? 0 : nodes.size() - cursor; }
};

SearchMap build_search_map(const Rect& area, double cell_side);

/// Nodes whose search value is <= beta, ascending.
std::set<NodeId> unvisited_nodes(const SearchMap& map, const SearchGrid& grid, const PlannerConfig& cfg);

/// Nodes whose search value is at or below the median value. Used for patrolling once nothing is unvisited.
std::set<NodeId> stale_nodes(const SearchMap& map, const SearchGrid& grid);

/// Greedy cheapest-arc walk over the metric closure of the lattice.
WalkPlan plan_walk(const SearchMap& map, const Vec2& start, const std::set<NodeId>& unvisited);

/// Round-robin joint construction; walk k belongs to starts[k]. Throws
/// InvalidArgument when `starts` is empty.
std::vector<WalkPlan> plan_joint_walks(const SearchMap& map, const std::vector<Vec2>& starts,
                                       const std::set<NodeId>& unvisited);

/// Cell-wise max of search values. Throws InvalidArgument on tiling mismatch.
SearchGrid fuse_search_grids(const SearchGrid& local, const std::vector<SearchGrid>& remotes);

/// Action closest to the cursor node; nullopt means the plan is exhausted and
/// a new one is needed.
std::optional<Vec2> search_control(const Vec2& s, const WalkPlan& plan, const SearchMap& map,
                                   const std::vector<Vec2>& actions);

/// Advances the cursor past every leading node inside the footprint at s.
WalkPlan mark_visited(WalkPlan plan, const Vec2& s, const SearchMap& map, const SensorModel& sensor);

}  // namespace sat
