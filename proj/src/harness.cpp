#include "sat/harness.hpp"

#include <algorithm>

#include "sat/error.hpp"

namespace sat {

const char* to_string(PayloadKind k) {
    switch (k) {
        case PayloadKind::SearchGrid: return "search_grid";
        case PayloadKind::PredictedStates: return "predicted_states";
        case PayloadKind::Mode: return "mode";
    }
    return "unknown";
}

SimContext::SimContext(const ScenarioConfig& cfg)
    : scenario(cfg), filter(cfg.filter_config()), map(build_search_map(cfg.area, cfg.cell_side)) {}

std::vector<GroundTruthTarget> make_targets(const std::vector<TargetSpec>& specs) {
    std::vector<GroundTruthTarget> out;
    out.reserve(specs.size());
    for (const auto& s : specs) out.push_back({s.id, s.birth_step, s.death_step, s.birth_state, s.birth_state, false});
    return out;
}

AgentRecord make_agent(const AgentSpec& spec, const SimContext& ctx) {
    AgentRecord a;
    a.id = spec.id;
    a.position = spec.start;
    a.last_update_position = spec.start;
    a.filter.grid = SearchGrid(ctx.scenario.area, ctx.scenario.cell_side);
    a.filter.particles.per_target = ctx.scenario.particles_per_target;
    a.filter.particles.birth_count = ctx.scenario.birth_particles;
    return a;
}

void step_world(std::vector<GroundTruthTarget>& targets, int k, const MotionModel& model, Rng& rng) {
    for (auto& t : targets) {
        if (!t.born) {
            if (k >= t.birth_step && k < t.death_step) {
                t.born = true;
                t.state = t.birth_state;
            }
            continue;
        }
        if (k < t.death_step) t.state = transition_sample(t.state, model, rng);
    }
}

std::vector<Measurement> generate_measurements(const std::vector<GroundTruthTarget>& targets, int k,
                                               const AgentRecord& agent, const SensorModel& sensor, Rng& rng) {
    std::vector<Measurement> z;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (const auto& t : targets) {
        if (!t.alive(k)) continue;
        const double pd = detection_prob(t.state, agent.position, sensor, TargetLabel::True);
        const double u = u01(rng);
        if (u >= pd) continue;
        if (t.state.px == agent.position.x && t.state.py == agent.position.y) continue;
        z.push_back(measure(t.state, agent.position, sensor, rng));
    }
    const auto clutter = clutter_sample(sensor, rng);
    z.insert(z.end(), clutter.begin(), clutter.end());
    return z;
}

Adjacency comm_graph(const std::vector<AgentRecord>& agents, double comm_range) {
    const std::size_t n = agents.size();
    Adjacency adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool linked = distance(agents[i].position, agents[j].position) <= comm_range;
            adj[i][j] = adj[j][i] = linked;
        }
    }
    return adj;
}

namespace {

struct Announcement {
    Mode mode = Mode::Search;
    std::vector<Vec2> predicted;
};

std::vector<Vec2> positions(const std::vector<KinematicState>& xs) {
    std::vector<Vec2> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(x.position());
    return out;
}

bool all_claimed(const std::vector<KinematicState>& mine, const std::vector<Vec2>& theirs, double radius) {
    for (const auto& x : mine) {
        bool near = false;
        for (const auto& y : theirs) near = near || distance(x.position(), y) <= radius;
        if (!near) return false;
    }
    return true;
}

void skip_covered(WalkPlan& plan, const AgentRecord& a, const SimContext& ctx) {
    plan = mark_visited(std::move(plan), a.position, ctx.map, ctx.scenario.sensor);
    while (!a.patrol && !plan.exhausted() && a.filter.grid.value(plan.nodes[plan.cursor]) > ctx.scenario.planner.beta) {
        ++plan.cursor;
        plan = mark_visited(std::move(plan), a.position, ctx.map, ctx.scenario.sensor);
    }
}

}  // namespace

StepOutput step_agents(std::vector<AgentRecord>& agents, const std::vector<std::vector<Measurement>>& z,
                       const Adjacency& adjacency, const SimContext& ctx, std::vector<Rng>& rngs) {
    const std::size_t n = agents.size();
    if (z.size() != n || rngs.size() != n || adjacency.size() != n) {
        throw Error(ErrorKind::InvalidArgument, "step_agents inputs must be indexed like the agent list");
    }
    const auto& sc = ctx.scenario;
    const auto& fcfg = ctx.filter;
    StepOutput out;
    out.sensed_at.resize(n);
    out.gains.resize(n);

    // Local filtering: predict, correct, estimate, mode.
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = agents[i];
        out.sensed_at[i] = a.position;
        const Rect footprint = sc.sensor.footprint(a.position);
        FilterState pred = predict(a.filter.particles, a.filter.grid, a.last_update_position, fcfg, rngs[i],
                                   BirthProposal{footprint, z[i], a.position});

        const ParticleSet near = restrict_to(pred.particles, reachable_footprint(a.position, sc.kinematics, sc.sensor));
        a.predicted_states = extract_states(near, round_count(near.mass()), fcfg.peak_separation, fcfg.kmeans_iterations);

        FilterState post = update(pred.particles, pred.grid, z[i], a.position, fcfg);
        const ParticleSet seen = restrict_to(post.particles, footprint);
        a.n_hat = round_count(seen.mass());
        a.estimates = extract_states(seen, a.n_hat, fcfg.peak_separation, fcfg.kmeans_iterations);
        a.filter.particles = resample(post.particles, rngs[i]);
        a.filter.grid = std::move(post.grid);
        a.last_update_position = a.position;

        a.mode = a.n_hat >= 1 ? Mode::Track : Mode::Search;
        if (a.handoff_peer) {
            const auto it = a.last_peer_states.find(*a.handoff_peer);
            if (a.n_hat >= 1 && it != a.last_peer_states.end() &&
                all_claimed(a.estimates, it->second, sc.overlap.cutoff)) {
                a.mode = Mode::Search;
            } else {
                a.handoff_peer.reset();
            }
        }
    }

    // Exchange: every message is built from this round's local results.
    std::vector<Announcement> ann(n);
    for (std::size_t i = 0; i < n; ++i) ann[i] = {agents[i].mode, positions(agents[i].predicted_states)};
    std::vector<SearchGrid> snapshots;
    snapshots.reserve(n);
    for (std::size_t i = 0; i < n; ++i) snapshots.push_back(agents[i].filter.grid);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || !adjacency[i][j]) continue;
            Message m;
            m.sender = agents[i].id;
            m.receiver = agents[j].id;
            m.kind = PayloadKind::SearchGrid;
            m.grid = snapshots[i];
            out.messages.push_back(m);
            Message p;
            p.sender = agents[i].id;
            p.receiver = agents[j].id;
            p.kind = PayloadKind::PredictedStates;
            p.predicted = ann[i].predicted;
            out.messages.push_back(std::move(p));
            Message md;
            md.sender = agents[i].id;
            md.receiver = agents[j].id;
            md.kind = PayloadKind::Mode;
            md.mode = ann[i].mode;
            out.messages.push_back(std::move(md));
        }
    }

    // Cooperation and control, ascending id.
    std::vector<Vec2> chosen(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = agents[i];
        std::vector<std::size_t> nbrs;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && adjacency[i][j]) nbrs.push_back(j);
        }

        std::vector<SearchGrid> remote;
        a.last_peer_states.clear();
        for (std::size_t j : nbrs) {
            remote.push_back(snapshots[j]);
            a.last_peer_states[agents[j].id] = ann[j].predicted;
        }
        a.filter.grid = fuse_search_grids(a.filter.grid, remote);

        const Mode announced = a.mode;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const AgentId peer = agents[j].id;
            const bool linked = adjacency[i][j];
            if (linked && announced == Mode::Track && ann[j].mode == Mode::Track && !ann[i].predicted.empty() &&
                !ann[j].predicted.empty()) {
                a.ledger = overlap_step(std::move(a.ledger), peer, ann[i].predicted, ann[j].predicted, a.position,
                                        agents[j].position, sc.sensor, sc.overlap);
                const auto decision = resolve_overlap(a.ledger, a.id, peer, sc.overlap);
                const auto& e = a.ledger.at(peer);
                if (e.count > 0) {
                    out.overlaps.push_back({a.id, peer, e.sum, e.count,
                                            decision == OverlapDecision::ExitToSearch ? "exit_to_search" : "continue"});
                }
                if (decision == OverlapDecision::ExitToSearch && a.mode == Mode::Track) {
                    a.mode = Mode::Search;
                    a.handoff_peer = peer;
                    a.needs_replan = true;
                    a.ledger.reset(peer);
                }
            } else if (a.ledger.peers.count(peer)) {
                a.ledger.reset(peer);
            }
        }

        const auto actions = admissible_actions(a.position, sc.kinematics, sc.area);
        std::optional<Vec2> action;
        if (a.mode == Mode::Track) {
            TrackDecision d = track_control(a.filter.particles, a.filter.grid, a.position, sc.kinematics, fcfg, sc.renyi,
                                            rngs[i]);
            if (d.action) {
                action = d.action;
                out.gains[i] = std::move(d.gains);
            } else {
                a.mode = Mode::Search;
                a.needs_replan = true;
            }
        }

        std::set<AgentId> group;
        if (announced == Mode::Search) {
            group.insert(a.id);
            for (std::size_t j : nbrs) {
                if (ann[j].mode == Mode::Search) group.insert(agents[j].id);
            }
        }
        if (a.mode == Mode::Search) {
            bool replan = a.needs_replan;
            for (AgentId id : group) replan = replan || !a.searching_peers.count(id);
            for (std::size_t j : nbrs) {
                if (a.searching_peers.count(agents[j].id) && ann[j].mode == Mode::Track) replan = true;
            }
            skip_covered(a.plan, a, ctx);
            if (a.plan.exhausted()) replan = true;
            if (replan) {
                auto unvisited = unvisited_nodes(ctx.map, a.filter.grid, sc.planner);
                a.patrol = unvisited.empty();
                if (a.patrol) unvisited = stale_nodes(ctx.map, a.filter.grid);
                std::vector<Vec2> starts;
                std::size_t own = 0;
                if (group.size() > 1) {
                    for (std::size_t j = 0; j < n; ++j) {
                        if (group.count(agents[j].id)) {
                            if (j == i) own = starts.size();
                            starts.push_back(agents[j].position);
                        }
                    }
                } else {
                    starts.push_back(a.position);
                }
                a.plan = plan_joint_walks(ctx.map, starts, unvisited)[own];
                skip_covered(a.plan, a, ctx);
                a.needs_replan = false;
            }
            action = search_control(a.position, a.plan, ctx.map, actions);
        }
        a.searching_peers = std::move(group);
        chosen[i] = action.value_or(a.position);
    }

    for (std::size_t i = 0; i < n; ++i) agents[i].position = chosen[i];
    return out;
}

Trace run(const ScenarioConfig& scenario, std::uint64_t seed) {
    validate(scenario);
    const SimContext ctx(scenario);

    std::vector<AgentSpec> specs = scenario.agents;
    std::sort(specs.begin(), specs.end(), [](const AgentSpec& a, const AgentSpec& b) { return a.id < b.id; });
    std::vector<AgentRecord> agents;
    std::vector<Rng> filter_rngs;
    std::vector<Rng> sense_rngs;
    for (const auto& s : specs) {
        agents.push_back(make_agent(s, ctx));
        filter_rngs.push_back(make_stream(seed, "filter", static_cast<std::uint64_t>(s.id)));
        sense_rngs.push_back(make_stream(seed, "sense", static_cast<std::uint64_t>(s.id)));
    }
    auto targets = make_targets(scenario.targets);
    Rng world_rng = make_stream(seed, "world");
    MotionModel truth = scenario.motion;
    truth.noise_scale = scenario.truth_noise_scale;

    Trace trace;
    TraceHeader h;
    h.seed = seed;
    h.steps = scenario.steps;
    h.area = scenario.area;
    h.cell_side = scenario.cell_side;
    h.cutoff = scenario.overlap.cutoff;
    h.beta = scenario.planner.beta;
    h.sensor_side = scenario.sensor.side;
    for (const auto& s : specs) h.agent_ids.push_back(s.id);
    trace.header = h;

    for (int k = 1; k <= scenario.steps; ++k) {
        step_world(targets, k, truth, world_rng);
        std::vector<std::vector<Measurement>> z(agents.size());
        for (std::size_t i = 0; i < agents.size(); ++i) {
            z[i] = generate_measurements(targets, k, agents[i], scenario.sensor, sense_rngs[i]);
        }
        const Adjacency adj = comm_graph(agents, scenario.kinematics.comm_range);
        StepOutput so = step_agents(agents, z, adj, ctx, filter_rngs);

        StepLog log;
        log.step = k;
        for (const auto& t : targets) {
            if (t.alive(k)) log.targets.push_back({t.id, t.state});
        }
        for (std::size_t i = 0; i < agents.size(); ++i) {
            const auto& a = agents[i];
            AgentRecordLog r;
            r.id = a.id;
            r.position = so.sensed_at[i];
            r.action = a.position;
            r.mode = a.mode;
            r.n_hat = a.n_hat;
            r.estimates = a.estimates;
            std::size_t covered = 0;
            r.searched.reserve(a.filter.grid.cell_count());
            for (std::size_t c = 0; c < a.filter.grid.cell_count(); ++c) {
                const bool on = a.filter.grid.value(c) > scenario.planner.beta;
                covered += on;
                r.searched.push_back(on ? '1' : '0');
            }
            r.coverage = static_cast<double>(covered) / static_cast<double>(a.filter.grid.cell_count());
            r.plan_remaining = a.plan.remaining();
            r.gains = std::move(so.gains[i]);
            log.agents.push_back(std::move(r));
        }
        for (const auto& m : so.messages) log.messages.push_back({m.sender, m.receiver, to_string(m.kind)});
        log.overlaps = std::move(so.overlaps);
        trace.steps.push_back(std::move(log));
    }
    return trace;
}

}  // namespace sat
