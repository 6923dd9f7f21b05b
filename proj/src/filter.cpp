#include "sat/filter.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

#include "sat/error.hpp"

namespace sat {

double ParticleSet::mass() const {
    double m = 0.0;
    for (const auto& p : particles) m += p.weight;
    return m;
}

SearchGrid::SearchGrid(const Rect& area, double cell_side) : area_(area), cell_side_(cell_side) {
    if (!(cell_side > 0.0) || !(area.width() > 0.0) || !(area.height() > 0.0)) {
        throw Error(ErrorKind::Config, "area and cell side must be positive", "cell_side");
    }
    const double fx = area.width() / cell_side;
    const double fy = area.height() / cell_side;
    nx_ = static_cast<int>(std::lround(fx));
    ny_ = static_cast<int>(std::lround(fy));
    if (nx_ < 1 || ny_ < 1 || std::abs(fx - nx_) > 1e-9 || std::abs(fy - ny_) > 1e-9) {
        throw Error(ErrorKind::Config,
                    "area sides are not divisible by the cell side " + std::to_string(cell_side), "cell_side");
    }
    value_.assign(static_cast<std::size_t>(nx_) * ny_, 0.0);
}

Vec2 SearchGrid::center(std::size_t id) const {
    const auto i = static_cast<int>(id % nx_);
    const auto j = static_cast<int>(id / nx_);
    return {area_.x_min + (i + 0.5) * cell_side_, area_.y_min + (j + 0.5) * cell_side_};
}

double SearchGrid::value(std::size_t id) const {
    if (id >= value_.size()) {
        throw Error(ErrorKind::InvalidArgument, "cell index " + std::to_string(id) + " out of range");
    }
    return value_[id];
}

void SearchGrid::set_value(std::size_t id, double v) { value_.at(id) = std::clamp(v, 0.0, 1.0); }

void SearchGrid::set_density(std::size_t id, double d) { set_value(id, d * area_.area()); }

FilterState predict(const ParticleSet& particles, const SearchGrid& grid, const Vec2& s_prev,
                    const FilterConfig& cfg, Rng& rng, const BirthProposal& proposal) {
    FilterState out{particles, grid};
    auto& ps = out.particles.particles;
    for (auto& p : ps) {
        p.state = transition_sample(p.state, cfg.motion, rng);
        p.weight *= cfg.motion.p_survival;
    }

    const std::size_t births = particles.birth_count;
    if (cfg.birth_mass > 0.0 && births > 0) {
        const Rect& area = cfg.area;
        std::optional<Rect> focus;
        if (proposal.focus && cfg.birth_focus_fraction > 0.0) {
            const Rect f = proposal.focus->intersection(area);
            if (f.width() > 0.0 && f.height() > 0.0) focus = f;
        }
        // Measurements whose inverse lands in the area seed the third component.
        std::vector<Measurement> seeds;
        if (cfg.birth_measurement_fraction > 0.0) {
            for (const auto& z : proposal.z) {
                if (z.range > 0.0 && area.contains(unproject(z, proposal.sensor))) seeds.push_back(z);
            }
        }
        const double f_focus = focus ? std::clamp(cfg.birth_focus_fraction, 0.0, 1.0) : 0.0;
        const double f_meas = seeds.empty() ? 0.0 : std::clamp(cfg.birth_measurement_fraction, 0.0, 1.0 - f_focus);
        const double f_unif = 1.0 - f_focus - f_meas;
        const auto n_focus = static_cast<std::size_t>(std::llround(f_focus * static_cast<double>(births)));
        const auto n_meas = static_cast<std::size_t>(std::llround(f_meas * static_cast<double>(births)));
        const SensorModel& sensor = cfg.sensor;

        // Mixture proposal density q(x) over positions; velocities always come
        // from the prior, so only positions need importance correction.
        auto proposal_density = [&](const Vec2& p) {
            double q = f_unif / area.area();
            if (focus && focus->contains(p)) q += f_focus / focus->area();
            if (f_meas > 0.0) {
                const Measurement h = project({p.x, 0.0, p.y, 0.0}, proposal.sensor);
                if (h.range > 0.0) {
                    double k = 0.0;
                    for (const auto& z : seeds) {
                        const double sr = sensor.range_sigma(z.range);
                        const double sb = sensor.bearing_sigma(z.range);
                        const double er = (h.range - z.range) / sr;
                        const double eb = wrap_angle(h.bearing - z.bearing) / sb;
                        k += std::exp(-0.5 * (er * er + eb * eb)) / (2.0 * std::numbers::pi * sr * sb * h.range);
                    }
                    q += f_meas * k / static_cast<double>(seeds.size());
                }
            }
            return q;
        };
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::normal_distribution<double> n01(0.0, 1.0);
        std::normal_distribution<double> vel(0.0, cfg.birth_velocity_std);
        const std::size_t first = ps.size();
        double raw_sum = 0.0;
        for (std::size_t b = 0; b < births; ++b) {
            Vec2 pos;
            if (b < n_meas) {
                const Measurement& z = seeds[b % seeds.size()];
                const double r = z.range + sensor.range_sigma(z.range) * n01(rng);
                const double phi = z.bearing + sensor.bearing_sigma(z.range) * n01(rng);
                if (r <= 0.0) continue;
                pos = unproject({r, phi}, proposal.sensor);
                if (!area.contains(pos)) continue;
            } else {
                const Rect& r = (b < n_meas + n_focus) ? *focus : area;
                pos = {r.x_min + r.width() * u01(rng), r.y_min + r.height() * u01(rng)};
            }
            const double vx = vel(rng);
            const double vy = vel(rng);
            const double raw = 1.0 / (area.area() * proposal_density(pos));
            raw_sum += raw;
            ps.push_back({{pos.x, vx, pos.y, vy}, raw});
        }
        if (raw_sum == 0.0) {
            // Every proposed position fell outside the area.
            ps.push_back({{area.x_min + area.width() * u01(rng), vel(rng), area.y_min + area.height() * u01(rng),
                           vel(rng)},
                          1.0});
            raw_sum = 1.0;
        }
        for (std::size_t i = first; i < ps.size(); ++i) ps[i].weight *= cfg.birth_mass / raw_sum;
    }

    const Rect seen = cfg.sensor.footprint(s_prev);
    for (std::size_t c = 0; c < out.grid.cell_count(); ++c) {
        if (!seen.contains(out.grid.center(c))) out.grid.set_value(c, out.grid.value(c) * cfg.decay);
    }
    return out;
}

std::vector<double> update_multipliers(const ParticleSet& particles, std::span<const Measurement> z,
                                       const Vec2& s, const FilterConfig& cfg) {
    const auto& ps = particles.particles;
    std::vector<double> mult(ps.size(), 1.0);
    std::vector<std::size_t> visible;
    std::vector<double> pd;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double p = detection_prob(ps[i].state, s, cfg.sensor, TargetLabel::True);
        if (p > 0.0) {
            visible.push_back(i);
            pd.push_back(p);
            mult[i] = 1.0 - p;
        }
    }
    if (visible.empty() || z.empty()) return mult;

    std::vector<double> g(visible.size());
    for (const auto& meas : z) {
        double tau = 0.0;
        for (std::size_t k = 0; k < visible.size(); ++k) {
            const auto& p = ps[visible[k]];
            g[k] = pd[k] * likelihood_unchecked(meas, p.state.position(), s, cfg.sensor);
            tau += g[k] * p.weight;
        }
        const double denom = clutter_intensity(meas, cfg.sensor) + tau;
        if (!(denom > 0.0)) continue;
        for (std::size_t k = 0; k < visible.size(); ++k) mult[visible[k]] += g[k] / denom;
    }
    return mult;
}

std::vector<double> target_shares(const ParticleSet& particles, std::span<const Measurement> z, const Vec2& s,
                                  const FilterConfig& cfg) {
    std::vector<double> share(z.size(), 0.0);
    std::vector<const Particle*> visible;
    std::vector<double> pd;
    for (const auto& p : particles.particles) {
        const double d = detection_prob(p.state, s, cfg.sensor, TargetLabel::True);
        if (d > 0.0 && p.weight > 0.0) {
            visible.push_back(&p);
            pd.push_back(d);
        }
    }
    for (std::size_t m = 0; m < z.size(); ++m) {
        double tau = 0.0;
        for (std::size_t k = 0; k < visible.size(); ++k) {
            tau += pd[k] * likelihood_unchecked(z[m], visible[k]->state.position(), s, cfg.sensor) * visible[k]->weight;
        }
        const double denom = clutter_intensity(z[m], cfg.sensor) + tau;
        share[m] = denom > 0.0 ? tau / denom : 0.0;
    }
    return share;
}

ParticleSet pseudo_update(const ParticleSet& particles, std::span<const Measurement> z_hyp, const Vec2& s_hyp,
                          const FilterConfig& cfg) {
    ParticleSet out = particles;
    const auto mult = update_multipliers(particles, z_hyp, s_hyp, cfg);
    for (std::size_t i = 0; i < out.particles.size(); ++i) out.particles[i].weight *= mult[i];
    return out;
}

FilterState update(const ParticleSet& particles, const SearchGrid& grid, std::span<const Measurement> z,
                   const Vec2& s, const FilterConfig& cfg) {
    FilterState out{pseudo_update(particles, z, s, cfg), grid};
    const Rect seen = cfg.sensor.footprint(s);
    for (std::size_t c = 0; c < out.grid.cell_count(); ++c) {
        if (seen.contains(out.grid.center(c))) out.grid.set_value(c, 1.0);
    }
    return out;
}

ParticleSet resample(const ParticleSet& particles, Rng& rng) {
    ParticleSet out;
    out.per_target = particles.per_target;
    out.birth_count = particles.birth_count;
    const double total = particles.mass();
    if (!(total > 0.0) || particles.empty()) return out;

    const auto n = static_cast<std::size_t>(std::ceil(total)) * std::max<std::size_t>(1, particles.per_target);
    const double step = total / static_cast<double>(n);
    std::uniform_real_distribution<double> u(0.0, step);
    double pointer = u(rng);
    double cumulative = particles.particles[0].weight;
    std::size_t src = 0;
    const std::size_t last = particles.size() - 1;
    out.particles.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        while (pointer > cumulative && src < last) {
            ++src;
            cumulative += particles.particles[src].weight;
        }
        out.particles.push_back({particles.particles[src].state, step});
        pointer += step;
    }
    return out;
}

double estimate_cardinality(const ParticleSet& particles, const Rect& region) {
    double m = 0.0;
    for (const auto& p : particles.particles) {
        if (region.contains(p.state.position())) m += p.weight;
    }
    return m;
}

int round_count(double mass) { return mass > 0.0 ? static_cast<int>(std::floor(mass + 0.5)) : 0; }

ParticleSet restrict_to(const ParticleSet& particles, const Rect& region) {
    ParticleSet out;
    out.per_target = particles.per_target;
    out.birth_count = particles.birth_count;
    for (const auto& p : particles.particles) {
        if (region.contains(p.state.position())) out.particles.push_back(p);
    }
    return out;
}

std::vector<KinematicState> extract_states(const ParticleSet& particles, int n_hat, double min_separation,
                                           int iterations) {
    std::vector<KinematicState> out;
    if (n_hat <= 0) return out;
    const auto& ps = particles.particles;
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (ps[i].weight > 0.0) order.push_back(i);
    }
    if (order.empty()) return out;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ps[a].weight > ps[b].weight; });

    const auto k_max = static_cast<std::size_t>(n_hat);
    const double sep2 = min_separation * min_separation;
    std::vector<Vec2> centroids;
    auto far_from_all = [&](const Vec2& p) {
        for (const auto& c : centroids) {
            if (squared_distance(p, c) < sep2) return false;
        }
        return true;
    };

    // Seeds are mass peaks of a binned histogram smoothed over 3x3 bins, so a
    // single heavy particle cannot outrank a dense cloud.
    const double bin = min_separation > 0.0 ? min_separation / 4.0 : 1.0;
    struct Bin {
        double mass = 0.0;
        double mx = 0.0;
        double my = 0.0;
    };
    std::map<std::pair<long, long>, Bin> bins;
    for (std::size_t idx : order) {
        const Vec2 p = ps[idx].state.position();
        auto& b = bins[{std::lround(std::floor(p.x / bin)), std::lround(std::floor(p.y / bin))}];
        b.mass += ps[idx].weight;
        b.mx += ps[idx].weight * p.x;
        b.my += ps[idx].weight * p.y;
    }
    struct Peak {
        double mass;
        Vec2 at;
    };
    std::vector<Peak> peaks;
    peaks.reserve(bins.size());
    for (const auto& [key, b] : bins) {
        Bin sum;
        for (long dx = -1; dx <= 1; ++dx) {
            for (long dy = -1; dy <= 1; ++dy) {
                const auto it = bins.find({key.first + dx, key.second + dy});
                if (it == bins.end()) continue;
                sum.mass += it->second.mass;
                sum.mx += it->second.mx;
                sum.my += it->second.my;
            }
        }
        peaks.push_back({sum.mass, {sum.mx / sum.mass, sum.my / sum.mass}});
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.mass > b.mass; });
    for (const auto& pk : peaks) {
        if (centroids.size() == k_max) break;
        if (far_from_all(pk.at)) centroids.push_back(pk.at);
    }
    // Fewer separated peaks than targets: fall back to distinct particles.
    for (std::size_t idx : order) {
        if (centroids.size() == k_max) break;
        const Vec2 p = ps[idx].state.position();
        bool distinct = true;
        for (const auto& c : centroids) distinct = distinct && squared_distance(p, c) > 1e-12;
        if (distinct) centroids.push_back(p);
    }

    const std::size_t k = centroids.size();
    std::vector<std::size_t> label(ps.size(), 0);
    std::vector<KinematicState> means(k);
    for (int it = 0; it < std::max(1, iterations); ++it) {
        std::vector<double> wsum(k, 0.0);
        std::vector<KinematicState> acc(k);
        for (std::size_t idx : order) {
            const Vec2 p = ps[idx].state.position();
            std::size_t best = 0;
            double best_d = squared_distance(p, centroids[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = squared_distance(p, centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            label[idx] = best;
            const double w = ps[idx].weight;
            wsum[best] += w;
            acc[best].px += w * ps[idx].state.px;
            acc[best].vx += w * ps[idx].state.vx;
            acc[best].py += w * ps[idx].state.py;
            acc[best].vy += w * ps[idx].state.vy;
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (wsum[c] > 0.0) {
                means[c] = {acc[c].px / wsum[c], acc[c].vx / wsum[c], acc[c].py / wsum[c], acc[c].vy / wsum[c]};
                centroids[c] = means[c].position();
            } else {
                means[c] = {centroids[c].x, 0.0, centroids[c].y, 0.0};
            }
        }
    }
    return means;
}

double search_value(const SearchGrid& grid, std::size_t cell) { return grid.value(cell); }

double search_value(const SearchGrid& grid, int i, int j) {
    if (i < 0 || j < 0 || i >= grid.nx() || j >= grid.ny()) {
        throw Error(ErrorKind::InvalidArgument, "cell (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
    }
    return grid.value(grid.id(i, j));
}

}  // namespace sat
