#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sat/models.hpp"
#include "sat/random.hpp"
#include "sat/types.hpp"

namespace sat {

struct Particle {
    KinematicState state;
    double weight = 0.0;
};

/// Weighted particle approximation of the true-target intensity.
/// The sum of weights is the expected number of targets in the area.
struct ParticleSet {
    std::vector<Particle> particles;
    std::size_t per_target = 1000;
    std::size_t birth_count = 200;

    double mass() const;
    std::size_t size() const { return particles.size(); }
    bool empty() const { return particles.empty(); }
};

/// Search intensity held as one static virtual target per cell center.
/// Cell (i, j) has i along x, j along y; its node id is j * nx + i.
class SearchGrid {
public:
    SearchGrid() = default;
    /// Throws Config when the area is not an integer number of cells.
    SearchGrid(const Rect& area, double cell_side);

    const Rect& area() const { return area_; }
    double cell_side() const { return cell_side_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t cell_count() const { return value_.size(); }

    Vec2 center(std::size_t id) const;
    std::size_t id(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

    // Stored normalized (density * |A|) so a just-searched cell is exactly 1.
    double density(std::size_t id) const { return value_[id] / area_.area(); }
    void set_density(std::size_t id, double d);
    double max_density() const { return 1.0 / area_.area(); }

    /// Search value of cell id; throws InvalidArgument on a bad index.
    double value(std::size_t id) const;
    void set_value(std::size_t id, double v);

    bool same_tiling(const SearchGrid& o) const {
        return area_ == o.area_ && cell_side_ == o.cell_side_ && nx_ == o.nx_ && ny_ == o.ny_;
    }

    std::span<const double> values() const { return value_; }

private:
    Rect area_{};
    double cell_side_ = 0.0;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<double> value_;
};

struct FilterConfig {
    double birth_mass = 0.1;
    double decay = 0.999;  // J
    MotionModel motion;
    SensorModel sensor;
    Rect area{0.0, 0.0, 100.0, 100.0};
    /// Birth velocities are drawn from N(0, birth_velocity_std^2) per axis.
    double birth_velocity_std = 1.0;
    /// Share of birth particles proposed inside the focus rectangle. The
    /// birth intensity stays uniform: weights are importance-corrected.
    double birth_focus_fraction = 0.25;
    /// Share of birth particles proposed around the coming measurements, with
    /// the same importance correction. Focus and measurement shares sum to < 1.
    double birth_measurement_fraction = 0.5;
    /// Minimum spacing of k-means seeds in extract_states.
    double peak_separation = 5.0;
    /// Lloyd iterations in extract_states.
    int kmeans_iterations = 20;
};

struct FilterState {
    ParticleSet particles;
    SearchGrid grid;
};

/// Where predict concentrates its birth particles. Only the Monte Carlo
/// representation changes: the birth intensity stays uniform over the area.
struct BirthProposal {
    /// Typically the sensing square of the coming update.
    std::optional<Rect> focus;
    /// Measurements of the coming update, taken from `sensor`.
    std::span<const Measurement> z;
    Vec2 sensor;

    BirthProposal() = default;
    BirthProposal(const Rect& f) : focus(f) {}
    BirthProposal(const Rect& f, std::span<const Measurement> zs, const Vec2& s) : focus(f), z(zs), sensor(s) {}
};

FilterState predict(const ParticleSet& particles, const SearchGrid& grid, const Vec2& s_prev,
                    const FilterConfig& cfg, Rng& rng, const BirthProposal& proposal = {});

FilterState update(const ParticleSet& particles, const SearchGrid& grid, std::span<const Measurement> z,
                   const Vec2& s, const FilterConfig& cfg);

ParticleSet pseudo_update(const ParticleSet& particles, std::span<const Measurement> z_hyp, const Vec2& s_hyp,
                          const FilterConfig& cfg);

/// Per-particle weight multipliers of the corrector:
/// 1 - pD(x_i) + sum_z pD(x_i) g(z|x_i) / (kappa(z) + tau(z)).
std::vector<double> update_multipliers(const ParticleSet& particles, std::span<const Measurement> z,
                                       const Vec2& s, const FilterConfig& cfg);

/// tau(z) / (kappa(z) + tau(z)) for each measurement: the share of z the
/// corrector attributes to targets rather than clutter.
std::vector<double> target_shares(const ParticleSet& particles, std::span<const Measurement> z, const Vec2& s,
                                  const FilterConfig& cfg);
/// Systematic resampling to ceil(mass) * per_target equally weighted particles.
ParticleSet resample(const ParticleSet& particles, Rng& rng);

double estimate_cardinality(const ParticleSet& particles, const Rect& region);

/// Round-half-up of an expected count.
int round_count(double mass);

/// Particles whose position lies in `region` (capacity parameters kept).
ParticleSet restrict_to(const ParticleSet& particles, const Rect& region);

/// Weighted k-means peaks of the intensity. Seeds are the heaviest mass peaks
/// of a position histogram at least `min_separation` apart; when fewer such
/// peaks exist the remaining seeds are the heaviest distinct particles.
std::vector<KinematicState> extract_states(const ParticleSet& particles, int n_hat, double min_separation = 5.0,
                                           int iterations = 20);

double search_value(const SearchGrid& grid, std::size_t cell);
double search_value(const SearchGrid& grid, int i, int j);

}  // namespace sat
