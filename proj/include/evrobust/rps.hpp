#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "evrobust/common.hpp"
#include "evrobust/dvs.hpp"
#include "evrobust/event.hpp"
#include "evrobust/rng.hpp"
#include "evrobust/voxel.hpp"

namespace evrobust {

// Per-bin, per-pixel survival probabilities pi_tau(x, y) in [0, 1].
class SurvivalMap {
public:
    SurvivalMap() = default;

    SurvivalMap(Index bins, Index height, Index width, double fill = 1.0)
        : bins_(bins), height_(height), width_(width) {
        require(bins >= 1 && height > 0 && width > 0, "SurvivalMap: dims must be positive");
        require(fill >= 0.0 && fill <= 1.0, "SurvivalMap: probabilities must be in [0,1]");
        probs_ = Eigen::ArrayXd::Constant(bins * height * width, fill);
    }

    Index bins() const { return bins_; }
    Index height() const { return height_; }
    Index width() const { return width_; }
    Index size() const { return probs_.size(); }

    double operator()(Index tau, Index y, Index x) const {
        return probs_[(tau * height_ + y) * width_ + x];
    }
    double& operator()(Index tau, Index y, Index x) {
        return probs_[(tau * height_ + y) * width_ + x];
    }

    const Eigen::ArrayXd& raw() const { return probs_; }
    Eigen::ArrayXd& raw() { return probs_; }

    // Spatial mean of one bin; equals 1 - alpha for maps built from an alpha.
    double bin_mean(Index tau) const {
        return probs_.segment(tau * height_ * width_, height_ * width_).mean();
    }

    void validate() const {
        require((probs_ >= 0.0).all() && (probs_ <= 1.0).all(),
                "SurvivalMap: probabilities must be in [0,1]");
    }

    bool same_shape(const VoxelGrid& g) const {
        return bins_ == g.bins() && height_ == g.height() && width_ == g.width();
    }

    // VOX1 interop.
    VoxelGrid to_voxel() const {
        VoxelGrid g(bins_, height_, width_);
        g.raw() = probs_;
        return g;
    }
    static SurvivalMap from_voxel(const VoxelGrid& g) {
        SurvivalMap m(g.bins(), g.height(), g.width());
        m.probs_ = g.raw();
        m.validate();
        return m;
    }

private:
    Index bins_ = 0;
    Index height_ = 0;
    Index width_ = 0;
    Eigen::ArrayXd probs_;
};

// Uniform range for perturbation strength alpha.
struct PerturbConfig {
    double alpha_min = 0.0;
    double alpha_max = 0.2;

    void validate() const {
        require(alpha_min >= 0.0 && alpha_min <= alpha_max && alpha_max <= 1.0,
                "PerturbConfig: need 0 <= alpha_min <= alpha_max <= 1");
    }
};

// alpha ~ Uniform[alpha_min, alpha_max]; exact at degenerate intervals.
inline double sample_alpha(const PerturbConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    CounterRng rng(seed);
    return rng.uniform(cfg.alpha_min, cfg.alpha_max);
}

// Constant map pi == 1 - alpha; every bin's spatial mean is exactly 1 - alpha.
inline SurvivalMap survival_map_from_alpha(double alpha, Index bins, Index height, Index width) {
    require(alpha >= 0.0 && alpha <= 1.0, "survival_map_from_alpha: alpha must be in [0,1]");
    return SurvivalMap(bins, height, width, 1.0 - alpha);
}

// Signal-dependent map: per-cell Monte-Carlo estimate of P(|S + N| >= theta)
// with the local signal from `signal_field`. Cell (tau, y, x) uses substream
// (seed, tau, y*W + x), so cells may be evaluated in any order or in parallel.
SurvivalMap survival_map_from_threshold(const VoxelGrid& signal_field, const NoiseModel& noise,
                                        double theta, std::uint64_t n_samples, std::uint64_t seed);

// Bernoulli thinning (cellwise): out = grid * rho with rho ~ Bernoulli(pi) drawn
// independently per cell per bin. The draw is made for every cell, zero or not,
// so the mask never depends on grid content.
VoxelGrid thin(const VoxelGrid& grid, const SurvivalMap& maps, std::uint64_t seed);

// Event-wise alternative: each event survives independently with probability
// 1 - alpha before any voxelization.
EventStream thin_stream(const EventStream& stream, double alpha, std::uint64_t seed);

// Fraction of originally nonzero cells that became zero.
double empirical_ur(const VoxelGrid& original, const VoxelGrid& thinned);

}  // namespace evrobust
