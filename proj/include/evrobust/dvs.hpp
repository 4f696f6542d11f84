#pragma once

#include <cstdint>
#include <vector>

#include "evrobust/common.hpp"
#include "evrobust/dense.hpp"
#include "evrobust/event.hpp"
#include "evrobust/rng.hpp"
#include "evrobust/voxel.hpp"

namespace evrobust {

// Mixed sensor noise on the log-intensity increment: a Poisson photon-noise
// component with rate `lambda` (defined per frame interval) plus a zero-mean
// Gaussian circuit component with standard deviation `sigma_n`.
//
// The Poisson term is centered (N_p - lambda) by default so the aggregate noise
// has zero mean; `center_poisson = false` keeps the raw one-sided draw.
struct NoiseModel {
    double lambda = 0.0;
    double sigma_n = 0.0;
    bool center_poisson = true;

    void validate() const {
        require(lambda >= 0.0, "NoiseModel: lambda must be >= 0");
        require(sigma_n >= 0.0, "NoiseModel: sigma_n must be >= 0");
    }
};

struct DvsConfig {
    double theta = 0.2;             // contrast threshold in log-intensity units
    NoiseModel noise;
    double log_floor = 1.0 / 255.0; // added before taking logs; avoids log(0) on 8-bit content

    void validate() const {
        require(theta > 0.0, "DvsConfig: theta must be > 0");
        require(log_floor > 0.0, "DvsConfig: log_floor must be > 0");
        noise.validate();
    }
};

// Ordered grayscale frames with strictly increasing microsecond timestamps.
struct FrameSequence {
    std::vector<ImagePlane> frames;
    std::vector<std::uint64_t> timestamps;

    Index height() const { return frames.empty() ? 0 : frames.front().rows(); }
    Index width() const { return frames.empty() ? 0 : frames.front().cols(); }

    void validate() const {
        require(frames.size() == timestamps.size(), "FrameSequence: frame/timestamp count mismatch");
        for (std::size_t i = 0; i < frames.size(); ++i) {
            require(frames[i].rows() == height() && frames[i].cols() == width(),
                    "FrameSequence: all frames must share one shape");
            if (i > 0)
                require(timestamps[i] > timestamps[i - 1],
                        "FrameSequence: timestamps must be strictly increasing");
        }
    }
};

// Log-intensity increment field: log(frame_t + floor) - log(frame_prev + floor).
ImagePlane log_increment(const ImagePlane& frame_t, const ImagePlane& frame_prev, double log_floor);

// Reference-crossing event generation. Each pixel keeps a latched reference
// log-intensity; at every frame a fresh noise draw perturbs the current log
// value, and as long as the residual exceeds theta an event is emitted and the
// reference advances by +-theta. Large steps therefore emit several events.
// With zero noise the output is independent of the seed.
EventStream simulate_events(const FrameSequence& seq, const DvsConfig& cfg, std::uint64_t seed);

// Arithmetic mean of the frames (the standard high-speed blur synthesis).
ImagePlane synthesize_blur(const FrameSequence& seq);

// A Monte-Carlo probability estimate with its binomial standard error.
struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
};

// P(|S + N| >= theta) estimated from n_samples independent noise draws.
// Sample i draws from substream (seed, i), so estimates are reproducible no
// matter how the sample range is partitioned. Draws do not depend on theta or
// S, giving exact common-random-number monotonicity across parameter grids.
McEstimate trigger_probability(double theta, double signal, const NoiseModel& noise,
                               std::uint64_t n_samples, std::uint64_t seed);

// False positive rate: noise alone crosses the threshold.
inline McEstimate fpr(double theta, const NoiseModel& noise, std::uint64_t n_samples,
                      std::uint64_t seed) {
    return trigger_probability(theta, 0.0, noise, n_samples, seed);
}

// True positive rate: motion signal S plus noise crosses the threshold.
inline McEstimate tpr(double theta, double signal, const NoiseModel& noise, std::uint64_t n_samples,
                      std::uint64_t seed) {
    return trigger_probability(theta, signal, noise, n_samples, seed);
}

// Under-reporting ratio, 1 - TPR.
inline McEstimate ur_given_s(double theta, double signal, const NoiseModel& noise,
                             std::uint64_t n_samples, std::uint64_t seed) {
    McEstimate e = tpr(theta, signal, noise, n_samples, seed);
    e.estimate = 1.0 - e.estimate;
    return e;
}

// Expected under-reporting over an empirical signal distribution. Each signal
// value gets its own substream (seed, index).
McEstimate ur_expected(double theta, const std::vector<double>& signal_samples,
                       const NoiseModel& noise, std::uint64_t n_samples, std::uint64_t seed);

// Adds round(ratio * nonzero-cell-count) spurious unit counts at uniformly chosen
// cells with uniform polarity.
VoxelGrid noise_inject(const VoxelGrid& grid, double ratio, std::uint64_t seed);

}  // namespace evrobust
