#include "evrobust/dvs.hpp"

#include <cmath>

namespace evrobust {

namespace {

// One aggregate noise draw, Poisson component first then Gaussian.
double draw_noise(CounterRng& rng, const NoiseModel& noise) {
    double n = 0.0;
    if (noise.lambda > 0.0) {
        n += static_cast<double>(rng.poisson(noise.lambda));
        if (noise.center_poisson) n -= noise.lambda;
    }
    if (noise.sigma_n > 0.0) n += noise.sigma_n * rng.normal();
    return n;
}

}  // namespace

ImagePlane log_increment(const ImagePlane& frame_t, const ImagePlane& frame_prev, double log_floor) {
    require(log_floor > 0.0, "log_increment: log_floor must be > 0");
    require(frame_t.rows() == frame_prev.rows() && frame_t.cols() == frame_prev.cols(),
            "log_increment: frame shape mismatch");
    return (frame_t + log_floor).log() - (frame_prev + log_floor).log();
}

EventStream simulate_events(const FrameSequence& seq, const DvsConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    seq.validate();
    require(seq.frames.size() >= 2, "simulate_events: need at least 2 frames");

    const Index h = seq.height();
    const Index w = seq.width();
    EventStream stream(static_cast<std::int32_t>(w), static_cast<std::int32_t>(h),
                       seq.timestamps.front(), seq.timestamps.back());

    // Latched per-pixel reference in log space.
    ImagePlane reference = (seq.frames.front() + cfg.log_floor).log();

    for (std::size_t k = 1; k < seq.frames.size(); ++k) {
        const ImagePlane current = (seq.frames[k] + cfg.log_floor).log();
        const std::uint64_t t = seq.timestamps[k];
        for (Index y = 0; y < h; ++y) {
            for (Index x = 0; x < w; ++x) {
                CounterRng rng(seed, k, (static_cast<std::uint64_t>(y) << 32) |
                                            static_cast<std::uint64_t>(x));
                const double noisy = current(y, x) + draw_noise(rng, cfg.noise);
                double residual = noisy - reference(y, x);
                while (std::abs(residual) >= cfg.theta) {
                    const std::int8_t p = residual > 0.0 ? std::int8_t{1} : std::int8_t{-1};
                    stream.push(Event{t, static_cast<std::int32_t>(x), static_cast<std::int32_t>(y), p});
                    reference(y, x) += p > 0 ? cfg.theta : -cfg.theta;
                    residual = noisy - reference(y, x);
                }
            }
        }
    }
    stream.canonicalize();
    return stream;
}

ImagePlane synthesize_blur(const FrameSequence& seq) {
    require(!seq.frames.empty(), "synthesize_blur: need at least 1 frame");
    seq.validate();
    ImagePlane acc = ImagePlane::Zero(seq.height(), seq.width());
    for (const ImagePlane& f : seq.frames) acc += f;
    return acc / static_cast<double>(seq.frames.size());
}

McEstimate trigger_probability(double theta, double signal, const NoiseModel& noise,
                               std::uint64_t n_samples, std::uint64_t seed) {
    require(theta > 0.0, "trigger_probability: theta must be > 0");
    require(n_samples >= 1, "trigger_probability: n_samples must be >= 1");
    noise.validate();

    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        CounterRng rng(seed, i);
        const double value = signal + draw_noise(rng, noise);
        if (std::abs(value) >= theta) ++hits;
    }
    McEstimate e;
    e.n_samples = n_samples;
    e.estimate = static_cast<double>(hits) / static_cast<double>(n_samples);
    e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(n_samples));
    return e;
}

McEstimate ur_expected(double theta, const std::vector<double>& signal_samples,
                       const NoiseModel& noise, std::uint64_t n_samples, std::uint64_t seed) {
    require(!signal_samples.empty(), "ur_expected: signal sample list must be non-empty");
    double sum = 0.0;
    double var_sum = 0.0;
    for (std::size_t j = 0; j < signal_samples.size(); ++j) {
        CounterRng sub(seed, 0x5552u, j);  // independent substream per signal value
        const McEstimate e =
            trigger_probability(theta, signal_samples[j], noise, n_samples, sub.next_u64());
        sum += 1.0 - e.estimate;
        var_sum += e.std_error * e.std_error;
    }
    const double m = static_cast<double>(signal_samples.size());
    McEstimate out;
    out.n_samples = n_samples * signal_samples.size();
    out.estimate = sum / m;
    out.std_error = std::sqrt(var_sum) / m;
    return out;
}

VoxelGrid noise_inject(const VoxelGrid& grid, double ratio, std::uint64_t seed) {
    require(ratio >= 0.0 && ratio <= 1.0, "noise_inject: ratio must be in [0,1]");
    VoxelGrid out = grid;
    const auto injections =
        static_cast<std::uint64_t>(std::llround(ratio * static_cast<double>(grid.nonzero_count())));
    const auto cell_count = static_cast<std::uint64_t>(grid.size());
    for (std::uint64_t j = 0; j < injections; ++j) {
        CounterRng rng(seed, 0x1239u, j);
        const auto cell = static_cast<Index>(rng.uniform_index(cell_count));
        out.raw()[cell] += rng.bernoulli(0.5) ? 1.0 : -1.0;
    }
    return out;
}

}  // namespace evrobust
