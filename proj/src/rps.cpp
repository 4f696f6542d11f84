#include "evrobust/rps.hpp"

namespace evrobust {

SurvivalMap survival_map_from_threshold(const VoxelGrid& signal_field, const NoiseModel& noise,
                                        double theta, std::uint64_t n_samples, std::uint64_t seed) {
    require(theta > 0.0, "survival_map_from_threshold: theta must be > 0");
    SurvivalMap map(signal_field.bins(), signal_field.height(), signal_field.width());
    const Index w = signal_field.width();
    for (Index tau = 0; tau < signal_field.bins(); ++tau) {
        for (Index y = 0; y < signal_field.height(); ++y) {
            for (Index x = 0; x < w; ++x) {
                CounterRng cell(seed, static_cast<std::uint64_t>(tau),
                                static_cast<std::uint64_t>(y * w + x));
                map(tau, y, x) =
                    trigger_probability(theta, signal_field(tau, y, x), noise, n_samples,
                                        cell.next_u64())
                        .estimate;
            }
        }
    }
    return map;
}

VoxelGrid thin(const VoxelGrid& grid, const SurvivalMap& maps, std::uint64_t seed) {
    require(maps.same_shape(grid), "thin: survival map shape must match grid shape");
    VoxelGrid out = grid;
    const Index w = grid.width();
    for (Index tau = 0; tau < grid.bins(); ++tau) {
        for (Index y = 0; y < grid.height(); ++y) {
            for (Index x = 0; x < w; ++x) {
                CounterRng cell(seed, static_cast<std::uint64_t>(tau),
                                (static_cast<std::uint64_t>(y) << 32) | static_cast<std::uint64_t>(x));
                if (!cell.bernoulli(maps(tau, y, x))) out(tau, y, x) = 0.0;
            }
        }
    }
    return out;
}

EventStream thin_stream(const EventStream& stream, double alpha, std::uint64_t seed) {
    require(alpha >= 0.0 && alpha <= 1.0, "thin_stream: alpha must be in [0,1]");
    EventStream out(stream.width(), stream.height(), stream.t_start(), stream.t_end());
    const double survive = 1.0 - alpha;
    std::uint64_t i = 0;
    for (const Event& e : stream.events()) {
        CounterRng rng(seed, i++);
        if (rng.bernoulli(survive)) out.push(e);
    }
    out.canonicalize();
    return out;
}

double empirical_ur(const VoxelGrid& original, const VoxelGrid& thinned) {
    require(original.same_shape(thinned), "empirical_ur: grid shape mismatch");
    Index nonzero = 0;
    Index dropped = 0;
    for (Index i = 0; i < original.size(); ++i) {
        if (original.raw()[i] != 0.0) {
            ++nonzero;
            if (thinned.raw()[i] == 0.0) ++dropped;
        }
    }
    return nonzero == 0 ? 0.0 : static_cast<double>(dropped) / static_cast<double>(nonzero);
}

}  // namespace evrobust
