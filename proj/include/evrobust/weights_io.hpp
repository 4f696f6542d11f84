#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "evrobust/interact.hpp"
#include "evrobust/mrm.hpp"

namespace evrobust {

// MRMW1 container: header `MRMW1 <C> <T> <L>` followed by named tensor sections,
// each `tensor <name> <d0> <d1> <d2> <d3>` plus d0*d1*d2*d3 decimals.
// Pointwise weights are stored as (out, in, 1, 1) with bias (out, 1, 1, 1);
// depthwise kernels as (n, 1, 3, 3) with bias (n, 1, 1, 1).
struct WeightsFile {
    MrmConfig cfg;
    std::map<std::string, Tensor4d> tensors;
};

WeightsFile read_weights(const std::filesystem::path& path);
void write_weights(const WeightsFile& wf, const std::filesystem::path& path);

// Shape-validated module bindings.
MrmWeights<double> bind_mrm(const WeightsFile& wf);
MsemWeights<double> bind_msem(const WeightsFile& wf);
EsemWeights<double> bind_esem(const WeightsFile& wf);

// Small random weights for smoke runs and fixtures: normal(0, scale) kernels,
// zero biases (all gates half-open).
WeightsFile make_random_weights(const MrmConfig& cfg, std::uint64_t seed, double scale = 0.05);

}  // namespace evrobust
