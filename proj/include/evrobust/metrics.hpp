#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "evrobust/image.hpp"

namespace evrobust {

struct PsnrResult {
    double db = 0.0;
    bool exact_match = false;  // identical inputs; db reported as the 99.0 cap
};

inline constexpr double kPsnrExactCap = 99.0;

// 10 * log10(peak^2 / MSE), one MSE across all pixels and channels.
PsnrResult psnr(const ImageF& a, const ImageF& b);

// Mean local SSIM: 11x11 Gaussian window (sigma 1.5), C1 = (0.01*peak)^2,
// C2 = (0.03*peak)^2, windows fully inside the image, channels averaged.
double ssim(const ImageF& a, const ImageF& b);

struct CurvePoint {
    double level = 0.0;  // UR or noise ratio
    double psnr = 0.0;   // dB
    double ssim = 0.0;
};

struct RobustnessCurve {
    std::string label;
    std::vector<CurvePoint> points;
};

// Validates strictly increasing levels and ssim in [-1, 1].
RobustnessCurve build_curve(std::string label, std::vector<CurvePoint> points);

struct CurveDelta {
    double level = 0.0;
    double d_psnr = 0.0;
    double d_ssim = 0.0;
};

struct CurveComparison {
    std::vector<CurveDelta> deltas;             // a - b per level
    bool a_psnr_non_increasing = false;
    bool b_psnr_non_increasing = false;
};

// Per-level deltas; the level grids must match exactly.
CurveComparison compare_curves(const RobustnessCurve& a, const RobustnessCurve& b);

// CSV with header `level,psnr,ssim`; `#` comment lines allowed before it.
RobustnessCurve read_curve_csv(const std::filesystem::path& path, std::string label = {});
void write_curve_csv(const RobustnessCurve& curve, const std::filesystem::path& path);

}  // namespace evrobust
