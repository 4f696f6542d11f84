#include "evrobust/metrics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "evrobust/event_io.hpp"

namespace evrobust {

PsnrResult psnr(const ImageF& a, const ImageF& b) {
    require(a.same_shape(b), "psnr: image shape mismatch");
    require(a.peak == b.peak, "psnr: images must share one peak value");
    long double sse = 0.0L;
    for (Index i = 0; i < a.data.size(); ++i) {
        const long double d = a.data[i] - b.data[i];
        sse += d * d;
    }
    const double mse = static_cast<double>(sse / a.data.size());
    PsnrResult r;
    if (mse == 0.0) {
        r.exact_match = true;
        r.db = kPsnrExactCap;
    } else {
        r.db = 10.0 * std::log10(a.peak * a.peak / mse);
    }
    return r;
}

namespace {

constexpr Index kWin = 11;

// Normalized 11-tap Gaussian, sigma 1.5.
Eigen::Array<double, kWin, 1> ssim_window() {
    Eigen::Array<double, kWin, 1> w;
    const double inv2s2 = 1.0 / (2.0 * 1.5 * 1.5);
    for (Index i = 0; i < kWin; ++i) {
        const double d = static_cast<double>(i - kWin / 2);
        w[i] = std::exp(-d * d * inv2s2);
    }
    return w / w.sum();
}

// Separable valid-region Gaussian filter: (H-10) x (W-10) output.
ImagePlane gauss_valid(const ImagePlane& in, const Eigen::Array<double, kWin, 1>& w) {
    const Index h = in.rows(), wd = in.cols();
    ImagePlane rows(h, wd - kWin + 1);
    for (Index y = 0; y < h; ++y)
        for (Index x = 0; x + kWin <= wd; ++x) {
            double acc = 0.0;
            for (Index k = 0; k < kWin; ++k) acc += w[k] * in(y, x + k);
            rows(y, x) = acc;
        }
    ImagePlane out(h - kWin + 1, wd - kWin + 1);
    for (Index y = 0; y + kWin <= h; ++y)
        for (Index x = 0; x < out.cols(); ++x) {
            double acc = 0.0;
            for (Index k = 0; k < kWin; ++k) acc += w[k] * rows(y + k, x);
            out(y, x) = acc;
        }
    return out;
}

ImagePlane channel_plane(const ImageF& img, Index c) {
    ImagePlane p(img.height, img.width);
    for (Index y = 0; y < img.height; ++y)
        for (Index x = 0; x < img.width; ++x) p(y, x) = img.at(c, y, x);
    return p;
}

}  // namespace

double ssim(const ImageF& a, const ImageF& b) {
    require(a.same_shape(b), "ssim: image shape mismatch");
    require(a.peak == b.peak, "ssim: images must share one peak value");
    require(std::min(a.height, a.width) >= kWin, "ssim: image smaller than the 11x11 window");

    const double c1 = (0.01 * a.peak) * (0.01 * a.peak);
    const double c2 = (0.03 * a.peak) * (0.03 * a.peak);
    const auto w = ssim_window();

    double total = 0.0;
    for (Index c = 0; c < a.channels; ++c) {
        const ImagePlane pa = channel_plane(a, c);
        const ImagePlane pb = channel_plane(b, c);
        const ImagePlane mu_a = gauss_valid(pa, w);
        const ImagePlane mu_b = gauss_valid(pb, w);
        const ImagePlane m_aa = gauss_valid(pa * pa, w);
        const ImagePlane m_bb = gauss_valid(pb * pb, w);
        const ImagePlane m_ab = gauss_valid(pa * pb, w);

        const ImagePlane var_a = m_aa - mu_a * mu_a;
        const ImagePlane var_b = m_bb - mu_b * mu_b;
        const ImagePlane cov = m_ab - mu_a * mu_b;

        const ImagePlane num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
        const ImagePlane den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
        total += (num / den).mean();
    }
    return total / static_cast<double>(a.channels);
}

RobustnessCurve build_curve(std::string label, std::vector<CurvePoint> points) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        require(points[i].ssim >= -1.0 && points[i].ssim <= 1.0,
                "build_curve: ssim must be in [-1,1]");
        if (i > 0)
            require(points[i].level > points[i - 1].level,
                    "build_curve: levels must be strictly increasing");
    }
    return RobustnessCurve{std::move(label), std::move(points)};
}

CurveComparison compare_curves(const RobustnessCurve& a, const RobustnessCurve& b) {
    require(a.points.size() == b.points.size(), "compare_curves: level grids differ in size");
    CurveComparison cmp;
    cmp.a_psnr_non_increasing = true;
    cmp.b_psnr_non_increasing = true;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        require(a.points[i].level == b.points[i].level,
                "compare_curves: level grids must match exactly");
        cmp.deltas.push_back({a.points[i].level, a.points[i].psnr - b.points[i].psnr,
                              a.points[i].ssim - b.points[i].ssim});
        if (i > 0) {
            if (a.points[i].psnr > a.points[i - 1].psnr) cmp.a_psnr_non_increasing = false;
            if (b.points[i].psnr > b.points[i - 1].psnr) cmp.b_psnr_non_increasing = false;
        }
    }
    return cmp;
}

RobustnessCurve read_curve_csv(const std::filesystem::path& path, std::string label) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open curve CSV: " + path.string());
    if (label.empty()) label = path.stem().string();

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<CurvePoint> points;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            require(line.rfind("level,psnr,ssim", 0) == 0,
                    path.string() + ": expected `level,psnr,ssim` header");
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        CurvePoint p;
        char comma1 = 0, comma2 = 0;
        if (!(ls >> p.level >> comma1 >> p.psnr >> comma2 >> p.ssim) || comma1 != ',' ||
            comma2 != ',')
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": malformed curve row `" + line + "`");
        points.push_back(p);
    }
    require(header_seen, path.string() + ": missing `level,psnr,ssim` header");
    return build_curve(std::move(label), std::move(points));
}

void write_curve_csv(const RobustnessCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open curve CSV for writing: " + path.string());
    out << "level,psnr,ssim\n";
    for (const CurvePoint& p : curve.points)
        out << format_double(p.level) << ',' << format_double(p.psnr) << ','
            << format_double(p.ssim) << '\n';
    if (!out) throw ValidationError("write failed: " + path.string());
}

}  // namespace evrobust
