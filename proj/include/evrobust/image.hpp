#pragma once

#include <Eigen/Dense>
#include <filesystem>

#include "evrobust/common.hpp"
#include "evrobust/dense.hpp"
#include "evrobust/dvs.hpp"

namespace evrobust {

// Planar floating-point image: `channels` blocks of H x W values, each in
// [0, peak].
struct ImageF {
    Index height = 0;
    Index width = 0;
    Index channels = 1;
    double peak = 1.0;
    Eigen::ArrayXd data;

    ImageF() = default;
    ImageF(Index h, Index w, Index c = 1, double pk = 1.0)
        : height(h), width(w), channels(c), peak(pk) {
        require(h > 0 && w > 0 && c > 0 && pk > 0, "ImageF: dims and peak must be positive");
        data = Eigen::ArrayXd::Zero(h * w * c);
    }

    static ImageF from_plane(const ImagePlane& p, double pk = 1.0) {
        ImageF img(p.rows(), p.cols(), 1, pk);
        for (Index y = 0; y < p.rows(); ++y)
            for (Index x = 0; x < p.cols(); ++x) img.at(0, y, x) = p(y, x);
        return img;
    }

    double at(Index c, Index y, Index x) const { return data[(c * height + y) * width + x]; }
    double& at(Index c, Index y, Index x) { return data[(c * height + y) * width + x]; }

    bool same_shape(const ImageF& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

// PGM (P5/P2) loads as one channel, PPM (P6/P3) as three; values scaled to [0,1].
ImageF read_image(const std::filesystem::path& path);

// As read_image but PPM collapses to luminance 0.299R + 0.587G + 0.114B.
ImagePlane read_image_gray(const std::filesystem::path& path);

// 8-bit binary PGM; values clamped to [0,1] and rounded.
void write_pgm(const ImagePlane& plane, const std::filesystem::path& path);

// Directory of %06d.pgm frames (from 000000, contiguous) plus timestamps.txt
// with one microsecond value per line.
FrameSequence load_frame_sequence(const std::filesystem::path& dir);

}  // namespace evrobust
