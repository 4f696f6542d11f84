#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "evrobust/common.hpp"
#include "evrobust/event.hpp"

namespace evrobust {

// T x H x W signed accumulation of events over temporal bins. Entries built by
// integer-polarity accumulation are integer-valued reals, which keeps thinning
// semantics and the tests around them exact.
class VoxelGrid {
public:
    using Slice = Eigen::Map<Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    using ConstSlice =
        Eigen::Map<const Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

    VoxelGrid() = default;

    VoxelGrid(Index bins, Index height, Index width, std::uint64_t t_start = 0, std::uint64_t t_end = 0)
        : bins_(bins), height_(height), width_(width), t_start_(t_start), t_end_(t_end) {
        require(bins >= 1, "VoxelGrid: bin count must be >= 1");
        require(height > 0 && width > 0, "VoxelGrid: spatial dims must be positive");
        data_ = Eigen::ArrayXd::Zero(bins * height * width);
    }

    Index bins() const { return bins_; }
    Index height() const { return height_; }
    Index width() const { return width_; }
    Index size() const { return data_.size(); }
    std::uint64_t t_start() const { return t_start_; }
    std::uint64_t t_end() const { return t_end_; }

    double operator()(Index tau, Index y, Index x) const { return data_[flat(tau, y, x)]; }
    double& operator()(Index tau, Index y, Index x) { return data_[flat(tau, y, x)]; }

    Slice slice(Index tau) {
        return Slice(data_.data() + tau * height_ * width_, height_, width_);
    }
    ConstSlice slice(Index tau) const {
        return ConstSlice(data_.data() + tau * height_ * width_, height_, width_);
    }

    const Eigen::ArrayXd& raw() const { return data_; }
    Eigen::ArrayXd& raw() { return data_; }

    Index nonzero_count() const { return (data_ != 0.0).count(); }
    double sum() const { return data_.sum(); }
    double abs_sum() const { return data_.abs().sum(); }

    bool same_shape(const VoxelGrid& o) const {
        return bins_ == o.bins_ && height_ == o.height_ && width_ == o.width_;
    }

    friend bool operator==(const VoxelGrid& a, const VoxelGrid& b) {
        return a.same_shape(b) && a.t_start_ == b.t_start_ && a.t_end_ == b.t_end_ &&
               (a.data_ == b.data_).all();
    }

private:
    Index flat(Index tau, Index y, Index x) const { return (tau * height_ + y) * width_ + x; }

    Index bins_ = 0;
    Index height_ = 0;
    Index width_ = 0;
    std::uint64_t t_start_ = 0;
    std::uint64_t t_end_ = 0;
    Eigen::ArrayXd data_;
};

// Bin index for an in-span timestamp. The +1 in the divisor keeps events at
// t_end inside the last bin.
inline Index voxel_bin(std::uint64_t t, std::uint64_t t_start, std::uint64_t t_end, Index bins) {
    const std::uint64_t span_plus_one = t_end - t_start + 1;
    return static_cast<Index>((t - t_start) * static_cast<std::uint64_t>(bins) / span_plus_one);
}

// Hard-assignment voxel encoding: each event adds its polarity to one bin.
inline VoxelGrid encode_voxel(const EventStream& stream, Index bins) {
    require(bins >= 1, "encode_voxel: bin count must be >= 1");
    require(stream.span_us() > 0, "encode_voxel: degenerate time span (t_end must exceed t_start)");
    VoxelGrid grid(bins, stream.height(), stream.width(), stream.t_start(), stream.t_end());
    for (const Event& e : stream.events()) {
        const Index tau = voxel_bin(e.t, stream.t_start(), stream.t_end(), bins);
        grid(tau, e.y, e.x) += static_cast<double>(e.polarity);
    }
    return grid;
}

}  // namespace evrobust
