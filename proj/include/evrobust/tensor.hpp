#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <type_traits>
#include <utility>

#include "evrobust/common.hpp"

namespace evrobust {

// Dense B x N x H x W feature block, row-major in that order. For a fixed batch
// item every channel is one contiguous H*W plane, so channel-mixing ops map the
// block onto an N x (H*W) Eigen matrix without copying.
template <typename Scalar>
class Tensor4 {
    static_assert(std::is_floating_point_v<Scalar>);

public:
    using Storage = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
    using MatrixRM = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using MatMap = Eigen::Map<MatrixRM>;
    using ConstMatMap = Eigen::Map<const MatrixRM>;

    Tensor4() = default;

    Tensor4(Index b, Index n, Index h, Index w) : b_(b), n_(n), h_(h), w_(w) {
        require(b > 0 && n > 0 && h > 0 && w > 0, "Tensor4: dims must be positive");
        data_ = Storage::Zero(b * n * h * w);
    }

    static Tensor4 constant(Index b, Index n, Index h, Index w, Scalar v) {
        Tensor4 t(b, n, h, w);
        t.data_.setConstant(v);
        return t;
    }

    Index batch() const { return b_; }
    Index channels() const { return n_; }
    Index height() const { return h_; }
    Index width() const { return w_; }
    Index size() const { return data_.size(); }

    Scalar operator()(Index b, Index n, Index h, Index w) const { return data_[flat(b, n, h, w)]; }
    Scalar& operator()(Index b, Index n, Index h, Index w) { return data_[flat(b, n, h, w)]; }

    const Storage& raw() const { return data_; }
    Storage& raw() { return data_; }

    bool same_shape(const Tensor4& o) const {
        return b_ == o.b_ && n_ == o.n_ && h_ == o.h_ && w_ == o.w_;
    }

    // Channels-by-pixels view of one batch item: N rows, H*W columns.
    MatMap channel_pixels(Index b) {
        return MatMap(data_.data() + b * n_ * h_ * w_, n_, h_ * w_);
    }
    ConstMatMap channel_pixels(Index b) const {
        return ConstMatMap(data_.data() + b * n_ * h_ * w_, n_, h_ * w_);
    }

    // H-by-W view of one (batch, channel) plane; doubles as the per-(b,l) matrix
    // view for batched matrix products on token tensors.
    MatMap plane(Index b, Index n) {
        return MatMap(data_.data() + (b * n_ + n) * h_ * w_, h_, w_);
    }
    ConstMatMap plane(Index b, Index n) const {
        return ConstMatMap(data_.data() + (b * n_ + n) * h_ * w_, h_, w_);
    }

private:
    Index flat(Index b, Index n, Index h, Index w) const {
        return ((b * n_ + n) * h_ + h) * w_ + w;
    }

    Index b_ = 0, n_ = 0, h_ = 0, w_ = 0;
    Storage data_;
};

// Pointwise (1x1) or depthwise 3x3 convolution weights.
template <typename Scalar>
struct ConvWeights {
    enum class Kind { pointwise, depthwise3x3 };

    Kind kind = Kind::pointwise;
    Index in_channels = 0;
    Index out_channels = 0;
    // pointwise: out x in matrix; depthwise: one 3x3 kernel per channel, stored
    // as an N x 9 matrix in kernel row-major order.
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> weight;
    Eigen::Vector<Scalar, Eigen::Dynamic> bias;

    static ConvWeights pointwise(
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w,
        Eigen::Vector<Scalar, Eigen::Dynamic> b) {
        ConvWeights cw;
        cw.kind = Kind::pointwise;
        cw.out_channels = w.rows();
        cw.in_channels = w.cols();
        require(b.size() == w.rows(), "ConvWeights: bias size must equal out_channels");
        cw.weight = std::move(w);
        cw.bias = std::move(b);
        return cw;
    }

    static ConvWeights depthwise(
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> kernels,
        Eigen::Vector<Scalar, Eigen::Dynamic> b) {
        ConvWeights cw;
        cw.kind = Kind::depthwise3x3;
        require(kernels.cols() == 9, "ConvWeights: depthwise kernels must be N x 9");
        require(b.size() == kernels.rows(), "ConvWeights: bias size must equal channel count");
        cw.in_channels = cw.out_channels = kernels.rows();
        cw.weight = std::move(kernels);
        cw.bias = std::move(b);
        return cw;
    }

    static ConvWeights identity_pointwise(Index n) {
        using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        return pointwise(M::Identity(n, n), Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(n));
    }

    // Centered delta kernel per channel: depthwise identity.
    static ConvWeights delta_depthwise(Index n) {
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> k =
            Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(n, 9);
        k.col(4).setOnes();
        return depthwise(std::move(k), Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(n));
    }
};

// Per-pixel linear map across channels plus bias.
template <typename Scalar>
Tensor4<Scalar> conv1x1(const Tensor4<Scalar>& x, const ConvWeights<Scalar>& w) {
    require(w.kind == ConvWeights<Scalar>::Kind::pointwise, "conv1x1: weights must be pointwise");
    require(w.in_channels == x.channels(), "conv1x1: channel mismatch");
    Tensor4<Scalar> out(x.batch(), w.out_channels, x.height(), x.width());
    for (Index b = 0; b < x.batch(); ++b) {
        auto om = out.channel_pixels(b);
        om.noalias() = w.weight * x.channel_pixels(b);
        om.colwise() += w.bias;
    }
    return out;
}

// Per-channel 3x3 convolution, zero padded to the same spatial size.
template <typename Scalar>
Tensor4<Scalar> dwconv3x3(const Tensor4<Scalar>& x, const ConvWeights<Scalar>& w) {
    require(w.kind == ConvWeights<Scalar>::Kind::depthwise3x3,
            "dwconv3x3: weights must be depthwise3x3");
    require(w.in_channels == x.channels(), "dwconv3x3: channel mismatch");
    const Index h = x.height(), wd = x.width();
    Tensor4<Scalar> out(x.batch(), x.channels(), h, wd);
    for (Index b = 0; b < x.batch(); ++b) {
        for (Index n = 0; n < x.channels(); ++n) {
            const auto in = x.plane(b, n);
            auto om = out.plane(b, n);
            const auto k = w.weight.row(n);
            const Scalar bias = w.bias[n];
            for (Index y = 0; y < h; ++y) {
                for (Index c = 0; c < wd; ++c) {
                    Scalar acc = bias;
                    for (Index ky = -1; ky <= 1; ++ky) {
                        const Index yy = y + ky;
                        if (yy < 0 || yy >= h) continue;
                        for (Index kx = -1; kx <= 1; ++kx) {
                            const Index xx = c + kx;
                            if (xx < 0 || xx >= wd) continue;
                            acc += k[3 * (ky + 1) + (kx + 1)] * in(yy, xx);
                        }
                    }
                    om(y, c) = acc;
                }
            }
        }
    }
    return out;
}

// Softmax along the last dimension, stabilized by max subtraction. Scalar
// std::exp keeps IEEE underflow semantics (saturated rows come out exactly
// one-hot).
template <typename Scalar>
Tensor4<Scalar> softmax_lastdim(const Tensor4<Scalar>& x) {
    Tensor4<Scalar> out = x;
    const Index rows = x.batch() * x.channels() * x.height();
    const Index len = x.width();
    Scalar* p = out.raw().data();
    for (Index r = 0; r < rows; ++r) {
        Scalar* row = p + r * len;
        Scalar mx = row[0];
        for (Index i = 1; i < len; ++i) mx = std::max(mx, row[i]);
        Scalar sum = Scalar(0);
        for (Index i = 0; i < len; ++i) {
            row[i] = std::exp(row[i] - mx);
            sum += row[i];
        }
        for (Index i = 0; i < len; ++i) row[i] /= sum;
    }
    return out;
}

template <typename Scalar>
Tensor4<Scalar> sigmoid(const Tensor4<Scalar>& x) {
    Tensor4<Scalar> out = x;
    out.raw() = Scalar(1) / (Scalar(1) + (-out.raw()).exp());
    return out;
}

template <typename Scalar>
Tensor4<Scalar> relu(const Tensor4<Scalar>& x) {
    Tensor4<Scalar> out = x;
    out.raw() = out.raw().max(Scalar(0));
    return out;
}

// 2x2 mean pooling; spatial dims must be even.
template <typename Scalar>
Tensor4<Scalar> downsample2(const Tensor4<Scalar>& x) {
    require(x.height() % 2 == 0 && x.width() % 2 == 0,
            "downsample2: spatial dims must be even");
    Tensor4<Scalar> out(x.batch(), x.channels(), x.height() / 2, x.width() / 2);
    for (Index b = 0; b < x.batch(); ++b) {
        for (Index n = 0; n < x.channels(); ++n) {
            const auto in = x.plane(b, n);
            auto om = out.plane(b, n);
            for (Index y = 0; y < om.rows(); ++y)
                for (Index c = 0; c < om.cols(); ++c)
                    om(y, c) = (in(2 * y, 2 * c) + in(2 * y, 2 * c + 1) + in(2 * y + 1, 2 * c) +
                                in(2 * y + 1, 2 * c + 1)) *
                               Scalar(0.25);
        }
    }
    return out;
}

// Bilinear x2 upsampling, align-corners=false convention: output pixel centers
// sample the input at ((o + 0.5) / 2 - 0.5) with edge clamping. Lerp form keeps
// constant inputs bit-exact.
template <typename Scalar>
Tensor4<Scalar> upsample2(const Tensor4<Scalar>& x) {
    const Index h = x.height(), w = x.width();
    Tensor4<Scalar> out(x.batch(), x.channels(), 2 * h, 2 * w);
    auto lerp = [](Scalar a, Scalar b, Scalar t) { return a + t * (b - a); };
    for (Index b = 0; b < x.batch(); ++b) {
        for (Index n = 0; n < x.channels(); ++n) {
            const auto in = x.plane(b, n);
            auto om = out.plane(b, n);
            for (Index oy = 0; oy < 2 * h; ++oy) {
                const Scalar sy = (Scalar(oy) + Scalar(0.5)) * Scalar(0.5) - Scalar(0.5);
                const Index y0 = static_cast<Index>(std::floor(sy));
                const Scalar fy = sy - Scalar(y0);
                const Index y0c = std::clamp<Index>(y0, 0, h - 1);
                const Index y1c = std::clamp<Index>(y0 + 1, 0, h - 1);
                for (Index ox = 0; ox < 2 * w; ++ox) {
                    const Scalar sx = (Scalar(ox) + Scalar(0.5)) * Scalar(0.5) - Scalar(0.5);
                    const Index x0 = static_cast<Index>(std::floor(sx));
                    const Scalar fx = sx - Scalar(x0);
                    const Index x0c = std::clamp<Index>(x0, 0, w - 1);
                    const Index x1c = std::clamp<Index>(x0 + 1, 0, w - 1);
                    const Scalar top = lerp(in(y0c, x0c), in(y0c, x1c), fx);
                    const Scalar bot = lerp(in(y1c, x0c), in(y1c, x1c), fx);
                    om(oy, ox) = lerp(top, bot, fy);
                }
            }
        }
    }
    return out;
}

template <typename Scalar>
Tensor4<Scalar> concat_channels(const Tensor4<Scalar>& a, const Tensor4<Scalar>& b) {
    require(a.batch() == b.batch() && a.height() == b.height() && a.width() == b.width(),
            "concat_channels: batch/spatial dims must match");
    Tensor4<Scalar> out(a.batch(), a.channels() + b.channels(), a.height(), a.width());
    const Index plane = a.height() * a.width();
    for (Index i = 0; i < a.batch(); ++i) {
        out.raw().segment(i * out.channels() * plane, a.channels() * plane) =
            a.raw().segment(i * a.channels() * plane, a.channels() * plane);
        out.raw().segment(i * out.channels() * plane + a.channels() * plane, b.channels() * plane) =
            b.raw().segment(i * b.channels() * plane, b.channels() * plane);
    }
    return out;
}

template <typename Scalar>
std::pair<Tensor4<Scalar>, Tensor4<Scalar>> split_channels(const Tensor4<Scalar>& x, Index k) {
    require(k > 0 && k < x.channels(), "split_channels: split point must be inside (0, N)");
    Tensor4<Scalar> a(x.batch(), k, x.height(), x.width());
    Tensor4<Scalar> b(x.batch(), x.channels() - k, x.height(), x.width());
    const Index plane = x.height() * x.width();
    for (Index i = 0; i < x.batch(); ++i) {
        a.raw().segment(i * k * plane, k * plane) =
            x.raw().segment(i * x.channels() * plane, k * plane);
        b.raw().segment(i * (x.channels() - k) * plane, (x.channels() - k) * plane) =
            x.raw().segment(i * x.channels() * plane + k * plane, (x.channels() - k) * plane);
    }
    return {std::move(a), std::move(b)};
}

// Batched matrix product over the leading two dims: (B,L,M,K) x (B,L,K,P) -> (B,L,M,P).
template <typename Scalar>
Tensor4<Scalar> matmul_batched(const Tensor4<Scalar>& a, const Tensor4<Scalar>& b) {
    require(a.batch() == b.batch() && a.channels() == b.channels(),
            "matmul_batched: leading dims must match");
    require(a.width() == b.height(), "matmul_batched: inner dims must match");
    Tensor4<Scalar> out(a.batch(), a.channels(), a.height(), b.width());
    for (Index i = 0; i < a.batch(); ++i)
        for (Index l = 0; l < a.channels(); ++l)
            out.plane(i, l).noalias() = a.plane(i, l) * b.plane(i, l);
    return out;
}

// A * B^T over the last two dims: (B,L,M,K) x (B,L,P,K) -> (B,L,M,P).
template <typename Scalar>
Tensor4<Scalar> matmul_batched_nt(const Tensor4<Scalar>& a, const Tensor4<Scalar>& b) {
    require(a.batch() == b.batch() && a.channels() == b.channels(),
            "matmul_batched_nt: leading dims must match");
    require(a.width() == b.width(), "matmul_batched_nt: inner dims must match");
    Tensor4<Scalar> out(a.batch(), a.channels(), a.height(), b.height());
    for (Index i = 0; i < a.batch(); ++i)
        for (Index l = 0; l < a.channels(); ++l)
            out.plane(i, l).noalias() = a.plane(i, l) * b.plane(i, l).transpose();
    return out;
}

// Reinterpret the flat row-major buffer under new dims (total size preserved).
template <typename Scalar>
Tensor4<Scalar> reshape(const Tensor4<Scalar>& x, Index b, Index n, Index h, Index w) {
    require(b * n * h * w == x.size(), "reshape: total element count must be preserved");
    Tensor4<Scalar> out(b, n, h, w);
    out.raw() = x.raw();
    return out;
}

// Swap the two factors of a composite channel axis: input channel c*T + t maps
// to output channel t*C + c. Its own inverse with the factor arguments swapped.
template <typename Scalar>
Tensor4<Scalar> permute_ct(const Tensor4<Scalar>& x, Index c_dim, Index t_dim) {
    require(x.channels() == c_dim * t_dim, "permute_ct: channels must equal C*T");
    Tensor4<Scalar> out(x.batch(), x.channels(), x.height(), x.width());
    const Index plane = x.height() * x.width();
    for (Index b = 0; b < x.batch(); ++b) {
        for (Index c = 0; c < c_dim; ++c) {
            for (Index t = 0; t < t_dim; ++t) {
                out.raw().segment((b * x.channels() + t * c_dim + c) * plane, plane) =
                    x.raw().segment((b * x.channels() + c * t_dim + t) * plane, plane);
            }
        }
    }
    return out;
}

template <typename Scalar>
Scalar max_abs(const Tensor4<Scalar>& x) {
    return x.raw().abs().maxCoeff();
}

template <typename Scalar>
bool all_finite(const Tensor4<Scalar>& x) {
    return x.raw().isFinite().all();
}

using Tensor4d = Tensor4<double>;
using ConvWeightsd = ConvWeights<double>;

}  // namespace evrobust
