#pragma once

#include "evrobust/tensor.hpp"

namespace evrobust {

// Feature channels factor as N = C * T with the temporal index innermost and
// heads outermost within C: channel n = (l * C_L + c) * T + t. Under that
// layout the semantic tokenization (B, L, C_L, T*H*W) is a pure reshape and the
// motion tokenization needs only a C/T factor swap.
struct MrmConfig {
    Index channels_c = 4;   // semantic channels C
    Index temporal_t = 2;   // temporal slots T
    Index heads = 2;        // L
    bool use_residual = true;

    Index c_per_head() const { return channels_c / heads; }
    Index t_per_head() const { return temporal_t / heads; }
    Index feature_channels() const { return channels_c * temporal_t; }

    void validate() const {
        require(channels_c > 0 && temporal_t > 0 && heads > 0, "MrmConfig: dims must be positive");
        require(channels_c % heads == 0, "MrmConfig: head count must divide C");
        require(temporal_t % heads == 0, "MrmConfig: head count must divide T");
    }
};

// One attention unit: pointwise + depthwise pair per projection, plus an output
// projection applied after the token mixing.
template <typename Scalar>
struct AttentionBlock {
    ConvWeights<Scalar> q_pw, q_dw;
    ConvWeights<Scalar> k_pw, k_dw;
    ConvWeights<Scalar> v_pw, v_dw;
    ConvWeights<Scalar> out_pw;
};

template <typename Scalar>
struct MrmWeights {
    AttentionBlock<Scalar> semantic;
    AttentionBlock<Scalar> motion;
    AttentionBlock<Scalar> cross_ie;  // Q,K from image features; V from event features
    AttentionBlock<Scalar> cross_ei;  // Q,K from event features; V from image features
    ConvWeights<Scalar> cross_out;    // 2N -> N after concatenating the two directions
};

template <typename Scalar>
Tensor4<Scalar> qkv_project(const Tensor4<Scalar>& x, const ConvWeights<Scalar>& pw,
                            const ConvWeights<Scalar>& dw) {
    return dwconv3x3(conv1x1(x, pw), dw);
}

// (B, N, H, W) -> (B, L, C_L, T*H*W): spatio-temporal context per channel token.
template <typename Scalar>
Tensor4<Scalar> semantic_tokens(const Tensor4<Scalar>& x, const MrmConfig& cfg) {
    require(x.channels() == cfg.feature_channels(), "semantic_tokens: channel count mismatch");
    return reshape(x, x.batch(), cfg.heads, cfg.c_per_head(),
                   cfg.temporal_t * x.height() * x.width());
}

// (B, N, H, W) -> (B, L, T_L, C*H*W): spatio-channel context per temporal token.
template <typename Scalar>
Tensor4<Scalar> motion_tokens(const Tensor4<Scalar>& x, const MrmConfig& cfg) {
    require(x.channels() == cfg.feature_channels(), "motion_tokens: channel count mismatch");
    const Tensor4<Scalar> perm = permute_ct(x, cfg.channels_c, cfg.temporal_t);
    return reshape(perm, x.batch(), cfg.heads, cfg.t_per_head(),
                   cfg.channels_c * x.height() * x.width());
}

namespace detail {

// softmax(Q K^T) V on already-tokenized tensors.
template <typename Scalar>
Tensor4<Scalar> token_attention(const Tensor4<Scalar>& q, const Tensor4<Scalar>& k,
                                const Tensor4<Scalar>& v) {
    const Tensor4<Scalar> attn = softmax_lastdim(matmul_batched_nt(q, k));
    return matmul_batched(attn, v);
}

template <typename Scalar>
Tensor4<Scalar> semantic_core(const Tensor4<Scalar>& q, const Tensor4<Scalar>& k,
                              const Tensor4<Scalar>& v, const MrmConfig& cfg) {
    const Tensor4<Scalar> o = token_attention(semantic_tokens(q, cfg), semantic_tokens(k, cfg),
                                              semantic_tokens(v, cfg));
    return reshape(o, q.batch(), cfg.feature_channels(), q.height(), q.width());
}

template <typename Scalar>
Tensor4<Scalar> motion_core(const Tensor4<Scalar>& q, const Tensor4<Scalar>& k,
                            const Tensor4<Scalar>& v, const MrmConfig& cfg) {
    const Tensor4<Scalar> o =
        token_attention(motion_tokens(q, cfg), motion_tokens(k, cfg), motion_tokens(v, cfg));
    const Tensor4<Scalar> back =
        reshape(o, q.batch(), cfg.feature_channels(), q.height(), q.width());
    return permute_ct(back, cfg.temporal_t, cfg.channels_c);
}

}  // namespace detail

// Channel-token self-attention for the image branch.
template <typename Scalar>
Tensor4<Scalar> semantic_attention(const Tensor4<Scalar>& x, const MrmConfig& cfg,
                                   const AttentionBlock<Scalar>& w) {
    cfg.validate();
    require(x.channels() == cfg.feature_channels(), "semantic_attention: channel count mismatch");
    const Tensor4<Scalar> q = qkv_project(x, w.q_pw, w.q_dw);
    const Tensor4<Scalar> k = qkv_project(x, w.k_pw, w.k_dw);
    const Tensor4<Scalar> v = qkv_project(x, w.v_pw, w.v_dw);
    Tensor4<Scalar> out = conv1x1(detail::semantic_core(q, k, v, cfg), w.out_pw);
    if (cfg.use_residual) out.raw() += x.raw();
    return out;
}

// Temporal-token self-attention for the event branch.
template <typename Scalar>
Tensor4<Scalar> motion_attention(const Tensor4<Scalar>& x, const MrmConfig& cfg,
                                 const AttentionBlock<Scalar>& w) {
    cfg.validate();
    require(x.channels() == cfg.feature_channels(), "motion_attention: channel count mismatch");
    const Tensor4<Scalar> q = qkv_project(x, w.q_pw, w.q_dw);
    const Tensor4<Scalar> k = qkv_project(x, w.k_pw, w.k_dw);
    const Tensor4<Scalar> v = qkv_project(x, w.v_pw, w.v_dw);
    Tensor4<Scalar> out = conv1x1(detail::motion_core(q, k, v, cfg), w.out_pw);
    if (cfg.use_residual) out.raw() += x.raw();
    return out;
}

// The two cross-modality directions before fusion. I->E drives event values
// with image-derived spatio-temporal attention; E->I drives image values with
// event-derived spatio-channel attention. No residual here; fusion happens in
// cross_modality.
template <typename Scalar>
std::pair<Tensor4<Scalar>, Tensor4<Scalar>> cross_modality_directions(
    const Tensor4<Scalar>& f_image, const Tensor4<Scalar>& f_event, const MrmConfig& cfg,
    const MrmWeights<Scalar>& w) {
    cfg.validate();
    require(f_image.same_shape(f_event), "cross_modality: input shape mismatch");
    require(f_image.channels() == cfg.feature_channels(), "cross_modality: channel count mismatch");

    const Tensor4<Scalar> qi = qkv_project(f_image, w.cross_ie.q_pw, w.cross_ie.q_dw);
    const Tensor4<Scalar> ki = qkv_project(f_image, w.cross_ie.k_pw, w.cross_ie.k_dw);
    const Tensor4<Scalar> ve = qkv_project(f_event, w.cross_ie.v_pw, w.cross_ie.v_dw);
    const Tensor4<Scalar> to_event = conv1x1(detail::motion_core(qi, ki, ve, cfg), w.cross_ie.out_pw);

    const Tensor4<Scalar> qe = qkv_project(f_event, w.cross_ei.q_pw, w.cross_ei.q_dw);
    const Tensor4<Scalar> ke = qkv_project(f_event, w.cross_ei.k_pw, w.cross_ei.k_dw);
    const Tensor4<Scalar> vi = qkv_project(f_image, w.cross_ei.v_pw, w.cross_ei.v_dw);
    const Tensor4<Scalar> to_image =
        conv1x1(detail::semantic_core(qe, ke, vi, cfg), w.cross_ei.out_pw);

    return {to_event, to_image};
}

// Bidirectional cross-modality attention: the two direction outputs are
// concatenated on channels (I->E first) and projected back to N channels.
template <typename Scalar>
Tensor4<Scalar> cross_modality(const Tensor4<Scalar>& f_image, const Tensor4<Scalar>& f_event,
                               const MrmConfig& cfg, const MrmWeights<Scalar>& w) {
    auto [to_event, to_image] = cross_modality_directions(f_image, f_event, cfg, w);
    return conv1x1(concat_channels(to_event, to_image), w.cross_out);
}

}  // namespace evrobust
