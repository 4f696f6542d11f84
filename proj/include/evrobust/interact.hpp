#pragma once

#include "evrobust/mrm.hpp"
#include "evrobust/tensor.hpp"

namespace evrobust {

// Motion Saliency Enhancer: lifts high-frequency event structure into the image
// branch.
template <typename Scalar>
struct MsemWeights {
    ConvWeights<Scalar> hf_dw1, hf_dw2;        // depthwise pair after downsample-subtract
    ConvWeights<Scalar> fuse_pw;               // 2N -> N
    ConvWeights<Scalar> fuse_dw1, fuse_dw2;    // depthwise pair on the fused features
    ConvWeights<Scalar> gate_pw;               // N -> N logits for the motion-aware gate
    ConvWeights<Scalar> out_pw;                // 2N -> N final fusion
};

// Event Semantic Engraver: engraves channel-attended image semantics into the
// event branch.
template <typename Scalar>
struct EsemWeights {
    ConvWeights<Scalar> enc_pw, enc_dw;        // image encoder block
    ConvWeights<Scalar> ca_reduce, ca_expand;  // squeeze-excite pointwise pair
    ConvWeights<Scalar> fuse_pw;               // 2N -> M (M even), then split in halves
    AttentionBlock<Scalar> temporal;           // motion-tokenized attention on the event half
    ConvWeights<Scalar> sb_dw, sb_pw;          // spatial gate logits on the semantic half
    ConvWeights<Scalar> out_pw;                // M -> N
};

// High-frequency components: depthwise convolutions of the residual between x
// and its downsample-then-upsample reconstruction.
template <typename Scalar>
Tensor4<Scalar> high_freq(const Tensor4<Scalar>& x, const ConvWeights<Scalar>& dw1,
                          const ConvWeights<Scalar>& dw2) {
    require(x.height() % 2 == 0 && x.width() % 2 == 0, "high_freq: spatial dims must be even");
    Tensor4<Scalar> residual = x;
    residual.raw() -= upsample2(downsample2(x)).raw();
    return dwconv3x3(dwconv3x3(residual, dw1), dw2);
}

template <typename Scalar>
struct MsemTrace {
    Tensor4<Scalar> saliency;        // S
    Tensor4<Scalar> enhanced;        // F_E * S + F_E
    Tensor4<Scalar> mixed;           // fused event/image representation
    Tensor4<Scalar> gate;            // motion-aware attention map, entries in (0,1)
    Tensor4<Scalar> refined;         // gate * enhanced
    Tensor4<Scalar> output;          // features handed to the image branch
};

template <typename Scalar>
MsemTrace<Scalar> msem_forward_trace(const Tensor4<Scalar>& f_event, const Tensor4<Scalar>& f_image,
                                     const MsemWeights<Scalar>& w) {
    require(f_event.same_shape(f_image), "msem_forward: input shape mismatch");
    MsemTrace<Scalar> tr;
    tr.saliency = high_freq(f_event, w.hf_dw1, w.hf_dw2);
    tr.enhanced = f_event;
    tr.enhanced.raw() = f_event.raw() * tr.saliency.raw() + f_event.raw();
    tr.mixed = dwconv3x3(
        dwconv3x3(conv1x1(concat_channels(tr.enhanced, f_image), w.fuse_pw), w.fuse_dw1),
        w.fuse_dw2);
    tr.gate = sigmoid(conv1x1(tr.mixed, w.gate_pw));
    tr.refined = tr.enhanced;
    tr.refined.raw() = tr.gate.raw() * tr.enhanced.raw();
    tr.output = conv1x1(concat_channels(tr.mixed, tr.refined), w.out_pw);
    return tr;
}

template <typename Scalar>
Tensor4<Scalar> msem_forward(const Tensor4<Scalar>& f_event, const Tensor4<Scalar>& f_image,
                             const MsemWeights<Scalar>& w) {
    return msem_forward_trace(f_event, f_image, w).output;
}

// Squeeze-excite channel attention: global spatial mean -> reduce -> relu ->
// expand -> sigmoid. Returns a (B, N, 1, 1) tensor of per-channel weights.
template <typename Scalar>
Tensor4<Scalar> channel_attention(const Tensor4<Scalar>& x, const ConvWeights<Scalar>& reduce,
                                  const ConvWeights<Scalar>& expand) {
    Tensor4<Scalar> squeezed(x.batch(), x.channels(), 1, 1);
    for (Index b = 0; b < x.batch(); ++b)
        squeezed.channel_pixels(b) = x.channel_pixels(b).rowwise().mean();
    return sigmoid(conv1x1(relu(conv1x1(squeezed, reduce)), expand));
}

template <typename Scalar>
struct EsemTrace {
    Tensor4<Scalar> encoded;         // image encoder output
    Tensor4<Scalar> channel_gate;    // beta, (B, N, 1, 1), entries in (0,1)
    Tensor4<Scalar> semantic;        // beta * encoded
    Tensor4<Scalar> mixed;           // fused semantic/event features (M channels)
    Tensor4<Scalar> event_branch;    // temporal attention output on the event half
    Tensor4<Scalar> spatial_gate;    // per-pixel gate on the semantic half
    Tensor4<Scalar> semantic_branch; // gated semantic half
    Tensor4<Scalar> output;          // features handed to the event branch
};

template <typename Scalar>
EsemTrace<Scalar> esem_forward_trace(const Tensor4<Scalar>& f_image, const Tensor4<Scalar>& f_event,
                                     const MrmConfig& cfg, const EsemWeights<Scalar>& w) {
    require(f_image.same_shape(f_event), "esem_forward: input shape mismatch");
    EsemTrace<Scalar> tr;
    tr.encoded = dwconv3x3(conv1x1(f_image, w.enc_pw), w.enc_dw);
    tr.channel_gate = channel_attention(tr.encoded, w.ca_reduce, w.ca_expand);

    tr.semantic = tr.encoded;
    for (Index b = 0; b < tr.semantic.batch(); ++b) {
        auto m = tr.semantic.channel_pixels(b);
        m.array().colwise() *= tr.channel_gate.channel_pixels(b).col(0).array();
    }

    tr.mixed = conv1x1(concat_channels(tr.semantic, f_event), w.fuse_pw);
    require(tr.mixed.channels() % 2 == 0, "esem_forward: fused channel count must be even");
    require(tr.mixed.channels() / 2 == cfg.feature_channels(),
            "esem_forward: fused halves must match the attention channel count");
    auto [event_half, semantic_half] = split_channels(tr.mixed, tr.mixed.channels() / 2);

    tr.event_branch = motion_attention(event_half, cfg, w.temporal);
    tr.spatial_gate = sigmoid(conv1x1(dwconv3x3(semantic_half, w.sb_dw), w.sb_pw));
    tr.semantic_branch = semantic_half;
    tr.semantic_branch.raw() = tr.spatial_gate.raw() * semantic_half.raw();

    tr.output = conv1x1(concat_channels(tr.event_branch, tr.semantic_branch), w.out_pw);
    return tr;
}

template <typename Scalar>
Tensor4<Scalar> esem_forward(const Tensor4<Scalar>& f_image, const Tensor4<Scalar>& f_event,
                             const MrmConfig& cfg, const EsemWeights<Scalar>& w) {
    return esem_forward_trace(f_image, f_event, cfg, w).output;
}

}  // namespace evrobust
