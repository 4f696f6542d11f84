#include "evrobust/weights_io.hpp"

#include <fstream>

#include "evrobust/rng.hpp"
#include "evrobust/tensor_io.hpp"

namespace evrobust {

namespace {

const Tensor4d& section(const WeightsFile& wf, const std::string& name) {
    auto it = wf.tensors.find(name);
    if (it == wf.tensors.end())
        throw ValidationError("weights file: missing tensor section `" + name + "`");
    return it->second;
}

ConvWeightsd load_pointwise(const WeightsFile& wf, const std::string& scope) {
    const Tensor4d& wt = section(wf, scope + ".w");
    const Tensor4d& bt = section(wf, scope + ".b");
    require(wt.height() == 1 && wt.width() == 1,
            "weights file: pointwise tensor `" + scope + ".w` must be (out, in, 1, 1)");
    require(bt.channels() == 1 && bt.height() == 1 && bt.width() == 1 &&
                bt.batch() == wt.batch(),
            "weights file: bias `" + scope + ".b` must be (out, 1, 1, 1)");
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(wt.batch(),
                                                                             wt.channels());
    for (Index o = 0; o < wt.batch(); ++o)
        for (Index i = 0; i < wt.channels(); ++i) w(o, i) = wt(o, i, 0, 0);
    Eigen::VectorXd b(bt.batch());
    for (Index o = 0; o < bt.batch(); ++o) b[o] = bt(o, 0, 0, 0);
    return ConvWeightsd::pointwise(std::move(w), std::move(b));
}

ConvWeightsd load_depthwise(const WeightsFile& wf, const std::string& scope) {
    const Tensor4d& wt = section(wf, scope + ".w");
    const Tensor4d& bt = section(wf, scope + ".b");
    require(wt.channels() == 1 && wt.height() == 3 && wt.width() == 3,
            "weights file: depthwise tensor `" + scope + ".w` must be (n, 1, 3, 3)");
    require(bt.batch() == wt.batch() && bt.channels() == 1 && bt.height() == 1 && bt.width() == 1,
            "weights file: bias `" + scope + ".b` must be (n, 1, 1, 1)");
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> k(wt.batch(), 9);
    for (Index n = 0; n < wt.batch(); ++n)
        for (Index y = 0; y < 3; ++y)
            for (Index x = 0; x < 3; ++x) k(n, 3 * y + x) = wt(n, 0, y, x);
    Eigen::VectorXd b(bt.batch());
    for (Index n = 0; n < bt.batch(); ++n) b[n] = bt(n, 0, 0, 0);
    return ConvWeightsd::depthwise(std::move(k), std::move(b));
}

AttentionBlock<double> load_attention(const WeightsFile& wf, const std::string& scope, Index n) {
    AttentionBlock<double> blk;
    blk.q_pw = load_pointwise(wf, scope + ".q_pw");
    blk.q_dw = load_depthwise(wf, scope + ".q_dw");
    blk.k_pw = load_pointwise(wf, scope + ".k_pw");
    blk.k_dw = load_depthwise(wf, scope + ".k_dw");
    blk.v_pw = load_pointwise(wf, scope + ".v_pw");
    blk.v_dw = load_depthwise(wf, scope + ".v_dw");
    blk.out_pw = load_pointwise(wf, scope + ".out_pw");
    for (const ConvWeightsd* cw : {&blk.q_pw, &blk.k_pw, &blk.v_pw, &blk.out_pw})
        require(cw->in_channels == n && cw->out_channels == n,
                "weights file: attention block `" + scope + "` shape inconsistent with config");
    for (const ConvWeightsd* cw : {&blk.q_dw, &blk.k_dw, &blk.v_dw})
        require(cw->in_channels == n,
                "weights file: attention block `" + scope + "` shape inconsistent with config");
    return blk;
}

void store_pointwise(WeightsFile& wf, const std::string& scope, const ConvWeightsd& cw) {
    Tensor4d wt(cw.out_channels, cw.in_channels, 1, 1);
    for (Index o = 0; o < cw.out_channels; ++o)
        for (Index i = 0; i < cw.in_channels; ++i) wt(o, i, 0, 0) = cw.weight(o, i);
    Tensor4d bt(cw.out_channels, 1, 1, 1);
    for (Index o = 0; o < cw.out_channels; ++o) bt(o, 0, 0, 0) = cw.bias[o];
    wf.tensors[scope + ".w"] = std::move(wt);
    wf.tensors[scope + ".b"] = std::move(bt);
}

void store_depthwise(WeightsFile& wf, const std::string& scope, const ConvWeightsd& cw) {
    Tensor4d wt(cw.out_channels, 1, 3, 3);
    for (Index n = 0; n < cw.out_channels; ++n)
        for (Index y = 0; y < 3; ++y)
            for (Index x = 0; x < 3; ++x) wt(n, 0, y, x) = cw.weight(n, 3 * y + x);
    Tensor4d bt(cw.out_channels, 1, 1, 1);
    for (Index n = 0; n < cw.out_channels; ++n) bt(n, 0, 0, 0) = cw.bias[n];
    wf.tensors[scope + ".w"] = std::move(wt);
    wf.tensors[scope + ".b"] = std::move(bt);
}

ConvWeightsd random_pointwise(Index out, Index in, CounterRng rng, double scale) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(out, in);
    for (Index o = 0; o < out; ++o)
        for (Index i = 0; i < in; ++i) w(o, i) = scale * rng.normal();
    return ConvWeightsd::pointwise(std::move(w), Eigen::VectorXd::Zero(out));
}

ConvWeightsd random_depthwise(Index n, CounterRng rng, double scale) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> k(n, 9);
    for (Index c = 0; c < n; ++c) {
        for (Index i = 0; i < 9; ++i) k(c, i) = scale * rng.normal();
        k(c, 4) += 1.0;  // near-delta so stacked blocks stay well-scaled
    }
    return ConvWeightsd::depthwise(std::move(k), Eigen::VectorXd::Zero(n));
}

void random_attention(WeightsFile& wf, const std::string& scope, Index n, CounterRng rng,
                      double scale) {
    store_pointwise(wf, scope + ".q_pw", random_pointwise(n, n, rng.substream(0), scale));
    store_depthwise(wf, scope + ".q_dw", random_depthwise(n, rng.substream(1), scale));
    store_pointwise(wf, scope + ".k_pw", random_pointwise(n, n, rng.substream(2), scale));
    store_depthwise(wf, scope + ".k_dw", random_depthwise(n, rng.substream(3), scale));
    store_pointwise(wf, scope + ".v_pw", random_pointwise(n, n, rng.substream(4), scale));
    store_depthwise(wf, scope + ".v_dw", random_depthwise(n, rng.substream(5), scale));
    store_pointwise(wf, scope + ".out_pw", random_pointwise(n, n, rng.substream(6), scale));
}

}  // namespace

WeightsFile read_weights(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open weights file: " + path.string());
    std::string magic;
    WeightsFile wf;
    if (!(in >> magic >> wf.cfg.channels_c >> wf.cfg.temporal_t >> wf.cfg.heads) ||
        magic != "MRMW1")
        throw ValidationError(path.string() + ": malformed header, expected `MRMW1 <C> <T> <L>`");
    wf.cfg.validate();

    std::string tag;
    while (in >> tag) {
        if (tag != "tensor")
            throw ValidationError(path.string() + ": expected `tensor` section, got `" + tag + "`");
        std::string name;
        if (!(in >> name))
            throw ValidationError(path.string() + ": tensor section without a name");
        wf.tensors[name] = read_tensor4(in, path.string() + " section `" + name + "`");
    }
    return wf;
}

void write_weights(const WeightsFile& wf, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open weights file for writing: " + path.string());
    out << "MRMW1 " << wf.cfg.channels_c << ' ' << wf.cfg.temporal_t << ' ' << wf.cfg.heads << '\n';
    for (const auto& [name, t] : wf.tensors) {
        out << "tensor " << name << '\n';
        write_tensor4(t, out);
    }
    if (!out) throw ValidationError("write failed: " + path.string());
}

MrmWeights<double> bind_mrm(const WeightsFile& wf) {
    const Index n = wf.cfg.feature_channels();
    MrmWeights<double> w;
    w.semantic = load_attention(wf, "mrm.sem", n);
    w.motion = load_attention(wf, "mrm.mot", n);
    w.cross_ie = load_attention(wf, "mrm.xie", n);
    w.cross_ei = load_attention(wf, "mrm.xei", n);
    w.cross_out = load_pointwise(wf, "mrm.xout");
    require(w.cross_out.in_channels == 2 * n && w.cross_out.out_channels == n,
            "weights file: mrm.xout must map 2N -> N channels");
    return w;
}

MsemWeights<double> bind_msem(const WeightsFile& wf) {
    const Index n = wf.cfg.feature_channels();
    MsemWeights<double> w;
    w.hf_dw1 = load_depthwise(wf, "msem.hf_dw1");
    w.hf_dw2 = load_depthwise(wf, "msem.hf_dw2");
    w.fuse_pw = load_pointwise(wf, "msem.fuse_pw");
    w.fuse_dw1 = load_depthwise(wf, "msem.fuse_dw1");
    w.fuse_dw2 = load_depthwise(wf, "msem.fuse_dw2");
    w.gate_pw = load_pointwise(wf, "msem.gate_pw");
    w.out_pw = load_pointwise(wf, "msem.out_pw");
    require(w.hf_dw1.in_channels == n && w.fuse_pw.in_channels == 2 * n &&
                w.fuse_pw.out_channels == n && w.gate_pw.in_channels == n &&
                w.gate_pw.out_channels == n && w.out_pw.in_channels == 2 * n &&
                w.out_pw.out_channels == n,
            "weights file: msem section shapes inconsistent with config");
    return w;
}

EsemWeights<double> bind_esem(const WeightsFile& wf) {
    const Index n = wf.cfg.feature_channels();
    EsemWeights<double> w;
    w.enc_pw = load_pointwise(wf, "esem.enc_pw");
    w.enc_dw = load_depthwise(wf, "esem.enc_dw");
    w.ca_reduce = load_pointwise(wf, "esem.ca_reduce");
    w.ca_expand = load_pointwise(wf, "esem.ca_expand");
    w.fuse_pw = load_pointwise(wf, "esem.fuse_pw");
    w.temporal = load_attention(wf, "esem.tb", n);
    w.sb_dw = load_depthwise(wf, "esem.sb_dw");
    w.sb_pw = load_pointwise(wf, "esem.sb_pw");
    w.out_pw = load_pointwise(wf, "esem.out_pw");
    require(w.enc_pw.in_channels == n && w.ca_reduce.in_channels == n &&
                w.ca_expand.out_channels == n &&
                w.ca_expand.in_channels == w.ca_reduce.out_channels,
            "weights file: esem channel-attention shapes inconsistent with config");
    require(w.fuse_pw.in_channels == 2 * n, "weights file: esem.fuse_pw must take 2N channels");
    require(w.sb_pw.in_channels == n && w.sb_pw.out_channels == n && w.sb_dw.in_channels == n,
            "weights file: esem spatial-branch shapes inconsistent with config");
    require(w.out_pw.in_channels == w.fuse_pw.out_channels && w.out_pw.out_channels == n,
            "weights file: esem.out_pw must map the fused width back to N channels");
    return w;
}

WeightsFile make_random_weights(const MrmConfig& cfg, std::uint64_t seed, double scale) {
    cfg.validate();
    const Index n = cfg.feature_channels();
    const Index nr = std::max<Index>(1, n / 4);
    WeightsFile wf;
    wf.cfg = cfg;
    CounterRng rng(seed, 0x3177u);

    random_attention(wf, "mrm.sem", n, rng.substream(1), scale);
    random_attention(wf, "mrm.mot", n, rng.substream(2), scale);
    random_attention(wf, "mrm.xie", n, rng.substream(3), scale);
    random_attention(wf, "mrm.xei", n, rng.substream(4), scale);
    store_pointwise(wf, "mrm.xout", random_pointwise(n, 2 * n, rng.substream(5), scale));

    store_depthwise(wf, "msem.hf_dw1", random_depthwise(n, rng.substream(10), scale));
    store_depthwise(wf, "msem.hf_dw2", random_depthwise(n, rng.substream(11), scale));
    store_pointwise(wf, "msem.fuse_pw", random_pointwise(n, 2 * n, rng.substream(12), scale));
    store_depthwise(wf, "msem.fuse_dw1", random_depthwise(n, rng.substream(13), scale));
    store_depthwise(wf, "msem.fuse_dw2", random_depthwise(n, rng.substream(14), scale));
    store_pointwise(wf, "msem.gate_pw", random_pointwise(n, n, rng.substream(15), scale));
    store_pointwise(wf, "msem.out_pw", random_pointwise(n, 2 * n, rng.substream(16), scale));

    store_pointwise(wf, "esem.enc_pw", random_pointwise(n, n, rng.substream(20), scale));
    store_depthwise(wf, "esem.enc_dw", random_depthwise(n, rng.substream(21), scale));
    store_pointwise(wf, "esem.ca_reduce", random_pointwise(nr, n, rng.substream(22), scale));
    store_pointwise(wf, "esem.ca_expand", random_pointwise(n, nr, rng.substream(23), scale));
    store_pointwise(wf, "esem.fuse_pw", random_pointwise(2 * n, 2 * n, rng.substream(24), scale));
    random_attention(wf, "esem.tb", n, rng.substream(25), scale);
    store_depthwise(wf, "esem.sb_dw", random_depthwise(n, rng.substream(26), scale));
    store_pointwise(wf, "esem.sb_pw", random_pointwise(n, n, rng.substream(27), scale));
    store_pointwise(wf, "esem.out_pw", random_pointwise(n, 2 * n, rng.substream(28), scale));
    return wf;
}

}  // namespace evrobust
