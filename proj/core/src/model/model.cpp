#include "cma/model/model.hpp"

#include <cmath>
#include <random>

#include "cma/errors.hpp"

namespace cma {

namespace {

void glorot_fill(MatrixXd& W, Eigen::Index fan_in, Eigen::Index fan_out, std::mt19937_64& rng) {
    const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-s, s);
    for (Eigen::Index j = 0; j < W.cols(); ++j)
        for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = dist(rng);
}

VectorXd flatten(const Tensor& t) { return t.data; }

Tensor unflatten(const VectorXd& v, int c, int h, int w) {
    Tensor t(c, h, w);
    t.data = v;
    return t;
}

}  // namespace

CmaModel::CmaModel(const ArchConfig& arch, uint64_t seed) : arch_(arch) {
    enc_sizes_ = arch.feature_sizes();
    std::mt19937_64 rng(seed);

    const int L = static_cast<int>(arch.layers.size());
    int in_ch = arch.in_channels;
    for (int l = 0; l < L; ++l) {
        const auto& ls = arch.layers[l];
        Conv2d conv(in_ch, arch.channels[l], ls.kernel, ls.stride, 1);
        glorot_fill(conv.W, conv.W.cols(), static_cast<Eigen::Index>(conv.out_ch) * ls.kernel * ls.kernel,
                    rng);
        enc_layers.push_back(std::move(conv));
        in_ch = arch.channels[l];
    }
    const int bott = enc_sizes_.back();
    const Eigen::Index flat_dim = static_cast<Eigen::Index>(arch.channels.back()) * bott * bott;
    enc_fc = Dense(static_cast<int>(flat_dim), arch.latent_dim);
    glorot_fill(enc_fc.W, flat_dim, arch.latent_dim, rng);
    dec_fc = Dense(arch.latent_dim, static_cast<int>(flat_dim));
    glorot_fill(dec_fc.W, arch.latent_dim, flat_dim, rng);

    // decoder mirrors the encoder schedule
    std::vector<int> dch;
    for (int l = L - 1; l >= 1; --l) dch.push_back(arch.channels[l - 1]);
    dch.push_back(arch.in_channels);
    in_ch = arch.channels.back();
    for (int l = 0; l < L; ++l) {
        const auto& ls = arch.layers[L - 1 - l];
        ConvT2d tconv(in_ch, dch[l], ls.kernel, ls.stride, 1);
        glorot_fill(tconv.W, static_cast<Eigen::Index>(tconv.in_ch) * ls.kernel * ls.kernel,
                    static_cast<Eigen::Index>(tconv.out_ch) * ls.kernel * ls.kernel, rng);
        dec_layers.push_back(std::move(tconv));
        in_ch = dch[l];
    }

    memory = MatrixXd(arch.memory_items, arch.latent_dim);
    std::uniform_real_distribution<double> mdist(-1.0, 1.0);
    for (Eigen::Index i = 0; i < memory.rows(); ++i) {
        for (Eigen::Index j = 0; j < memory.cols(); ++j) memory(i, j) = mdist(rng);
        memory.row(i).normalize();
    }
    memory_grad = MatrixXd::Zero(memory.rows(), memory.cols());

    gates = GateParams::zeros(arch.latent_dim);
    glorot_fill(gates.W_f, 2 * arch.latent_dim, arch.latent_dim, rng);
    glorot_fill(gates.W_i, 2 * arch.latent_dim, arch.latent_dim, rng);
    glorot_fill(gates.W_c, 2 * arch.latent_dim, arch.latent_dim, rng);
    glorot_fill(gates.W_cat, 2 * arch.latent_dim, arch.latent_dim, rng);
    gate_grads = GateGrads::zeros(arch.latent_dim);
}

FeaturePyramid CmaModel::encode(const Tensor& patch) const {
    patch.require_shape(arch_.in_channels, arch_.patch_size, arch_.patch_size, "encode");
    FeaturePyramid fp;
    Tensor x = patch;
    for (const auto& layer : enc_layers) {
        Tensor y = layer.forward(x);
        leaky_relu(y, arch_.leaky_slope);
        fp.maps.push_back(y);
        x = std::move(y);
    }
    fp.latent = enc_fc.forward(flatten(x));
    return fp;
}

Tensor CmaModel::decode(const VectorXd& code) const {
    if (code.size() != arch_.latent_dim) throw DimensionError("decode: wrong code length");
    const int bott = enc_sizes_.back();
    VectorXd flat = dec_fc.forward(code);
    flat = flat.cwiseMax(0.0);
    Tensor x = unflatten(flat, arch_.channels.back(), bott, bott);
    for (size_t l = 0; l < dec_layers.size(); ++l) {
        Tensor y = dec_layers[l].forward(x);
        if (l + 1 < dec_layers.size())
            relu(y);
        else
            sigmoid(y);
        x = std::move(y);
    }
    return x;
}

CmamResult CmaModel::cmam(const VectorXd& z) const {
    MamCache mc = mam_forward(z, memory, arch_.shrink_eps, arch_.renorm);
    CmamResult r;
    r.attn = mc.attn;
    switch (arch_.mode) {
        case CmamMode::Mam: r.code = mc.z_mem; break;
        case CmamMode::Cat: r.code = cat_forward(z, mc.z_mem, gates).out; break;
        case CmamMode::Cmam: r.code = frm(z, mc.z_mem, gates, arch_.frm_update); break;
    }
    return r;
}

Tensor CmaModel::forward_patch(const Tensor& patch) const {
    return decode(cmam(encode(patch).latent).code);
}

Image CmaModel::reconstruct_image(const Image& image, int tile_stride) const {
    const int P = arch_.patch_size;
    if (image.c != arch_.in_channels) throw DimensionError("reconstruct_image: channel mismatch");
    const int stride = tile_stride > 0 ? tile_stride : P;
    if (image.h < P || image.w < P || (image.h - P) % stride != 0 || (image.w - P) % stride != 0)
        throw DataError("reconstruct_image: dimensions require resize (not tileable by patch size)");

    Image out(image.h, image.w, image.c);
    std::vector<double> weight(static_cast<size_t>(image.h) * image.w, 0.0);
    for (int y0 = 0; y0 + P <= image.h; y0 += stride)
        for (int x0 = 0; x0 + P <= image.w; x0 += stride) {
            Tensor patch = image_to_tensor(crop(image, y0, x0, P, P));
            Image rec = tensor_to_image(forward_patch(patch));
            for (int y = 0; y < P; ++y)
                for (int x = 0; x < P; ++x) {
                    for (int k = 0; k < image.c; ++k) out.at(y0 + y, x0 + x, k) += rec.at(y, x, k);
                    if (image.c > 0) weight[static_cast<size_t>(y0 + y) * image.w + (x0 + x)] += 1.0;
                }
        }
    for (int y = 0; y < image.h; ++y)
        for (int x = 0; x < image.w; ++x) {
            const double wt = weight[static_cast<size_t>(y) * image.w + x];
            for (int k = 0; k < image.c; ++k) out.at(y, x, k) /= wt;
        }
    return clamp01(std::move(out));
}

std::vector<Tensor> CmaModel::conv_features(const Image& image) const {
    if (image.c != arch_.in_channels) throw DimensionError("conv_features: channel mismatch");
    std::vector<Tensor> maps;
    Tensor x = image_to_tensor(image);
    for (const auto& layer : enc_layers) {
        Tensor y = layer.forward(x);
        leaky_relu(y, arch_.leaky_slope);
        maps.push_back(y);
        x = maps.back();
    }
    return maps;
}

void CmaModel::forward_train(const Tensor& patch, PatchCache& c) const {
    patch.require_shape(arch_.in_channels, arch_.patch_size, arch_.patch_size, "forward_train");
    c.input = patch;
    c.enc_pre.clear();
    c.enc_post.clear();
    Tensor x = patch;
    for (const auto& layer : enc_layers) {
        Tensor pre = layer.forward(x);
        c.enc_pre.push_back(pre);
        leaky_relu(pre, arch_.leaky_slope);
        c.enc_post.push_back(pre);
        x = c.enc_post.back();
    }
    c.flat = flatten(c.enc_post.back());
    c.z = enc_fc.forward(c.flat);

    c.mam = mam_forward(c.z, memory, arch_.shrink_eps, arch_.renorm);
    switch (arch_.mode) {
        case CmamMode::Mam: c.code = c.mam.z_mem; break;
        case CmamMode::Cat:
            c.frm = cat_forward(c.z, c.mam.z_mem, gates);
            c.code = c.frm.out;
            break;
        case CmamMode::Cmam:
            c.frm = frm_forward(c.z, c.mam.z_mem, gates, arch_.frm_update);
            c.code = c.frm.out;
            break;
    }

    const int bott = enc_sizes_.back();
    c.dec_fc_pre = dec_fc.forward(c.code);
    c.dec_fc_post = c.dec_fc_pre.cwiseMax(0.0);
    c.dec_pre.clear();
    c.dec_post.clear();
    Tensor d = unflatten(c.dec_fc_post, arch_.channels.back(), bott, bott);
    for (size_t l = 0; l < dec_layers.size(); ++l) {
        Tensor pre = dec_layers[l].forward(l == 0 ? d : c.dec_post.back());
        c.dec_pre.push_back(pre);
        if (l + 1 < dec_layers.size())
            relu(pre);
        else
            sigmoid(pre);
        c.dec_post.push_back(pre);
    }
}

void CmaModel::backward(const PatchCache& c, const Tensor& d_recon, const VectorXd& d_shrunk) {
    const int L = static_cast<int>(dec_layers.size());
    const int bott = enc_sizes_.back();

    Tensor g = d_recon;
    sigmoid_backward(c.dec_post.back(), g);
    for (int l = L - 1; l >= 0; --l) {
        const Tensor& input = l == 0 ? unflatten(c.dec_fc_post, arch_.channels.back(), bott, bott)
                                     : c.dec_post[l - 1];
        Tensor dx = dec_layers[l].backward(input, g);
        if (l > 0) relu_backward(c.dec_pre[l - 1], dx);
        g = std::move(dx);
    }
    VectorXd d_flat = flatten(g);
    for (Eigen::Index i = 0; i < d_flat.size(); ++i)
        if (c.dec_fc_pre[i] < 0) d_flat[i] = 0;
    VectorXd d_code = dec_fc.backward(c.code, d_flat);

    VectorXd d_z = VectorXd::Zero(arch_.latent_dim);
    VectorXd d_zmem = VectorXd::Zero(arch_.latent_dim);
    switch (arch_.mode) {
        case CmamMode::Mam: d_zmem = d_code; break;
        case CmamMode::Cat: cat_backward(c.frm, gates, d_code, gate_grads, d_z, d_zmem); break;
        case CmamMode::Cmam:
            frm_backward(c.frm, gates, arch_.frm_update, d_code, gate_grads, d_z, d_zmem);
            break;
    }
    const VectorXd extra = d_shrunk.size() == memory.rows()
                               ? d_shrunk
                               : VectorXd(VectorXd::Zero(memory.rows()));
    d_z += mam_backward(c.mam, memory, d_zmem, extra, memory_grad);

    VectorXd d_flat_enc = enc_fc.backward(c.flat, d_z);
    Tensor ge = unflatten(d_flat_enc, arch_.channels.back(), bott, bott);
    for (int l = static_cast<int>(enc_layers.size()) - 1; l >= 0; --l) {
        leaky_relu_backward(c.enc_pre[l], ge, arch_.leaky_slope);
        const Tensor& input = l == 0 ? c.input : c.enc_post[l - 1];
        ge = enc_layers[l].backward(input, ge);
    }
}

void CmaModel::zero_grads() {
    for (auto& l : enc_layers) l.zero_grad();
    for (auto& l : dec_layers) l.zero_grad();
    enc_fc.zero_grad();
    dec_fc.zero_grad();
    memory_grad.setZero();
    gate_grads = GateGrads::zeros(arch_.latent_dim);
}

namespace {
void add_ref(std::vector<ParamRef>& out, const std::string& name, MatrixXd& m, bool mem = false) {
    out.push_back({name, m.data(), m.size(), mem});
}
void add_ref(std::vector<ParamRef>& out, const std::string& name, VectorXd& v, bool mem = false) {
    out.push_back({name, v.data(), v.size(), mem});
}
}  // namespace

std::vector<ParamRef> CmaModel::params() {
    std::vector<ParamRef> out;
    for (size_t l = 0; l < enc_layers.size(); ++l) {
        add_ref(out, "enc" + std::to_string(l) + ".W", enc_layers[l].W);
        add_ref(out, "enc" + std::to_string(l) + ".b", enc_layers[l].b);
    }
    add_ref(out, "enc_fc.W", enc_fc.W);
    add_ref(out, "enc_fc.b", enc_fc.b);
    add_ref(out, "memory", memory, true);
    add_ref(out, "frm.W_f", gates.W_f);
    add_ref(out, "frm.b_f", gates.b_f);
    add_ref(out, "frm.W_i", gates.W_i);
    add_ref(out, "frm.b_i", gates.b_i);
    add_ref(out, "frm.W_c", gates.W_c);
    add_ref(out, "frm.b_c", gates.b_c);
    add_ref(out, "frm.W_cat", gates.W_cat);
    add_ref(out, "frm.b_cat", gates.b_cat);
    add_ref(out, "dec_fc.W", dec_fc.W);
    add_ref(out, "dec_fc.b", dec_fc.b);
    for (size_t l = 0; l < dec_layers.size(); ++l) {
        add_ref(out, "dec" + std::to_string(l) + ".W", dec_layers[l].W);
        add_ref(out, "dec" + std::to_string(l) + ".b", dec_layers[l].b);
    }
    return out;
}

std::vector<ParamRef> CmaModel::grads() {
    std::vector<ParamRef> out;
    for (size_t l = 0; l < enc_layers.size(); ++l) {
        add_ref(out, "enc" + std::to_string(l) + ".W", enc_layers[l].dW);
        add_ref(out, "enc" + std::to_string(l) + ".b", enc_layers[l].db);
    }
    add_ref(out, "enc_fc.W", enc_fc.dW);
    add_ref(out, "enc_fc.b", enc_fc.db);
    add_ref(out, "memory", memory_grad, true);
    add_ref(out, "frm.W_f", gate_grads.W_f);
    add_ref(out, "frm.b_f", gate_grads.b_f);
    add_ref(out, "frm.W_i", gate_grads.W_i);
    add_ref(out, "frm.b_i", gate_grads.b_i);
    add_ref(out, "frm.W_c", gate_grads.W_c);
    add_ref(out, "frm.b_c", gate_grads.b_c);
    add_ref(out, "frm.W_cat", gate_grads.W_cat);
    add_ref(out, "frm.b_cat", gate_grads.b_cat);
    add_ref(out, "dec_fc.W", dec_fc.dW);
    add_ref(out, "dec_fc.b", dec_fc.db);
    for (size_t l = 0; l < dec_layers.size(); ++l) {
        add_ref(out, "dec" + std::to_string(l) + ".W", dec_layers[l].dW);
        add_ref(out, "dec" + std::to_string(l) + ".b", dec_layers[l].db);
    }
    return out;
}

Eigen::Index CmaModel::param_count() {
    Eigen::Index n = 0;
    for (const auto& p : params()) n += p.size;
    return n;
}

}  // namespace cma
