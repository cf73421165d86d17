#include "cma/model/memory.hpp"

#include <cmath>

#include "cma/errors.hpp"

namespace cma {

VectorXd cosine_attention(const VectorXd& z, const MatrixXd& memory) {
    const double zn = z.norm();
    if (zn == 0.0) throw DegenerateInputError("cosine_attention: zero-norm latent code");
    VectorXd sims(memory.rows());
    for (Eigen::Index i = 0; i < memory.rows(); ++i) {
        const double mn = memory.row(i).norm();
        if (mn == 0.0) throw DegenerateInputError("cosine_attention: zero-norm memory row");
        sims[i] = memory.row(i).dot(z) / (zn * mn);
    }
    // numerically safe softmax
    const double mx = sims.maxCoeff();
    VectorXd e = (sims.array() - mx).exp();
    return e / e.sum();
}

AttentionWeights hard_shrink_renormalize(const VectorXd& raw, double eps, Renorm renorm) {
    const Eigen::Index n = raw.size();
    if (n < 2) throw ValidationError("hard_shrink_renormalize: need at least 2 weights");
    const double t = 1.0 / static_cast<double>(n);
    VectorXd pre(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = raw[i] - t;
        pre[i] = std::max(d, 0.0) * raw[i] / (std::abs(d) + eps);
    }
    AttentionWeights out;
    out.raw = raw;
    const double norm = renorm == Renorm::L1 ? pre.sum() : pre.norm();
    if (norm == 0.0) {
        out.shrunk = raw;
        out.fallback = true;
    } else {
        out.shrunk = pre / norm;
    }
    return out;
}

VectorXd memory_read(const VectorXd& shrunk, const MatrixXd& memory) {
    if (shrunk.size() != memory.rows()) throw DimensionError("memory_read: weight/bank size mismatch");
    return memory.transpose() * shrunk;
}

MamCache mam_forward(const VectorXd& z, const MatrixXd& memory, double eps, Renorm renorm) {
    MamCache c;
    c.z = z;
    c.eps = eps;
    c.renorm = renorm;
    c.z_norm = z.norm();
    if (c.z_norm == 0.0) throw DegenerateInputError("mam_forward: zero-norm latent code");
    c.mem_norms.resize(memory.rows());
    c.sims.resize(memory.rows());
    for (Eigen::Index i = 0; i < memory.rows(); ++i) {
        c.mem_norms[i] = memory.row(i).norm();
        if (c.mem_norms[i] == 0.0) throw DegenerateInputError("mam_forward: zero-norm memory row");
        c.sims[i] = memory.row(i).dot(z) / (c.z_norm * c.mem_norms[i]);
    }
    const double mx = c.sims.maxCoeff();
    VectorXd e = (c.sims.array() - mx).exp();
    VectorXd raw = e / e.sum();
    c.attn = hard_shrink_renormalize(raw, eps, renorm);

    const Eigen::Index n = raw.size();
    const double thr = 1.0 / static_cast<double>(n);
    c.pre_shrink.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = raw[i] - thr;
        c.pre_shrink[i] = std::max(d, 0.0) * raw[i] / (std::abs(d) + eps);
    }
    c.z_mem = memory.transpose() * c.attn.shrunk;
    return c;
}

VectorXd mam_backward(const MamCache& c, const MatrixXd& memory, const VectorXd& d_zmem,
                      const VectorXd& d_shrunk_extra, MatrixXd& d_memory) {
    const Eigen::Index n = memory.rows();
    const double thr = 1.0 / static_cast<double>(n);

    // read: z_mem = M^T shrunk
    VectorXd d_shrunk = memory * d_zmem + d_shrunk_extra;
    for (Eigen::Index i = 0; i < n; ++i) d_memory.row(i) += c.attn.shrunk[i] * d_zmem.transpose();

    // shrinkage + renormalization
    VectorXd d_raw = VectorXd::Zero(n);
    if (c.attn.fallback) {
        d_raw = d_shrunk;
    } else {
        const VectorXd& pre = c.pre_shrink;
        VectorXd d_pre(n);
        if (c.renorm == Renorm::L1) {
            const double S = pre.sum();
            const double dot = d_shrunk.dot(c.attn.shrunk);
            d_pre = (d_shrunk.array() - dot).matrix() / S;
        } else {
            const double nn = pre.norm();
            const double dot = pre.dot(d_shrunk);
            d_pre = d_shrunk / nn - pre * (dot / (nn * nn * nn));
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = c.attn.raw[i] - thr;
            if (a <= 0) continue;  // zero subgradient at and below the threshold
            const double de = a + c.eps;
            d_raw[i] = d_pre[i] * (((2.0 * c.attn.raw[i] - thr) * de - a * c.attn.raw[i]) / (de * de));
        }
    }

    // softmax
    const VectorXd& raw = c.attn.raw;
    const double dot = raw.dot(d_raw);
    VectorXd d_sims = raw.array() * (d_raw.array() - dot);

    // cosine similarities
    VectorXd d_z = VectorXd::Zero(c.z.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ds = d_sims[i];
        if (ds == 0.0) continue;
        const double inv = 1.0 / (c.z_norm * c.mem_norms[i]);
        d_z += ds * (memory.row(i).transpose() * inv - c.sims[i] * c.z / (c.z_norm * c.z_norm));
        d_memory.row(i) += ds * (c.z.transpose() * inv -
                                 c.sims[i] * memory.row(i) / (c.mem_norms[i] * c.mem_norms[i]));
    }
    return d_z;
}

}  // namespace cma
