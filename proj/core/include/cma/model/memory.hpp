#pragma once

#include <Eigen/Dense>

#include "cma/model/arch.hpp"

namespace cma {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Raw and hard-shrunk addressing weights for one latent code.
struct AttentionWeights {
    VectorXd raw;     // softmax over cosine similarities, sums to 1
    VectorXd shrunk;  // after hard shrinkage + renormalization
    bool fallback = false;  // true when shrinkage zeroed everything and raw was returned
};

// Softmax over cosine similarities between z and every memory row.
// Throws DegenerateInputError on a zero-norm z or memory row.
VectorXd cosine_attention(const VectorXd& z, const MatrixXd& memory);

// Zeroes weights at or below 1/N, then renormalizes. Falls back to `raw`
// unchanged when every entry shrinks to zero.
AttentionWeights hard_shrink_renormalize(const VectorXd& raw, double eps, Renorm renorm = Renorm::L1);

// Weighted sum of memory rows.
VectorXd memory_read(const VectorXd& shrunk, const MatrixXd& memory);

// Forward cache + backward pass for the full addressing chain
// z -> raw -> shrunk -> z_mem.
struct MamCache {
    VectorXd z;
    VectorXd sims;       // cosine similarities
    double z_norm = 0;
    VectorXd mem_norms;  // per-row norms
    AttentionWeights attn;
    VectorXd pre_shrink; // shrunk weights before renormalization
    VectorXd z_mem;
    double eps = 1e-12;
    Renorm renorm = Renorm::L1;
};

MamCache mam_forward(const VectorXd& z, const MatrixXd& memory, double eps, Renorm renorm);

// Given dL/dz_mem and dL/dshrunk (the latter carries the sparsity-loss
// contribution), accumulates dL/dmemory and returns dL/dz.
VectorXd mam_backward(const MamCache& cache, const MatrixXd& memory, const VectorXd& d_zmem,
                      const VectorXd& d_shrunk_extra, MatrixXd& d_memory);

}  // namespace cma
