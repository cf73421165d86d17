#pragma once

#include <Eigen/Dense>

#include "cma/model/arch.hpp"

namespace cma {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Forget/input gate parameters. Each W maps the concatenation [z, z_mem]
// (length 2C) to C. W_cat/b_cat back the "Cat" ablation (plain linear merge).
struct GateParams {
    MatrixXd W_f, W_i, W_c;
    VectorXd b_f, b_i, b_c;
    MatrixXd W_cat;
    VectorXd b_cat;

    static GateParams zeros(int latent_dim);
};

struct GateGrads {
    MatrixXd W_f, W_i, W_c;
    VectorXd b_f, b_i, b_c;
    MatrixXd W_cat;
    VectorXd b_cat;

    static GateGrads zeros(int latent_dim);
};

struct FrmCache {
    VectorXd u;        // [z, z_mem]
    VectorXd f, i, g;  // gate activations (g = candidate, tanh)
    VectorXd out;
};

// Forget-and-input update: f = sigmoid(W_f u + b_f), i = sigmoid(W_i u + b_i),
// g = tanh(W_c u + b_c); out = f.*z_mem + i.*g (Forgotten) or z_mem + i.*g (Raw).
VectorXd frm(const VectorXd& z, const VectorXd& z_mem, const GateParams& p,
             FrmUpdate update = FrmUpdate::Forgotten);

FrmCache frm_forward(const VectorXd& z, const VectorXd& z_mem, const GateParams& p, FrmUpdate update);

// Returns (d_z, d_zmem) and accumulates gate gradients.
void frm_backward(const FrmCache& c, const GateParams& p, FrmUpdate update, const VectorXd& d_out,
                  GateGrads& grads, VectorXd& d_z, VectorXd& d_zmem);

// "Cat" ablation: out = W_cat [z, z_mem] + b_cat.
FrmCache cat_forward(const VectorXd& z, const VectorXd& z_mem, const GateParams& p);
void cat_backward(const FrmCache& c, const GateParams& p, const VectorXd& d_out, GateGrads& grads,
                  VectorXd& d_z, VectorXd& d_zmem);

}  // namespace cma
