#include "cma/model/frm.hpp"

#include <cmath>

#include "cma/errors.hpp"

namespace cma {

namespace {
VectorXd sigmoid_vec(const VectorXd& x) {
    return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}
}  // namespace

GateParams GateParams::zeros(int c) {
    GateParams p;
    p.W_f = MatrixXd::Zero(c, 2 * c);
    p.W_i = MatrixXd::Zero(c, 2 * c);
    p.W_c = MatrixXd::Zero(c, 2 * c);
    p.b_f = VectorXd::Zero(c);
    p.b_i = VectorXd::Zero(c);
    p.b_c = VectorXd::Zero(c);
    p.W_cat = MatrixXd::Zero(c, 2 * c);
    p.b_cat = VectorXd::Zero(c);
    return p;
}

GateGrads GateGrads::zeros(int c) {
    GateGrads g;
    g.W_f = MatrixXd::Zero(c, 2 * c);
    g.W_i = MatrixXd::Zero(c, 2 * c);
    g.W_c = MatrixXd::Zero(c, 2 * c);
    g.b_f = VectorXd::Zero(c);
    g.b_i = VectorXd::Zero(c);
    g.b_c = VectorXd::Zero(c);
    g.W_cat = MatrixXd::Zero(c, 2 * c);
    g.b_cat = VectorXd::Zero(c);
    return g;
}

FrmCache frm_forward(const VectorXd& z, const VectorXd& z_mem, const GateParams& p, FrmUpdate update) {
    if (z.size() != z_mem.size() || 2 * z.size() != p.W_f.cols())
        throw DimensionError("frm: code length mismatch");
    FrmCache c;
    c.u.resize(2 * z.size());
    c.u << z, z_mem;
    c.f = sigmoid_vec(p.W_f * c.u + p.b_f);
    c.i = sigmoid_vec(p.W_i * c.u + p.b_i);
    c.g = (p.W_c * c.u + p.b_c).array().tanh();
    const VectorXd base = update == FrmUpdate::Forgotten
                              ? VectorXd(c.f.array() * z_mem.array())
                              : z_mem;
    c.out = base + VectorXd(c.i.array() * c.g.array());
    return c;
}

VectorXd frm(const VectorXd& z, const VectorXd& z_mem, const GateParams& p, FrmUpdate update) {
    return frm_forward(z, z_mem, p, update).out;
}

void frm_backward(const FrmCache& c, const GateParams& p, FrmUpdate update, const VectorXd& d_out,
                  GateGrads& grads, VectorXd& d_z, VectorXd& d_zmem) {
    const Eigen::Index cdim = d_out.size();
    const VectorXd z_mem = c.u.tail(cdim);

    VectorXd d_f = VectorXd::Zero(cdim);
    d_zmem = VectorXd::Zero(cdim);
    if (update == FrmUpdate::Forgotten) {
        d_f = d_out.array() * z_mem.array();
        d_zmem = d_out.array() * c.f.array();
    } else {
        d_zmem = d_out;
    }
    VectorXd d_i = d_out.array() * c.g.array();
    VectorXd d_g = d_out.array() * c.i.array();

    VectorXd pre_f = d_f.array() * c.f.array() * (1.0 - c.f.array());
    VectorXd pre_i = d_i.array() * c.i.array() * (1.0 - c.i.array());
    VectorXd pre_g = d_g.array() * (1.0 - c.g.array().square());

    grads.W_f += pre_f * c.u.transpose();
    grads.W_i += pre_i * c.u.transpose();
    grads.W_c += pre_g * c.u.transpose();
    grads.b_f += pre_f;
    grads.b_i += pre_i;
    grads.b_c += pre_g;

    VectorXd d_u = p.W_f.transpose() * pre_f + p.W_i.transpose() * pre_i + p.W_c.transpose() * pre_g;
    d_z = d_u.head(cdim);
    d_zmem += d_u.tail(cdim);
}

FrmCache cat_forward(const VectorXd& z, const VectorXd& z_mem, const GateParams& p) {
    if (z.size() != z_mem.size() || 2 * z.size() != p.W_cat.cols())
        throw DimensionError("cat: code length mismatch");
    FrmCache c;
    c.u.resize(2 * z.size());
    c.u << z, z_mem;
    c.out = p.W_cat * c.u + p.b_cat;
    return c;
}

void cat_backward(const FrmCache& c, const GateParams& p, const VectorXd& d_out, GateGrads& grads,
                  VectorXd& d_z, VectorXd& d_zmem) {
    const Eigen::Index cdim = d_out.size();
    grads.W_cat += d_out * c.u.transpose();
    grads.b_cat += d_out;
    VectorXd d_u = p.W_cat.transpose() * d_out;
    d_z = d_u.head(cdim);
    d_zmem = d_u.tail(cdim);
}

}  // namespace cma
