#include "cma/model/layers.hpp"

#include <cmath>

#include "cma/errors.hpp"

namespace cma {

int conv_out_size(int in, int kernel, int stride, int pad) {
    return (in + 2 * pad - kernel) / stride + 1;
}

MatrixXd im2col(const Tensor& x, int kernel, int stride, int pad) {
    const int oh = conv_out_size(x.h, kernel, stride, pad);
    const int ow = conv_out_size(x.w, kernel, stride, pad);
    MatrixXd cols(static_cast<Eigen::Index>(x.c) * kernel * kernel, static_cast<Eigen::Index>(oh) * ow);
    cols.setZero();
    for (int ch = 0; ch < x.c; ++ch)
        for (int ky = 0; ky < kernel; ++ky)
            for (int kx = 0; kx < kernel; ++kx) {
                const Eigen::Index row = (static_cast<Eigen::Index>(ch) * kernel + ky) * kernel + kx;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * stride + ky - pad;
                    if (iy < 0 || iy >= x.h) continue;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * stride + kx - pad;
                        if (ix < 0 || ix >= x.w) continue;
                        cols(row, static_cast<Eigen::Index>(oy) * ow + ox) = x.at(ch, iy, ix);
                    }
                }
            }
    return cols;
}

Tensor col2im(const MatrixXd& cols, int c, int h, int w, int kernel, int stride, int pad) {
    const int oh = conv_out_size(h, kernel, stride, pad);
    const int ow = conv_out_size(w, kernel, stride, pad);
    Tensor x(c, h, w);
    for (int ch = 0; ch < c; ++ch)
        for (int ky = 0; ky < kernel; ++ky)
            for (int kx = 0; kx < kernel; ++kx) {
                const Eigen::Index row = (static_cast<Eigen::Index>(ch) * kernel + ky) * kernel + kx;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * stride + ky - pad;
                    if (iy < 0 || iy >= h) continue;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * stride + kx - pad;
                        if (ix < 0 || ix >= w) continue;
                        x.at(ch, iy, ix) += cols(row, static_cast<Eigen::Index>(oy) * ow + ox);
                    }
                }
            }
    return x;
}

Conv2d::Conv2d(int in_ch_, int out_ch_, int kernel_, int stride_, int pad_)
    : in_ch(in_ch_), out_ch(out_ch_), kernel(kernel_), stride(stride_), pad(pad_) {
    W = MatrixXd::Zero(out_ch, static_cast<Eigen::Index>(in_ch) * kernel * kernel);
    b = VectorXd::Zero(out_ch);
    zero_grad();
}

void Conv2d::zero_grad() {
    dW = MatrixXd::Zero(W.rows(), W.cols());
    db = VectorXd::Zero(b.size());
}

Tensor Conv2d::forward(const Tensor& x) const {
    if (x.c != in_ch) throw DimensionError("Conv2d: channel mismatch");
    const int oh = conv_out_size(x.h, kernel, stride, pad);
    const int ow = conv_out_size(x.w, kernel, stride, pad);
    MatrixXd cols = im2col(x, kernel, stride, pad);
    MatrixXd y = W * cols;
    y.colwise() += b;
    Tensor out(out_ch, oh, ow);
    for (int ch = 0; ch < out_ch; ++ch)
        for (Eigen::Index p = 0; p < y.cols(); ++p) out.data[ch * y.cols() + p] = y(ch, p);
    return out;
}

Tensor Conv2d::backward(const Tensor& x, const Tensor& dy) {
    const Eigen::Index npos = static_cast<Eigen::Index>(dy.h) * dy.w;
    MatrixXd dy_mat(out_ch, npos);
    for (int ch = 0; ch < out_ch; ++ch)
        for (Eigen::Index p = 0; p < npos; ++p) dy_mat(ch, p) = dy.data[ch * npos + p];
    MatrixXd cols = im2col(x, kernel, stride, pad);
    dW += dy_mat * cols.transpose();
    db += dy_mat.rowwise().sum();
    MatrixXd dcols = W.transpose() * dy_mat;
    return col2im(dcols, x.c, x.h, x.w, kernel, stride, pad);
}

ConvT2d::ConvT2d(int in_ch_, int out_ch_, int kernel_, int stride_, int pad_)
    : in_ch(in_ch_), out_ch(out_ch_), kernel(kernel_), stride(stride_), pad(pad_) {
    W = MatrixXd::Zero(in_ch, static_cast<Eigen::Index>(out_ch) * kernel * kernel);
    b = VectorXd::Zero(out_ch);
    zero_grad();
}

void ConvT2d::zero_grad() {
    dW = MatrixXd::Zero(W.rows(), W.cols());
    db = VectorXd::Zero(b.size());
}

Tensor ConvT2d::forward(const Tensor& x) const {
    if (x.c != in_ch) throw DimensionError("ConvT2d: channel mismatch");
    const int oh = (x.h - 1) * stride - 2 * pad + kernel;
    const int ow = (x.w - 1) * stride - 2 * pad + kernel;
    const Eigen::Index npos = static_cast<Eigen::Index>(x.h) * x.w;
    MatrixXd x_mat(in_ch, npos);
    for (int ch = 0; ch < in_ch; ++ch)
        for (Eigen::Index p = 0; p < npos; ++p) x_mat(ch, p) = x.data[ch * npos + p];
    MatrixXd cols = W.transpose() * x_mat;
    Tensor out = col2im(cols, out_ch, oh, ow, kernel, stride, pad);
    const Eigen::Index opos = static_cast<Eigen::Index>(oh) * ow;
    for (int ch = 0; ch < out_ch; ++ch) out.data.segment(ch * opos, opos).array() += b[ch];
    return out;
}

Tensor ConvT2d::backward(const Tensor& x, const Tensor& dy) {
    const Eigen::Index npos = static_cast<Eigen::Index>(x.h) * x.w;
    MatrixXd x_mat(in_ch, npos);
    for (int ch = 0; ch < in_ch; ++ch)
        for (Eigen::Index p = 0; p < npos; ++p) x_mat(ch, p) = x.data[ch * npos + p];
    MatrixXd dcols = im2col(dy, kernel, stride, pad);
    dW += x_mat * dcols.transpose();
    const Eigen::Index opos = static_cast<Eigen::Index>(dy.h) * dy.w;
    for (int ch = 0; ch < out_ch; ++ch) db[ch] += dy.data.segment(ch * opos, opos).sum();
    MatrixXd dx_mat = W * dcols;
    Tensor dx(x.c, x.h, x.w);
    for (int ch = 0; ch < in_ch; ++ch)
        for (Eigen::Index p = 0; p < npos; ++p) dx.data[ch * npos + p] = dx_mat(ch, p);
    return dx;
}

Dense::Dense(int in_dim, int out_dim) {
    W = MatrixXd::Zero(out_dim, in_dim);
    b = VectorXd::Zero(out_dim);
    zero_grad();
}

void Dense::zero_grad() {
    dW = MatrixXd::Zero(W.rows(), W.cols());
    db = VectorXd::Zero(b.size());
}

VectorXd Dense::forward(const VectorXd& x) const {
    if (x.size() != W.cols()) throw DimensionError("Dense: input size mismatch");
    return W * x + b;
}

VectorXd Dense::backward(const VectorXd& x, const VectorXd& dy) {
    dW += dy * x.transpose();
    db += dy;
    return W.transpose() * dy;
}

void leaky_relu(Tensor& t, double slope) {
    for (Eigen::Index i = 0; i < t.data.size(); ++i)
        if (t.data[i] < 0) t.data[i] *= slope;
}

void leaky_relu_backward(const Tensor& pre, Tensor& grad, double slope) {
    for (Eigen::Index i = 0; i < grad.data.size(); ++i)
        if (pre.data[i] < 0) grad.data[i] *= slope;
}

void relu(Tensor& t) {
    for (Eigen::Index i = 0; i < t.data.size(); ++i)
        if (t.data[i] < 0) t.data[i] = 0;
}

void relu_backward(const Tensor& pre, Tensor& grad) {
    for (Eigen::Index i = 0; i < grad.data.size(); ++i)
        if (pre.data[i] < 0) grad.data[i] = 0;
}

void sigmoid(Tensor& t) {
    for (Eigen::Index i = 0; i < t.data.size(); ++i) t.data[i] = 1.0 / (1.0 + std::exp(-t.data[i]));
}

void sigmoid_backward(const Tensor& post, Tensor& grad) {
    for (Eigen::Index i = 0; i < grad.data.size(); ++i)
        grad.data[i] *= post.data[i] * (1.0 - post.data[i]);
}

}  // namespace cma
