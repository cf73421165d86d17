#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "cma/tensor.hpp"

namespace cma {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int conv_out_size(int in, int kernel, int stride, int pad);

// im2col: (in_ch*k*k) x (out_h*out_w) patch matrix.
MatrixXd im2col(const Tensor& x, int kernel, int stride, int pad);
// Adjoint of im2col.
Tensor col2im(const MatrixXd& cols, int c, int h, int w, int kernel, int stride, int pad);

class Conv2d {
  public:
    Conv2d() = default;
    Conv2d(int in_ch, int out_ch, int kernel, int stride, int pad);

    Tensor forward(const Tensor& x) const;
    // Accumulates dW/db, returns gradient w.r.t. x.
    Tensor backward(const Tensor& x, const Tensor& dy);

    void zero_grad();

    int in_ch = 0, out_ch = 0, kernel = 0, stride = 0, pad = 0;
    MatrixXd W;   // out_ch x (in_ch*k*k)
    VectorXd b;   // out_ch
    MatrixXd dW;
    VectorXd db;
};

// Transposed convolution; forward is the data-adjoint of a Conv2d with the
// same (kernel, stride, pad).
class ConvT2d {
  public:
    ConvT2d() = default;
    ConvT2d(int in_ch, int out_ch, int kernel, int stride, int pad);

    Tensor forward(const Tensor& x) const;
    Tensor backward(const Tensor& x, const Tensor& dy);

    void zero_grad();

    int in_ch = 0, out_ch = 0, kernel = 0, stride = 0, pad = 0;
    MatrixXd W;   // in_ch x (out_ch*k*k)
    VectorXd b;   // out_ch
    MatrixXd dW;
    VectorXd db;
};

class Dense {
  public:
    Dense() = default;
    Dense(int in_dim, int out_dim);

    VectorXd forward(const VectorXd& x) const;
    VectorXd backward(const VectorXd& x, const VectorXd& dy);

    void zero_grad();

    MatrixXd W;   // out x in
    VectorXd b;
    MatrixXd dW;
    VectorXd db;
};

// Activations (in-place variants operate on tensors/vectors of preactivations).
void leaky_relu(Tensor& t, double slope);
void leaky_relu_backward(const Tensor& pre, Tensor& grad, double slope);
void relu(Tensor& t);
void relu_backward(const Tensor& pre, Tensor& grad);
void sigmoid(Tensor& t);
void sigmoid_backward(const Tensor& post, Tensor& grad);

}  // namespace cma
