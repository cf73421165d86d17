#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cma/tensor.hpp"

namespace cma {

// Entropy of the shrunk attention weights, summed over patches and items,
// with the 0*log(0) = 0 convention. Throws ValidationError on negative entries.
double sparsity_loss(const std::vector<Eigen::VectorXd>& weights);

// Gradient of -sum w*log(w) w.r.t. one weight vector (zero at zero entries).
Eigen::VectorXd sparsity_loss_grad(const Eigen::VectorXd& w);

// Mean absolute difference over all pixels and batch entries.
double reconstruction_loss(const std::vector<Tensor>& x, const std::vector<Tensor>& y);
double reconstruction_loss(const Tensor& x, const Tensor& y);

struct TrainConfig;
double stage1_total_loss(double rec, double sparse, const TrainConfig& cfg);

}  // namespace cma
