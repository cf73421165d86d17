#include "cma/train/losses.hpp"

#include <cmath>

#include "cma/errors.hpp"
#include "cma/train/trainer.hpp"

namespace cma {

double sparsity_loss(const std::vector<Eigen::VectorXd>& weights) {
    double total = 0.0;
    for (const auto& w : weights) {
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            if (w[i] < 0) throw ValidationError("sparsity_loss: negative weight entry");
            if (w[i] > 0) total -= w[i] * std::log(w[i]);
        }
    }
    return total;
}

Eigen::VectorXd sparsity_loss_grad(const Eigen::VectorXd& w) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w[i] > 0) g[i] = -(std::log(w[i]) + 1.0);
    return g;
}

double reconstruction_loss(const Tensor& x, const Tensor& y) {
    if (!x.same_shape(y)) throw DimensionError("reconstruction_loss: shape mismatch");
    return (x.data - y.data).cwiseAbs().mean();
}

double reconstruction_loss(const std::vector<Tensor>& x, const std::vector<Tensor>& y) {
    if (x.size() != y.size() || x.empty())
        throw DimensionError("reconstruction_loss: batch size mismatch or empty batch");
    double total = 0.0;
    for (size_t i = 0; i < x.size(); ++i) total += reconstruction_loss(x[i], y[i]);
    return total / static_cast<double>(x.size());
}

double stage1_total_loss(double rec, double sparse, const TrainConfig& cfg) {
    return cfg.w1 * rec + cfg.w2 * sparse;
}

}  // namespace cma
