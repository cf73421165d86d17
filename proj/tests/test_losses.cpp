#include <doctest.h>

#include <cmath>

#include "cma/errors.hpp"
#include "cma/train/losses.hpp"
#include "cma/train/trainer.hpp"

using Eigen::VectorXd;

TEST_CASE("sparsity loss of a uniform pair is ln 2") {
    VectorXd w(2);
    w << 0.5, 0.5;
    CHECK(cma::sparsity_loss({w}) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("sparsity loss vanishes on one-hot weights") {
    VectorXd w(4);
    w << 1, 0, 0, 0;  // 0*log(0) treated as 0
    CHECK(cma::sparsity_loss({w}) == 0.0);
}

TEST_CASE("sparsity loss sums over the batch and rejects negatives") {
    VectorXd a(2), b(2);
    a << 0.5, 0.5;
    b << 1.0, 0.0;
    // additive over k: a one-hot vector contributes nothing
    CHECK(cma::sparsity_loss({a, b}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(cma::sparsity_loss({b, b}) == 0.0);
    VectorXd bad(2);
    bad << 1.5, -0.5;
    CHECK_THROWS_AS(cma::sparsity_loss({bad}), cma::ValidationError);
}

TEST_CASE("sparsity gradient matches -(log w + 1) on positive entries") {
    VectorXd w(3);
    w << 0.2, 0.3, 0.5;
    VectorXd g = cma::sparsity_loss_grad(w);
    for (int i = 0; i < 3; ++i)
        CHECK(g[i] == doctest::Approx(-(std::log(w[i]) + 1.0)).epsilon(1e-12));

    // finite-difference validation of the entropy term
    const double h = 1e-7;
    for (int i = 0; i < 3; ++i) {
        VectorXd wp = w, wm = w;
        wp[i] += h;
        wm[i] -= h;
        double fd = (cma::sparsity_loss({wp}) - cma::sparsity_loss({wm})) / (2 * h);
        CHECK(g[i] == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("reconstruction loss is the mean absolute deviation") {
    cma::Tensor x(1, 2, 2), y(1, 2, 2);
    x.data << 0.1, 0.2, 0.3, 0.4;
    y.data = x.data.array() + 0.1;
    CHECK(cma::reconstruction_loss(x, y) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(cma::reconstruction_loss(x, x) == 0.0);

    // batch form averages per-patch means
    cma::Tensor z(1, 2, 2);
    z.data = x.data.array() + 0.3;
    CHECK(cma::reconstruction_loss({x, x}, {y, z}) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("stage-1 total loss applies the paper weights") {
    cma::TrainConfig cfg;  // w1 = 50, w2 = 0.01
    CHECK(cma::stage1_total_loss(1.0, 1.0, cfg) == doctest::Approx(50.01).epsilon(1e-12));
    CHECK(cma::stage1_total_loss(0.0, 0.0, cfg) == 0.0);
    cfg.w1 = 2.0;
    cfg.w2 = 3.0;
    CHECK(cma::stage1_total_loss(0.5, 0.25, cfg) == doctest::Approx(1.75).epsilon(1e-12));
}
