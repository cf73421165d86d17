#include <doctest.h>

#include <random>

#include "cma/model/layers.hpp"

using cma::Tensor;

namespace {

void randomize(Eigen::MatrixXd& m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = u(rng);
}

void randomize(Eigen::VectorXd& v, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < v.size(); ++i) v[i] = u(rng);
}

Tensor random_tensor(int c, int h, int w, std::mt19937_64& rng) {
    Tensor t(c, h, w);
    randomize(t.data, rng);
    return t;
}

// Direct nested-loop convolution, the oracle for the im2col path.
Tensor naive_conv(const Tensor& x, const cma::Conv2d& conv) {
    int oh = cma::conv_out_size(x.h, conv.kernel, conv.stride, conv.pad);
    int ow = cma::conv_out_size(x.w, conv.kernel, conv.stride, conv.pad);
    Tensor y(conv.out_ch, oh, ow);
    for (int oc = 0; oc < conv.out_ch; ++oc)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox) {
                double acc = conv.b[oc];
                for (int ic = 0; ic < conv.in_ch; ++ic)
                    for (int ky = 0; ky < conv.kernel; ++ky)
                        for (int kx = 0; kx < conv.kernel; ++kx) {
                            int iy = oy * conv.stride + ky - conv.pad;
                            int ix = ox * conv.stride + kx - conv.pad;
                            if (iy < 0 || iy >= x.h || ix < 0 || ix >= x.w) continue;
                            acc += conv.W(oc, (ic * conv.kernel + ky) * conv.kernel + kx) *
                                   x.at(ic, iy, ix);
                        }
                y.at(oc, oy, ox) = acc;
            }
    return y;
}

}  // namespace

TEST_CASE("conv_out_size matches the stride schedule") {
    CHECK(cma::conv_out_size(64, 4, 2, 1) == 32);
    CHECK(cma::conv_out_size(32, 3, 1, 1) == 32);
    CHECK(cma::conv_out_size(32, 4, 2, 1) == 16);
    CHECK(cma::conv_out_size(2, 4, 2, 1) == 1);
}

TEST_CASE("Conv2d forward matches a naive nested-loop convolution") {
    std::mt19937_64 rng(5);
    for (auto [k, s] : {std::pair{4, 2}, std::pair{3, 1}}) {
        cma::Conv2d conv(3, 5, k, s, 1);
        randomize(conv.W, rng);
        randomize(conv.b, rng);
        Tensor x = random_tensor(3, 10, 12, rng);
        Tensor y = conv.forward(x);
        Tensor want = naive_conv(x, conv);
        REQUIRE(y.same_shape(want));
        CHECK((y.data - want.data).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("ConvT2d inverts the conv shape arithmetic") {
    std::mt19937_64 rng(6);
    cma::ConvT2d deconv(5, 3, 4, 2, 1);
    randomize(deconv.W, rng);
    randomize(deconv.b, rng);
    Tensor x = random_tensor(5, 8, 8, rng);
    Tensor y = deconv.forward(x);
    CHECK(y.c == 3);
    CHECK(y.h == 16);
    CHECK(y.w == 16);
}

TEST_CASE("ConvT2d forward is the adjoint of Conv2d forward") {
    // <conv(x), y> == <x, convT(y)> when the two share weights and zero bias.
    std::mt19937_64 rng(8);
    cma::Conv2d conv(2, 3, 4, 2, 1);
    randomize(conv.W, rng);
    conv.b.setZero();
    cma::ConvT2d deconv(3, 2, 4, 2, 1);
    // ConvT stores W as in_ch x (out_ch*k*k); conv as out_ch x (in_ch*k*k).
    for (int oc = 0; oc < 3; ++oc)
        for (int ic = 0; ic < 2; ++ic)
            for (int t = 0; t < 16; ++t) deconv.W(oc, ic * 16 + t) = conv.W(oc, ic * 16 + t);
    deconv.b.setZero();

    Tensor x = random_tensor(2, 8, 8, rng);
    Tensor y = random_tensor(3, 4, 4, rng);
    double lhs = conv.forward(x).data.dot(y.data);
    double rhs = x.data.dot(deconv.forward(y).data);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("Conv2d backward finite-difference check") {
    std::mt19937_64 rng(9);
    cma::Conv2d conv(2, 3, 3, 1, 1);
    randomize(conv.W, rng);
    randomize(conv.b, rng);
    Tensor x = random_tensor(2, 5, 5, rng);
    Tensor y = conv.forward(x);
    Tensor dy = random_tensor(y.c, y.h, y.w, rng);

    conv.zero_grad();
    Tensor dx = conv.backward(x, dy);

    const double h = 1e-6;
    for (int idx = 0; idx < x.data.size(); idx += 3) {
        Tensor xp = x, xm = x;
        xp.data[idx] += h;
        xm.data[idx] -= h;
        double fd = (conv.forward(xp).data.dot(dy.data) - conv.forward(xm).data.dot(dy.data)) / (2 * h);
        CHECK(dx.data[idx] == doctest::Approx(fd).epsilon(1e-5));
    }
    for (int i = 0; i < conv.W.rows(); ++i)
        for (int j = 0; j < conv.W.cols(); j += 4) {
            cma::Conv2d cp = conv, cm = conv;
            cp.W(i, j) += h;
            cm.W(i, j) -= h;
            double fd = (cp.forward(x).data.dot(dy.data) - cm.forward(x).data.dot(dy.data)) / (2 * h);
            CHECK(conv.dW(i, j) == doctest::Approx(fd).epsilon(1e-5));
        }
}

TEST_CASE("ConvT2d backward finite-difference check") {
    std::mt19937_64 rng(10);
    cma::ConvT2d deconv(3, 2, 4, 2, 1);
    randomize(deconv.W, rng);
    randomize(deconv.b, rng);
    Tensor x = random_tensor(3, 4, 4, rng);
    Tensor y = deconv.forward(x);
    Tensor dy = random_tensor(y.c, y.h, y.w, rng);

    deconv.zero_grad();
    Tensor dx = deconv.backward(x, dy);

    const double h = 1e-6;
    for (int idx = 0; idx < x.data.size(); idx += 5) {
        Tensor xp = x, xm = x;
        xp.data[idx] += h;
        xm.data[idx] -= h;
        double fd =
            (deconv.forward(xp).data.dot(dy.data) - deconv.forward(xm).data.dot(dy.data)) / (2 * h);
        CHECK(dx.data[idx] == doctest::Approx(fd).epsilon(1e-5));
    }
    for (int i = 0; i < deconv.W.rows(); ++i)
        for (int j = 0; j < deconv.W.cols(); j += 7) {
            cma::ConvT2d dp = deconv, dm = deconv;
            dp.W(i, j) += h;
            dm.W(i, j) -= h;
            double fd = (dp.forward(x).data.dot(dy.data) - dm.forward(x).data.dot(dy.data)) / (2 * h);
            CHECK(deconv.dW(i, j) == doctest::Approx(fd).epsilon(1e-5));
        }
}

TEST_CASE("Dense backward finite-difference check") {
    std::mt19937_64 rng(11);
    cma::Dense fc(6, 4);
    randomize(fc.W, rng);
    randomize(fc.b, rng);
    Eigen::VectorXd x(6), dy(4);
    randomize(x, rng);
    randomize(dy, rng);

    fc.zero_grad();
    Eigen::VectorXd dx = fc.backward(x, dy);
    const double h = 1e-6;
    for (int j = 0; j < 6; ++j) {
        Eigen::VectorXd xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        double fd = (fc.forward(xp).dot(dy) - fc.forward(xm).dot(dy)) / (2 * h);
        CHECK(dx[j] == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("activation helpers and their backward passes") {
    Tensor t(1, 1, 4);
    t.data << -2.0, -0.5, 0.0, 3.0;

    Tensor lk = t;
    cma::leaky_relu(lk, 0.2);
    CHECK(lk.data[0] == doctest::Approx(-0.4));
    CHECK(lk.data[1] == doctest::Approx(-0.1));
    CHECK(lk.data[2] == 0.0);
    CHECK(lk.data[3] == 3.0);

    Tensor r = t;
    cma::relu(r);
    CHECK(r.data[0] == 0.0);
    CHECK(r.data[3] == 3.0);

    Tensor s = t;
    cma::sigmoid(s);
    CHECK(s.data[2] == doctest::Approx(0.5));
    CHECK(s.data.minCoeff() > 0.0);
    CHECK(s.data.maxCoeff() < 1.0);

    // sigmoid'(x) = s(1-s), checked at x=0
    Tensor g(1, 1, 4);
    g.data.setOnes();
    cma::sigmoid_backward(s, g);
    CHECK(g.data[2] == doctest::Approx(0.25));
}
