#pragma once

#include <Eigen/Dense>

#include "cma/errors.hpp"

namespace cma {

// Dense CHW tensor backed by a flat Eigen vector. Layout: ((c * h) + y) * w + x.
struct Tensor {
    int c = 0, h = 0, w = 0;
    Eigen::VectorXd data;

    Tensor() = default;
    Tensor(int c_, int h_, int w_)
        : c(c_), h(h_), w(w_), data(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c_) * h_ * w_)) {}

    Eigen::Index size() const { return data.size(); }

    double& at(int ch, int y, int x) { return data[(static_cast<Eigen::Index>(ch) * h + y) * w + x]; }
    double at(int ch, int y, int x) const { return data[(static_cast<Eigen::Index>(ch) * h + y) * w + x]; }

    bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }

    void require_shape(int c_, int h_, int w_, const char* what) const {
        if (c != c_ || h != h_ || w != w_)
            throw DimensionError(std::string(what) + ": expected " + std::to_string(c_) + "x" +
                                 std::to_string(h_) + "x" + std::to_string(w_) + ", got " +
                                 std::to_string(c) + "x" + std::to_string(h) + "x" + std::to_string(w));
    }
};

// Bilinear resize of one channel plane, half-pixel sample convention,
// clamped at the border. Used by MSFR upsampling and image resizing.
inline void bilinear_plane(const double* src, int sh, int sw, double* dst, int dh, int dw) {
    const double sy = static_cast<double>(sh) / dh;
    const double sx = static_cast<double>(sw) / dw;
    for (int y = 0; y < dh; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        if (fy < 0) fy = 0;
        if (fy > sh - 1) fy = sh - 1;
        int y0 = static_cast<int>(fy);
        int y1 = y0 + 1 < sh ? y0 + 1 : sh - 1;
        double wy = fy - y0;
        for (int x = 0; x < dw; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            if (fx < 0) fx = 0;
            if (fx > sw - 1) fx = sw - 1;
            int x0 = static_cast<int>(fx);
            int x1 = x0 + 1 < sw ? x0 + 1 : sw - 1;
            double wx = fx - x0;
            double top = src[y0 * sw + x0] * (1 - wx) + src[y0 * sw + x1] * wx;
            double bot = src[y1 * sw + x0] * (1 - wx) + src[y1 * sw + x1] * wx;
            dst[y * dw + x] = top * (1 - wy) + bot * wy;
        }
    }
}

}  // namespace cma
