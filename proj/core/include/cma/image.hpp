#pragma once

#include <string>
#include <vector>

#include "cma/tensor.hpp"

namespace cma {

// HWC image with values in [0,1].
struct Image {
    int h = 0, w = 0, c = 1;
    std::vector<double> v;

    Image() = default;
    Image(int h_, int w_, int c_) : h(h_), w(w_), c(c_), v(static_cast<size_t>(h_) * w_ * c_, 0.0) {}

    double& at(int y, int x, int ch = 0) { return v[(static_cast<size_t>(y) * w + x) * c + ch]; }
    double at(int y, int x, int ch = 0) const { return v[(static_cast<size_t>(y) * w + x) * c + ch]; }

    bool same_shape(const Image& o) const { return h == o.h && w == o.w && c == o.c; }
};

Image crop(const Image& img, int y0, int x0, int ch, int cw);
void paste(Image& dst, const Image& src, int y0, int x0);
Image resize_bilinear(const Image& img, int oh, int ow);
// Separable Gaussian, replicate border, kernel radius ceil(3*sigma).
Image gaussian_blur(const Image& img, double sigma);
Image clamp01(Image img);
Image to_grayscale(const Image& img);
Image with_channels(const Image& img, int channels);

double total_variation(const Image& img);

Tensor image_to_tensor(const Image& img);
Image tensor_to_image(const Tensor& t);

// PNG / common-format I/O (8-bit). Throws DataError on failure.
Image load_image(const std::string& path);
void save_image(const Image& img, const std::string& path);
// 16-bit grayscale PNG, used for raw-ish score map export.
void save_image16(const std::vector<double>& plane, int h, int w, const std::string& path);

}  // namespace cma
