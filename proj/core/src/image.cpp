#include "cma/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "cma/errors.hpp"
#include "cma/fsutil.hpp"

namespace cma {

Image crop(const Image& img, int y0, int x0, int ch, int cw) {
    if (y0 < 0 || x0 < 0 || y0 + ch > img.h || x0 + cw > img.w)
        throw DimensionError("crop out of bounds");
    Image out(ch, cw, img.c);
    for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x)
            for (int k = 0; k < img.c; ++k) out.at(y, x, k) = img.at(y0 + y, x0 + x, k);
    return out;
}

void paste(Image& dst, const Image& src, int y0, int x0) {
    if (src.c != dst.c) throw DimensionError("paste: channel mismatch");
    if (y0 < 0 || x0 < 0 || y0 + src.h > dst.h || x0 + src.w > dst.w)
        throw DimensionError("paste out of bounds");
    for (int y = 0; y < src.h; ++y)
        for (int x = 0; x < src.w; ++x)
            for (int k = 0; k < src.c; ++k) dst.at(y0 + y, x0 + x, k) = src.at(y, x, k);
}

Image resize_bilinear(const Image& img, int oh, int ow) {
    if (img.h == oh && img.w == ow) return img;
    Image out(oh, ow, img.c);
    std::vector<double> splane(static_cast<size_t>(img.h) * img.w);
    std::vector<double> dplane(static_cast<size_t>(oh) * ow);
    for (int k = 0; k < img.c; ++k) {
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x < img.w; ++x) splane[static_cast<size_t>(y) * img.w + x] = img.at(y, x, k);
        bilinear_plane(splane.data(), img.h, img.w, dplane.data(), oh, ow);
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x) out.at(y, x, k) = dplane[static_cast<size_t>(y) * ow + x];
    }
    return out;
}

Image gaussian_blur(const Image& img, double sigma) {
    if (sigma <= 0) return img;
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kern(2 * r + 1);
    double s = 0;
    for (int i = -r; i <= r; ++i) {
        kern[i + r] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        s += kern[i + r];
    }
    for (auto& k : kern) k /= s;

    auto cl = [](int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); };
    Image tmp(img.h, img.w, img.c), out(img.h, img.w, img.c);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int k = 0; k < img.c; ++k) {
                double acc = 0;
                for (int i = -r; i <= r; ++i) acc += kern[i + r] * img.at(y, cl(x + i, img.w), k);
                tmp.at(y, x, k) = acc;
            }
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int k = 0; k < img.c; ++k) {
                double acc = 0;
                for (int i = -r; i <= r; ++i) acc += kern[i + r] * tmp.at(cl(y + i, img.h), x, k);
                out.at(y, x, k) = acc;
            }
    return out;
}

Image clamp01(Image img) {
    for (auto& p : img.v) p = std::clamp(p, 0.0, 1.0);
    return img;
}

Image to_grayscale(const Image& img) {
    if (img.c == 1) return img;
    Image out(img.h, img.w, 1);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) {
            double acc = 0;
            for (int k = 0; k < img.c; ++k) acc += img.at(y, x, k);
            out.at(y, x) = acc / img.c;
        }
    return out;
}

Image with_channels(const Image& img, int channels) {
    if (img.c == channels) return img;
    if (channels == 1) return to_grayscale(img);
    Image gray = to_grayscale(img);
    Image out(img.h, img.w, channels);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int k = 0; k < channels; ++k) out.at(y, x, k) = gray.at(y, x);
    return out;
}

double total_variation(const Image& img) {
    double tv = 0;
    for (int k = 0; k < img.c; ++k) {
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x + 1 < img.w; ++x) tv += std::abs(img.at(y, x + 1, k) - img.at(y, x, k));
        for (int y = 0; y + 1 < img.h; ++y)
            for (int x = 0; x < img.w; ++x) tv += std::abs(img.at(y + 1, x, k) - img.at(y, x, k));
    }
    return tv;
}

Tensor image_to_tensor(const Image& img) {
    Tensor t(img.c, img.h, img.w);
    for (int k = 0; k < img.c; ++k)
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x < img.w; ++x) t.at(k, y, x) = img.at(y, x, k);
    return t;
}

Image tensor_to_image(const Tensor& t) {
    Image img(t.h, t.w, t.c);
    for (int k = 0; k < t.c; ++k)
        for (int y = 0; y < t.h; ++y)
            for (int x = 0; x < t.w; ++x) img.at(y, x, k) = t.at(k, y, x);
    return img;
}

Image load_image(const std::string& path) {
    cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (m.empty()) throw DataError("cannot read image: " + path);
    if (m.depth() != CV_8U) {
        cv::Mat tmp;
        double scale = m.depth() == CV_16U ? 1.0 / 257.0 : 255.0;
        m.convertTo(tmp, CV_8U, m.depth() == CV_16U ? 1.0 / 257.0 : scale);
        m = tmp;
    }
    Image out(m.rows, m.cols, m.channels());
    for (int y = 0; y < m.rows; ++y)
        for (int x = 0; x < m.cols; ++x) {
            const uchar* px = m.ptr<uchar>(y) + static_cast<size_t>(x) * m.channels();
            // OpenCV stores BGR; flip to RGB channel order.
            for (int k = 0; k < m.channels(); ++k)
                out.at(y, x, k) = px[m.channels() >= 3 && k < 3 ? 2 - k : k] / 255.0;
        }
    return out;
}

void save_image(const Image& img, const std::string& path) {
    cv::Mat m(img.h, img.w, CV_8UC(img.c));
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) {
            uchar* px = m.ptr<uchar>(y) + static_cast<size_t>(x) * img.c;
            for (int k = 0; k < img.c; ++k) {
                double v = std::clamp(img.at(y, x, img.c >= 3 && k < 3 ? 2 - k : k), 0.0, 1.0);
                px[k] = static_cast<uchar>(std::lround(v * 255.0));
            }
        }
    atomic_file_write(path, [&](const std::string& tmp) {
        if (!cv::imwrite(tmp, m)) throw DataError("cannot write image: " + path);
    });
}

void save_image16(const std::vector<double>& plane, int h, int w, const std::string& path) {
    if (static_cast<size_t>(h) * w != plane.size()) throw DimensionError("save_image16: size mismatch");
    cv::Mat m(h, w, CV_16UC1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v = std::clamp(plane[static_cast<size_t>(y) * w + x], 0.0, 1.0);
            m.at<uint16_t>(y, x) = static_cast<uint16_t>(std::lround(v * 65535.0));
        }
    atomic_file_write(path, [&](const std::string& tmp) {
        if (!cv::imwrite(tmp, m)) throw DataError("cannot write image: " + path);
    });
}

}  // namespace cma
