#include "cma/synthesis/texture.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "cma/errors.hpp"

namespace cma {

void TextureSpec::validate() const {
    if (period < 4) throw ValidationError("texture: period must be >= 4");
    if (height < 64 || width < 64) throw ValidationError("texture: size must be >= 64x64");
    if (noise_sigma < 0) throw ValidationError("texture: noise_sigma must be >= 0");
}

TexturePattern texture_pattern_from_string(const std::string& s) {
    if (s == "stripes") return TexturePattern::Stripes;
    if (s == "checker") return TexturePattern::Checker;
    if (s == "perlin") return TexturePattern::PerlinLike;
    throw ValidationError("unknown texture pattern: " + s);
}

namespace {

// Smooth value noise: random lattice values, bilinear interpolation,
// summed over octaves.
Image value_noise(int h, int w, int base_cell, int octaves, Rng& rng) {
    Image out(h, w, 1);
    double amp = 1.0, total = 0.0;
    int cell = base_cell;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int o = 0; o < octaves && cell >= 2; ++o) {
        const int gh = h / cell + 2, gw = w / cell + 2;
        std::vector<double> grid(static_cast<size_t>(gh) * gw);
        for (auto& g : grid) g = u(rng);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double fy = static_cast<double>(y) / cell, fx = static_cast<double>(x) / cell;
                int y0 = static_cast<int>(fy), x0 = static_cast<int>(fx);
                double ty = fy - y0, tx = fx - x0;
                ty = ty * ty * (3 - 2 * ty);
                tx = tx * tx * (3 - 2 * tx);
                auto g = [&](int yy, int xx) { return grid[static_cast<size_t>(yy) * gw + xx]; };
                double v = g(y0, x0) * (1 - ty) * (1 - tx) + g(y0, x0 + 1) * (1 - ty) * tx +
                           g(y0 + 1, x0) * ty * (1 - tx) + g(y0 + 1, x0 + 1) * ty * tx;
                out.at(y, x) += amp * v;
            }
        total += amp;
        amp *= 0.5;
        cell /= 2;
    }
    for (auto& p : out.v) p /= total;
    return out;
}

}  // namespace

Image synth_texture(const TextureSpec& spec, Rng& rng) {
    spec.validate();
    Image img(spec.height, spec.width, 1);
    const double theta = spec.orientation * M_PI / 180.0;
    const double dx = std::cos(theta), dy = std::sin(theta);
    switch (spec.pattern) {
        case TexturePattern::Stripes:
            for (int y = 0; y < spec.height; ++y)
                for (int x = 0; x < spec.width; ++x) {
                    const double t = (x * dx + y * dy) / spec.period;
                    img.at(y, x) = 0.5 + 0.35 * std::sin(2.0 * M_PI * t);
                }
            break;
        case TexturePattern::Checker:
            for (int y = 0; y < spec.height; ++y)
                for (int x = 0; x < spec.width; ++x) {
                    const double a = x * dx + y * dy;
                    const double b = -x * dy + y * dx;
                    const int ca = static_cast<int>(std::floor(a / spec.period));
                    const int cb = static_cast<int>(std::floor(b / spec.period));
                    img.at(y, x) = ((ca + cb) & 1) ? 0.72 : 0.28;
                }
            break;
        case TexturePattern::PerlinLike: {
            Image n = value_noise(spec.height, spec.width, spec.period, 4, rng);
            for (size_t i = 0; i < img.v.size(); ++i) img.v[i] = 0.15 + 0.7 * n.v[i];
            break;
        }
    }
    if (spec.noise_sigma > 0) {
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (auto& p : img.v) p += noise(rng);
    }
    return clamp01(std::move(img));
}

InjectedDefect inject_synthetic_defect(const Image& image, Rng& rng) {
    if (image.h < 64 || image.w < 64) throw ValidationError("inject: image must be >= 64x64");
    std::uniform_int_distribution<int> target_dist(30, 2000);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int target = target_dist(rng);
    const bool scratch = u(rng) < 0.5;

    Image mask(image.h, image.w, 1);
    std::vector<std::pair<int, int>> px;
    std::uniform_int_distribution<int> ydist(4, image.h - 5), xdist(4, image.w - 5);
    int y = ydist(rng), x = xdist(rng);
    double ang = u(rng) * 2.0 * M_PI;
    auto mark = [&](int yy, int xx) {
        yy = std::clamp(yy, 0, image.h - 1);
        xx = std::clamp(xx, 0, image.w - 1);
        if (mask.at(yy, xx) == 0.0) {
            mask.at(yy, xx) = 1.0;
            px.emplace_back(yy, xx);
        }
    };
    while (static_cast<int>(px.size()) < target) {
        if (scratch) {
            // directed walk with occasional turns; thickness 1-2
            if (u(rng) < 0.08) ang += (u(rng) - 0.5) * 1.5;
            y = std::clamp(y + static_cast<int>(std::lround(std::sin(ang))), 1, image.h - 2);
            x = std::clamp(x + static_cast<int>(std::lround(std::cos(ang))), 1, image.w - 2);
            mark(y, x);
            if (u(rng) < 0.5) mark(y + 1, x);
        } else {
            // unbiased random walk grows an irregular blob
            const int dir = static_cast<int>(u(rng) * 4.0);
            y = std::clamp(y + (dir == 0) - (dir == 1), 1, image.h - 2);
            x = std::clamp(x + (dir == 2) - (dir == 3), 1, image.w - 2);
            mark(y, x);
        }
    }

    InjectedDefect out;
    out.image = image;
    if (!scratch && u(rng) < 0.5) {
        // washed-out blob: every pixel shifted toward the texture mean, which
        // erases local structure the way a degenerate (blurred/worn) region does
        const double keep = 0.5 + 0.3 * u(rng);
        for (const auto& [yy, xx] : px)
            for (int k = 0; k < image.c; ++k) {
                double& p = out.image.at(yy, xx, k);
                p = std::clamp(0.5 + keep * (p - 0.5), 0.0, 1.0);
            }
    } else {
        const double shift = (0.04 + 0.06 * u(rng)) * (u(rng) < 0.5 ? -1.0 : 1.0);
        for (const auto& [yy, xx] : px)
            for (int k = 0; k < image.c; ++k) {
                double& p = out.image.at(yy, xx, k);
                p = std::clamp(p + shift, 0.0, 1.0);
            }
    }
    out.mask = std::move(mask);
    return out;
}

NaturalPool NaturalPool::builtin(int count, int size, uint64_t seed) {
    NaturalPool pool;
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < count; ++i) {
        const int kind = i % 4;
        Image img(size, size, 1);
        switch (kind) {
            case 0:  // multi-octave noise
                img = value_noise(size, size, 8 + 8 * (i % 3), 5, rng);
                break;
            case 1: {  // warped stripes
                Image warp = value_noise(size, size, 32, 3, rng);
                const double period = 8.0 + 10.0 * u(rng);
                const double th = u(rng) * M_PI;
                for (int y = 0; y < size; ++y)
                    for (int x = 0; x < size; ++x) {
                        double t = (x * std::cos(th) + y * std::sin(th)) / period + 4.0 * warp.at(y, x);
                        img.at(y, x) = 0.5 + 0.4 * std::sin(2 * M_PI * t);
                    }
                break;
            }
            case 2: {  // soft blobs on a gradient
                const double gx = u(rng) - 0.5, gy = u(rng) - 0.5;
                for (int y = 0; y < size; ++y)
                    for (int x = 0; x < size; ++x)
                        img.at(y, x) = 0.5 + gx * (static_cast<double>(x) / size - 0.5) +
                                       gy * (static_cast<double>(y) / size - 0.5);
                for (int b = 0; b < 40; ++b) {
                    const double cy = u(rng) * size, cx = u(rng) * size;
                    const double r = 4 + 20 * u(rng), amp = (u(rng) - 0.5) * 0.8;
                    const int lo_y = std::max(0, static_cast<int>(cy - 3 * r));
                    const int hi_y = std::min(size - 1, static_cast<int>(cy + 3 * r));
                    const int lo_x = std::max(0, static_cast<int>(cx - 3 * r));
                    const int hi_x = std::min(size - 1, static_cast<int>(cx + 3 * r));
                    for (int y = lo_y; y <= hi_y; ++y)
                        for (int x = lo_x; x <= hi_x; ++x) {
                            const double d2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
                            img.at(y, x) += amp * std::exp(-d2 / (2 * r * r));
                        }
                }
                break;
            }
            default: {  // high-contrast cell pattern
                Image n = value_noise(size, size, 24, 2, rng);
                for (int y = 0; y < size; ++y)
                    for (int x = 0; x < size; ++x) img.at(y, x) = n.at(y, x) > 0.5 ? 0.85 : 0.2;
                break;
            }
        }
        pool.images.push_back(clamp01(std::move(img)));
    }
    return pool;
}

NaturalPool NaturalPool::from_directory(const std::string& dir) {
    namespace fs = std::filesystem;
    NaturalPool pool;
    std::vector<fs::path> paths;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
        try {
            pool.images.push_back(load_image(p.string()));
        } catch (const DataError&) {
            // skip non-image files
        }
    }
    if (pool.images.empty()) throw DataError("natural pool directory has no readable images: " + dir);
    return pool;
}

}  // namespace cma
