#include "cma/synthesis/gaaga.hpp"

#include <algorithm>
#include <cmath>

#include "cma/errors.hpp"

namespace cma {

Image crop_random(const Image& image, int ch, int cw, Rng& rng) {
    if (image.h < ch || image.w < cw)
        throw DimensionError("crop_random: image smaller than requested crop");
    std::uniform_int_distribution<int> ydist(0, image.h - ch), xdist(0, image.w - cw);
    const int y0 = ydist(rng);
    const int x0 = xdist(rng);
    return crop(image, y0, x0, ch, cw);
}

Image degrade_patch(const Image& patch, Rng& rng, int out_size, double sigma_min, double sigma_max) {
    std::uniform_real_distribution<double> sdist(sigma_min, sigma_max);
    Image resized = resize_bilinear(patch, out_size, out_size);
    return clamp01(gaussian_blur(resized, sdist(rng)));
}

AnomalySample generate(const Image& positive, const NaturalPool& pool, Rng& rng,
                       const GaagaOptions& opts) {
    const int s = opts.crop_size;
    const int min_dim = (s * 5 + 3) / 4;  // 256 -> 320, scaled proportionally
    if (positive.h < min_dim || positive.w < min_dim)
        throw DimensionError("generate: positive image too small for crop size " + std::to_string(s));
    if (pool.images.empty()) throw DataError("generate: empty natural pool");

    AnomalySample out;
    out.clean = positive;
    out.anomalous = positive;
    out.mask = Image(positive.h, positive.w, 1);

    std::uniform_real_distribution<double> u(0.0, 1.0);
    const bool paste_natural = opts.paste_mode == PasteMode::Both || u(rng) < 0.5;
    const bool paste_degraded = opts.paste_mode == PasteMode::Both || !paste_natural;

    auto paste_patch = [&](const Image& patch) {
        std::uniform_int_distribution<int> ydist(0, positive.h - patch.h), xdist(0, positive.w - patch.w);
        const int y0 = ydist(rng);
        const int x0 = xdist(rng);
        paste(out.anomalous, with_channels(patch, positive.c), y0, x0);
        for (int y = 0; y < patch.h; ++y)
            for (int x = 0; x < patch.w; ++x) out.mask.at(y0 + y, x0 + x) = 1.0;
    };

    if (paste_natural) {
        std::uniform_int_distribution<size_t> pick(0, pool.images.size() - 1);
        const Image& nat = pool.images[pick(rng)];
        paste_patch(crop_random(nat, s, s, rng));
    }
    if (paste_degraded) {
        // random crop of variable size, resized up/down to the paste size
        std::uniform_int_distribution<int> hdist(std::max(8, s / 2), std::min(positive.h, (3 * s) / 2));
        std::uniform_int_distribution<int> wdist(std::max(8, s / 2), std::min(positive.w, (3 * s) / 2));
        Image selfcrop = crop_random(positive, hdist(rng), wdist(rng), rng);
        paste_patch(degrade_patch(selfcrop, rng, s, opts.blur_sigma_min, opts.blur_sigma_max));
    }
    return out;
}

}  // namespace cma
