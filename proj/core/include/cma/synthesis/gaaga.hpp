#pragma once

#include "cma/image.hpp"
#include "cma/synthesis/texture.hpp"

namespace cma {

// Artificial negative sample: pasted image, the clean pre-paste original, and
// the binary union mask of pasted rectangles.
struct AnomalySample {
    Image anomalous;
    Image clean;
    Image mask;  // single channel, 0/1
};

enum class PasteMode { Both, OneOf };

struct GaagaOptions {
    int crop_size = 256;  // paper-scale patch size; shrink for small images
    PasteMode paste_mode = PasteMode::Both;
    double blur_sigma_min = 2.0;
    double blur_sigma_max = 6.0;
};

// Axis-aligned random crop, location uniform over valid positions.
Image crop_random(const Image& image, int ch, int cw, Rng& rng);

// Resize to out_size x out_size, then Gaussian blur with sigma ~ U[min,max].
Image degrade_patch(const Image& patch, Rng& rng, int out_size = 256, double sigma_min = 2.0,
                    double sigma_max = 6.0);

// Pastes a natural crop and a degraded self-crop onto the positive image
// (natural first, overlap allowed) and returns the sample with the exact
// union mask.
AnomalySample generate(const Image& positive, const NaturalPool& pool, Rng& rng,
                       const GaagaOptions& opts = {});

}  // namespace cma
