#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cma/image.hpp"

namespace cma {

using Rng = std::mt19937_64;

enum class TexturePattern { Stripes, Checker, PerlinLike };

struct TextureSpec {
    TexturePattern pattern = TexturePattern::Stripes;
    int period = 16;            // pixels, >= 4
    double orientation = 0.0;   // degrees
    double noise_sigma = 0.02;  // grayscale units
    int height = 256;
    int width = 256;

    void validate() const;
};

TexturePattern texture_pattern_from_string(const std::string& s);

// Deterministic-from-seed periodic texture with additive Gaussian noise.
Image synth_texture(const TextureSpec& spec, Rng& rng);

// Inserts one irregular blob (random-walk) or scratch (random polyline) of
// 30..2000 pixels with an intensity shift. Returns the modified image and the
// ground-truth mask (single channel, 0/1).
struct InjectedDefect {
    Image image;
    Image mask;
};
InjectedDefect inject_synthetic_defect(const Image& image, Rng& rng);

// Procedurally generated stand-in for a pool of natural texture photographs.
struct NaturalPool {
    std::vector<Image> images;

    static NaturalPool builtin(int count = 24, int size = 320, uint64_t seed = 0x6e617475UL);
    static NaturalPool from_directory(const std::string& dir);
};

}  // namespace cma
