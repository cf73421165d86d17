#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cma/model/model.hpp"

namespace cma {

// Pixel anomaly score map, same spatial size as the scored image.
struct ScoreMap {
    int h = 0, w = 0;
    Eigen::ArrayXXd scores;  // h x w, non-negative

    double max() const { return scores.maxCoeff(); }
};

// Receptive field side length of one element of feature map `scale` (1-based)
// via RF_l = RF_{l-1} + (k_l - 1) * prod(strides before l).
int receptive_field(const std::vector<LayerSpec>& layers, int scale);

// Squared residual (F - F')^2, bilinear-upsampled per channel to target size,
// then averaged over channels.
Eigen::ArrayXXd scale_residual(const Tensor& f, const Tensor& f_prime, int target_h, int target_w);

struct MsfrOptions {
    std::vector<int> scales = {1, 2, 3};
    bool use_msfr = true;  // false: plain squared pixel gap (ablation)
};

// Receptive-field-area-weighted fusion of per-scale feature residuals between
// an image and its reconstruction, using the model's conv stack as the
// feature extractor.
ScoreMap msfr(const Image& image, const Image& reconstruction, const CmaModel& model,
              const MsfrOptions& opts = {});

// Normalized per-scale fusion weights (RF area / total RF area).
std::vector<double> msfr_scale_weights(const std::vector<LayerSpec>& layers,
                                       const std::vector<int>& scales);

// 16-bit PNG export (min-max normalized); normalization constants written to
// a sidecar text file next to the PNG.
void save_score_map(const ScoreMap& map, const std::string& png_path);

}  // namespace cma
