#pragma once

#include <string>
#include <vector>

#include "cma/errors.hpp"

namespace cma {

struct LayerSpec {
    int kernel = 4;
    int stride = 2;
};

enum class Renorm { L1, L2 };
enum class FrmUpdate { Forgotten, Raw };
enum class CmamMode { Cmam, Mam, Cat };

// Architecture of the patch autoencoder. The decoder mirrors the encoder
// schedule; all conv layers use padding 1 (valid for the 3x3 and 4x4 kernels
// used here).
struct ArchConfig {
    int in_channels = 1;
    int patch_size = 64;
    std::vector<LayerSpec> layers = {{4, 2}, {3, 1}, {4, 2}, {4, 2}, {4, 2}, {4, 2}};
    std::vector<int> channels = {32, 32, 64, 128, 256, 256};
    int latent_dim = 256;   // C
    int memory_items = 100; // N
    double shrink_eps = 1e-12;
    double leaky_slope = 0.2;
    Renorm renorm = Renorm::L1;
    FrmUpdate frm_update = FrmUpdate::Forgotten;
    CmamMode mode = CmamMode::Cmam;

    // Spatial size after each encoder layer. Throws ConfigError when the
    // patch size is not reducible by the stride schedule.
    std::vector<int> feature_sizes() const {
        if (channels.size() != layers.size())
            throw ConfigError("arch: channels and layers length mismatch");
        if (layers.empty()) throw ConfigError("arch: empty layer schedule");
        if (memory_items < 2) throw ConfigError("arch: memory_items must be >= 2");
        if (latent_dim < 1) throw ConfigError("arch: latent_dim must be >= 1");
        std::vector<int> sizes;
        int s = patch_size;
        for (const auto& l : layers) {
            if (l.kernel != 3 && l.kernel != 4)
                throw ConfigError("arch: only 3x3 and 4x4 kernels supported");
            if ((l.kernel == 3 && l.stride != 1) || (l.kernel == 4 && l.stride != 2))
                throw ConfigError("arch: supported layers are (k=4,s=2) and (k=3,s=1)");
            if (l.kernel == 4) {
                if (s % 2 != 0)
                    throw ConfigError("arch: patch size " + std::to_string(patch_size) +
                                      " not reducible by the stride schedule");
                s /= 2;
            }
            if (s < 1) throw ConfigError("arch: feature map collapsed below 1x1");
            sizes.push_back(s);
        }
        return sizes;
    }

    int bottleneck_size() const { return feature_sizes().back(); }
};

}  // namespace cma
