#include "cma/seg/msfr.hpp"

#include <cmath>
#include <sstream>

#include "cma/errors.hpp"
#include "cma/fsutil.hpp"

namespace cma {

int receptive_field(const std::vector<LayerSpec>& layers, int scale) {
    if (scale < 1 || scale > static_cast<int>(layers.size()))
        throw ValidationError("receptive_field: scale out of range");
    int rf = 1;
    int jump = 1;  // product of strides of preceding layers
    for (int l = 0; l < scale; ++l) {
        rf += (layers[l].kernel - 1) * jump;
        jump *= layers[l].stride;
    }
    return rf;
}

Eigen::ArrayXXd scale_residual(const Tensor& f, const Tensor& f_prime, int target_h, int target_w) {
    if (!f.same_shape(f_prime)) throw DimensionError("scale_residual: shape mismatch");
    Eigen::ArrayXXd acc = Eigen::ArrayXXd::Zero(target_h, target_w);
    std::vector<double> up(static_cast<size_t>(target_h) * target_w);
    std::vector<double> sq(static_cast<size_t>(f.h) * f.w);
    // upsample each channel's squared residual, then channel mean
    for (int ch = 0; ch < f.c; ++ch) {
        const Eigen::Index base = static_cast<Eigen::Index>(ch) * f.h * f.w;
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(sq.size()); ++i) {
            const double d = f.data[base + i] - f_prime.data[base + i];
            sq[i] = d * d;
        }
        bilinear_plane(sq.data(), f.h, f.w, up.data(), target_h, target_w);
        for (int y = 0; y < target_h; ++y)
            for (int x = 0; x < target_w; ++x) acc(y, x) += up[static_cast<size_t>(y) * target_w + x];
    }
    return acc / static_cast<double>(f.c);
}

std::vector<double> msfr_scale_weights(const std::vector<LayerSpec>& layers,
                                       const std::vector<int>& scales) {
    std::vector<double> w;
    double total = 0;
    for (int s : scales) {
        const double rf = receptive_field(layers, s);
        w.push_back(rf * rf);
        total += rf * rf;
    }
    for (auto& x : w) x /= total;
    return w;
}

ScoreMap msfr(const Image& image, const Image& reconstruction, const CmaModel& model,
              const MsfrOptions& opts) {
    if (!image.same_shape(reconstruction)) throw DimensionError("msfr: image/reconstruction mismatch");
    ScoreMap map;
    map.h = image.h;
    map.w = image.w;
    map.scores = Eigen::ArrayXXd::Zero(image.h, image.w);

    if (!opts.use_msfr) {
        // ablation: squared pixel gap, channel mean
        for (int y = 0; y < image.h; ++y)
            for (int x = 0; x < image.w; ++x) {
                double acc = 0;
                for (int k = 0; k < image.c; ++k) {
                    const double d = image.at(y, x, k) - reconstruction.at(y, x, k);
                    acc += d * d;
                }
                map.scores(y, x) = acc / image.c;
            }
        return map;
    }

    const auto f = model.conv_features(image);
    const auto fp = model.conv_features(reconstruction);
    const auto weights = msfr_scale_weights(model.arch().layers, opts.scales);
    for (size_t i = 0; i < opts.scales.size(); ++i) {
        const int idx = opts.scales[i] - 1;
        map.scores += weights[i] * scale_residual(f[idx], fp[idx], image.h, image.w);
    }
    return map;
}

void save_score_map(const ScoreMap& map, const std::string& png_path) {
    const double lo = map.scores.minCoeff();
    const double hi = map.scores.maxCoeff();
    const double range = hi - lo > 0 ? hi - lo : 1.0;
    std::vector<double> plane(static_cast<size_t>(map.h) * map.w);
    for (int y = 0; y < map.h; ++y)
        for (int x = 0; x < map.w; ++x)
            plane[static_cast<size_t>(y) * map.w + x] = (map.scores(y, x) - lo) / range;
    save_image16(plane, map.h, map.w, png_path);
    std::ostringstream os;
    os << "min " << lo << "\nmax " << hi << "\n";
    atomic_write_text(png_path + ".norm.txt", os.str());
}

}  // namespace cma
