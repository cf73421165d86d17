#include "cma/eval/evaluate.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "cma/errors.hpp"

namespace cma {

namespace {

// Nearest-neighbor mask resize keeps labels binary.
Image resize_mask(const Image& mask, int oh, int ow) {
    if (mask.h == oh && mask.w == ow) return mask;
    Image out(oh, ow, 1);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            const int sy = std::min(mask.h - 1, static_cast<int>((y + 0.5) * mask.h / oh));
            const int sx = std::min(mask.w - 1, static_cast<int>((x + 0.5) * mask.w / ow));
            out.at(y, x) = mask.at(sy, sx) >= 0.5 ? 1.0 : 0.0;
        }
    return out;
}

std::vector<std::pair<double, double>> roc_curve(const std::vector<double>& scores,
                                                 const std::vector<uint8_t>& labels) {
    std::vector<size_t> order(scores.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });
    double pos = 0, neg = 0;
    for (auto l : labels) (l ? pos : neg) += 1;
    std::vector<std::pair<double, double>> pts{{0, 0}};
    double tp = 0, fp = 0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        for (size_t k = i; k <= j; ++k) (labels[order[k]] ? tp : fp) += 1;
        pts.emplace_back(fp / neg, tp / pos);
        i = j + 1;
    }
    return pts;
}

}  // namespace

EvalReport evaluate(const CmaModel& model, const std::vector<TestItem>& test_set,
                    const EvalOptions& opts) {
    if (test_set.empty()) throw DataError("evaluate: empty test set");
    EvalReport report;
    std::vector<double> pooled_scores;
    std::vector<uint8_t> pooled_labels;
    double image_auc_sum = 0;
    int image_auc_count = 0;

    for (const auto& item : test_set) {
        if (item.mask.h == 0) throw DataError("evaluate: missing mask for " + item.name);
        Image img = with_channels(item.image, model.arch().in_channels);
        Image mask = item.mask;
        if (opts.eval_size > 0) {
            img = resize_bilinear(img, opts.eval_size, opts.eval_size);
            mask = resize_mask(mask, opts.eval_size, opts.eval_size);
        }
        Image recon = model.reconstruct_image(img, opts.tile_stride);
        ScoreMap map = msfr(img, recon, model, opts.msfr);

        PerImageResult pr;
        pr.name = item.name;
        pr.image_score = map.max();

        std::vector<double> s;
        std::vector<uint8_t> l;
        s.reserve(static_cast<size_t>(map.h) * map.w);
        l.reserve(s.capacity());
        for (int y = 0; y < map.h; ++y)
            for (int x = 0; x < map.w; ++x) {
                s.push_back(map.scores(y, x));
                l.push_back(mask.at(y, x) >= 0.5 ? 1 : 0);
            }
        const int64_t pos = std::count(l.begin(), l.end(), uint8_t{1});
        report.positive_pixels += pos;
        report.negative_pixels += static_cast<int64_t>(l.size()) - pos;
        pr.defective = pos > 0;
        if (pos > 0 && pos < static_cast<int64_t>(l.size())) {
            pr.image_auroc = auroc(s, l);
            image_auc_sum += pr.image_auroc;
            ++image_auc_count;
        }
        pooled_scores.insert(pooled_scores.end(), s.begin(), s.end());
        pooled_labels.insert(pooled_labels.end(), l.begin(), l.end());
        report.per_image.push_back(std::move(pr));
    }

    report.pixel_auroc = auroc(pooled_scores, pooled_labels);
    report.mean_image_auroc = image_auc_count > 0 ? image_auc_sum / image_auc_count : -1;
    if (opts.roc_csv) report.roc_points = roc_curve(pooled_scores, pooled_labels);
    return report;
}

std::string EvalReport::to_table() const {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << "pixel AuROC (pooled):    " << pixel_auroc << "\n";
    os << "mean per-image AuROC:    " << mean_image_auroc << "\n";
    os << "positive pixels:         " << positive_pixels << "\n";
    os << "negative pixels:         " << negative_pixels << "\n";
    os << "---------------------------------------------\n";
    os << std::left << std::setw(28) << "image" << std::setw(12) << "score" << "auroc\n";
    for (const auto& p : per_image) {
        os << std::left << std::setw(28) << p.name << std::setw(12) << p.image_score;
        if (p.image_auroc >= 0)
            os << p.image_auroc;
        else
            os << "-";
        os << "\n";
    }
    return os.str();
}

std::string EvalReport::to_json(const std::string& checkpoint_id, const std::string& config_id) const {
    nlohmann::json j;
    j["pixel_auroc"] = pixel_auroc;
    j["mean_image_auroc"] = mean_image_auroc;
    j["positive_pixels"] = positive_pixels;
    j["negative_pixels"] = negative_pixels;
    j["checkpoint"] = checkpoint_id;
    j["config"] = config_id;
    j["per_image"] = nlohmann::json::array();
    for (const auto& p : per_image)
        j["per_image"].push_back({{"name", p.name},
                                  {"image_score", p.image_score},
                                  {"image_auroc", p.image_auroc},
                                  {"defective", p.defective}});
    return j.dump(2);
}

}  // namespace cma
