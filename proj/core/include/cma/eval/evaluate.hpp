#pragma once

#include <string>
#include <vector>

#include "cma/eval/auroc.hpp"
#include "cma/image.hpp"
#include "cma/model/model.hpp"
#include "cma/seg/msfr.hpp"

namespace cma {

struct TestItem {
    std::string name;
    Image image;
    Image mask;       // single channel 0/1; all-zero for good images
};

struct PerImageResult {
    std::string name;
    double image_score = 0;   // max of the score map
    double image_auroc = -1;  // -1 when the image has a single class only
    bool defective = false;
};

struct EvalOptions {
    int eval_size = 512;      // images resized to eval_size x eval_size; 0 keeps native size
    int tile_stride = 0;      // 0: non-overlapping reconstruction tiles
    MsfrOptions msfr;
    bool roc_csv = false;
};

struct EvalReport {
    double pixel_auroc = 0;          // pooled over all pixels (headline)
    double mean_image_auroc = 0;     // mean per-image AuROC over defect images
    int64_t positive_pixels = 0;
    int64_t negative_pixels = 0;
    std::vector<PerImageResult> per_image;
    std::vector<std::pair<double, double>> roc_points;  // (fpr, tpr), only when requested

    std::string to_table() const;
    std::string to_json(const std::string& checkpoint_id, const std::string& config_id) const;
};

EvalReport evaluate(const CmaModel& model, const std::vector<TestItem>& test_set,
                    const EvalOptions& opts = {});

}  // namespace cma
