#pragma once

#include <string>
#include <vector>

#include "cma/eval/evaluate.hpp"
#include "cma/model/arch.hpp"
#include "cma/synthesis/gaaga.hpp"
#include "cma/train/trainer.hpp"

namespace cma {

enum class DatasetKind { Synthetic, Mvtec, Dagm };

struct DatasetConfig {
    std::string root;
    DatasetKind layout = DatasetKind::Synthetic;
    std::string category;  // MVTec category / DAGM class subdirectory, optional
    int eval_size = 512;
};

struct GenerateConfig {
    std::string pattern = "stripes";
    int period = 16;
    double orientation = 0.0;
    double noise_sigma = 0.02;
    int height = 256;
    int width = 256;
    int train_good = 40;
    int test_good = 20;
    int test_defect = 20;
    int synthetic_negatives = 0;  // GAAGA samples emitted under train/synthetic
};

// Full per-run configuration, parsed from a JSON config file. Unknown keys
// are rejected; every command validates before doing any work.
struct RunConfig {
    int schema_version = 1;
    uint64_t seed = 0;
    std::string out_dir = "out";
    ArchConfig arch;
    TrainConfig train;
    GaagaOptions gaaga;
    std::string gaaga_pool_dir;  // empty: procedural builtin pool
    DatasetConfig dataset;
    GenerateConfig generate;
    int infer_tile_stride = 0;
    MsfrOptions msfr;
    bool roc_csv = false;

    void validate() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

}  // namespace cma
