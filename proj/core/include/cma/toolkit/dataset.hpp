#pragma once

#include <string>
#include <vector>

#include "cma/eval/evaluate.hpp"
#include "cma/toolkit/config.hpp"

namespace cma {

// Loads the training split (defect-free images only).
std::vector<Image> load_train_good(const DatasetConfig& ds);

// Loads the test split with ground-truth masks (all-zero masks for good
// images). Maskless defect images raise DataError.
std::vector<TestItem> load_test_set(const DatasetConfig& ds);

// Loads GAAGA samples previously emitted under train/synthetic, or an empty
// vector when the directory does not exist.
std::vector<AnomalySample> load_synthetic_negatives(const DatasetConfig& ds);

// Emits the synthetic texture dataset (and optional GAAGA negatives) with a
// manifest recording seeds and parameters. Idempotent for a fixed seed.
void emit_synthetic_dataset(const RunConfig& cfg);

NaturalPool load_pool(const RunConfig& cfg);

}  // namespace cma
