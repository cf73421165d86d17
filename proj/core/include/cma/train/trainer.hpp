#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cma/model/model.hpp"
#include "cma/synthesis/gaaga.hpp"

namespace cma {

enum class Stage2Target { Clean, Anomalous };

struct TrainConfig {
    double w1 = 50.0;
    double w2 = 0.01;
    double alpha = 1e-4;   // learning rate
    int t1 = 20000;
    int t2 = 10000;
    int batch_size = 32;
    uint64_t seed = 0;
    bool use_stage2 = true;
    Stage2Target stage2_target = Stage2Target::Clean;

    void validate() const;
};

// One row per optimizer step: (L_rec, L_s, total).
using LossTrace = std::vector<std::array<double, 3>>;

struct TrainReport {
    LossTrace stage1;
    LossTrace stage2;
    double seconds = 0.0;
    std::string checkpoint_path;  // filled in by the CLI layer
};

// Adam over the model's parameter blocks; memory can be frozen.
class AdamOptimizer {
  public:
    AdamOptimizer(CmaModel& model, double lr, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8);
    void step(bool freeze_memory);

  private:
    CmaModel& model_;
    double lr_, beta1_, beta2_, eps_;
    int64_t t_ = 0;
    std::vector<Eigen::VectorXd> m_, v_;
};

// Stage 1: positive samples only; encoder, decoder, memory and gates all
// receive updates. Throws DataError on an empty dataset and DivergenceError
// (restoring the last finite parameters) on a non-finite loss.
TrainReport train_stage1(CmaModel& model, const std::vector<Image>& positives, const TrainConfig& cfg);

// Stage 2: artificial negatives; memory frozen bit-exactly. Requires the
// model to be stage1-complete.
TrainReport train_stage2(CmaModel& model, const std::vector<AnomalySample>& samples,
                         const TrainConfig& cfg);

void write_trace_csv(const LossTrace& trace, const std::string& path);

}  // namespace cma
