#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cma/image.hpp"
#include "cma/model/arch.hpp"
#include "cma/model/frm.hpp"
#include "cma/model/layers.hpp"
#include "cma/model/memory.hpp"

namespace cma {

// All encoder feature maps (post-activation) plus the latent code.
struct FeaturePyramid {
    std::vector<Tensor> maps;
    VectorXd latent;
};

struct CmamResult {
    VectorXd code;
    AttentionWeights attn;
};

// Training stage marker stored in checkpoints.
enum class TrainStage : int { Initialized = 0, Stage1Complete = 1, Stage2Complete = 2 };

// Mutable view of one parameter block, for the optimizer and checkpointing.
struct ParamRef {
    std::string name;
    double* data;
    Eigen::Index size;
    bool is_memory;  // frozen during stage-2 training
};

struct PatchCache {
    Tensor input;
    std::vector<Tensor> enc_pre;    // preactivations per encoder conv
    std::vector<Tensor> enc_post;   // post-activation maps (inputs to the next layer)
    VectorXd flat;                  // flattened bottleneck
    VectorXd z;
    MamCache mam;
    FrmCache frm;
    VectorXd code;                  // code fed to the decoder
    VectorXd dec_fc_pre, dec_fc_post;
    std::vector<Tensor> dec_pre;
    std::vector<Tensor> dec_post;   // last entry is the sigmoid output
};

class CmaModel {
  public:
    CmaModel() = default;
    CmaModel(const ArchConfig& arch, uint64_t seed);

    // --- inference (const, safe for concurrent callers) ---
    FeaturePyramid encode(const Tensor& patch) const;
    Tensor decode(const VectorXd& code) const;
    CmamResult cmam(const VectorXd& z) const;
    Tensor forward_patch(const Tensor& patch) const;
    // Tiles into patch_size blocks, reconstructs each, stitches. tile_stride 0
    // means non-overlapping tiles; a smaller stride averages overlapping tiles.
    Image reconstruct_image(const Image& image, int tile_stride = 0) const;
    // Conv stack applied to the full image (no patching, no final FC).
    std::vector<Tensor> conv_features(const Image& image) const;

    // --- training ---
    void forward_train(const Tensor& patch, PatchCache& cache) const;
    // d_recon: gradient of the loss w.r.t. the reconstructed patch.
    // d_shrunk: gradient contribution on the shrunk attention weights
    // (sparsity loss); pass an empty vector for none.
    void backward(const PatchCache& cache, const Tensor& d_recon, const VectorXd& d_shrunk);
    void zero_grads();

    std::vector<ParamRef> params();
    std::vector<ParamRef> grads();
    Eigen::Index param_count();

    const ArchConfig& arch() const { return arch_; }
    TrainStage stage() const { return stage_; }
    void set_stage(TrainStage s) { stage_ = s; }

    MatrixXd memory;       // N x C
    MatrixXd memory_grad;
    GateParams gates;
    GateGrads gate_grads;

    std::vector<Conv2d> enc_layers;
    Dense enc_fc;           // flatten -> latent
    Dense dec_fc;           // latent -> bottleneck volume
    std::vector<ConvT2d> dec_layers;

  private:
    ArchConfig arch_;
    TrainStage stage_ = TrainStage::Initialized;
    std::vector<int> enc_sizes_;
};

}  // namespace cma
