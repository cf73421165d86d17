#include "cma/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "cma/errors.hpp"
#include "cma/fsutil.hpp"
#include "cma/train/losses.hpp"

namespace cma {

void TrainConfig::validate() const {
    if (w1 <= 0 || w2 <= 0) throw ConfigError("train: loss weights must be > 0");
    if (alpha <= 0) throw ConfigError("train: learning rate must be > 0");
    if (t1 < 0 || t2 < 0) throw ConfigError("train: iteration counts must be >= 0");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
}

AdamOptimizer::AdamOptimizer(CmaModel& model, double lr, double beta1, double beta2, double eps)
    : model_(model), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& p : model_.params()) {
        m_.push_back(Eigen::VectorXd::Zero(p.size));
        v_.push_back(Eigen::VectorXd::Zero(p.size));
    }
}

void AdamOptimizer::step(bool freeze_memory) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    auto ps = model_.params();
    auto gs = model_.grads();
    for (size_t i = 0; i < ps.size(); ++i) {
        if (freeze_memory && ps[i].is_memory) continue;
        Eigen::Map<Eigen::VectorXd> p(ps[i].data, ps[i].size);
        Eigen::Map<const Eigen::VectorXd> g(gs[i].data, gs[i].size);
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
        p -= lr_ * (m_[i] / bc1).cwiseQuotient(((v_[i] / bc2).cwiseSqrt().array() + eps_).matrix());
    }
}

namespace {

struct StepStats {
    double rec = 0, sparse = 0, total = 0;
};

// One optimizer step over a batch of (input, target) patch pairs.
StepStats run_step(CmaModel& model, AdamOptimizer& adam, const std::vector<Tensor>& inputs,
                   const std::vector<Tensor>& targets, const TrainConfig& cfg, bool freeze_memory,
                   std::vector<Eigen::VectorXd>& snapshot) {
    const int B = static_cast<int>(inputs.size());
    model.zero_grads();

    // snapshot for the divergence guard
    snapshot.clear();
    for (const auto& p : model.params())
        snapshot.emplace_back(Eigen::Map<const Eigen::VectorXd>(p.data, p.size));

    StepStats st;
    PatchCache cache;
    for (int b = 0; b < B; ++b) {
        model.forward_train(inputs[b], cache);
        const Tensor& recon = cache.dec_post.back();
        st.rec += reconstruction_loss(recon, targets[b]);
        st.sparse += sparsity_loss({cache.mam.attn.shrunk});

        Tensor d_recon(recon.c, recon.h, recon.w);
        const double scale = cfg.w1 / (static_cast<double>(recon.size()) * B);
        for (Eigen::Index i = 0; i < recon.size(); ++i) {
            const double d = recon.data[i] - targets[b].data[i];
            d_recon.data[i] = d > 0 ? scale : (d < 0 ? -scale : 0.0);
        }
        Eigen::VectorXd d_shrunk = cfg.w2 * sparsity_loss_grad(cache.mam.attn.shrunk);
        model.backward(cache, d_recon, d_shrunk);
    }
    st.rec /= B;
    st.total = cfg.w1 * st.rec + cfg.w2 * st.sparse;

    if (!std::isfinite(st.total)) {
        auto ps = model.params();
        for (size_t i = 0; i < ps.size(); ++i)
            Eigen::Map<Eigen::VectorXd>(ps[i].data, ps[i].size) = snapshot[i];
        throw DivergenceError("training loss is non-finite; last good parameters restored");
    }
    adam.step(freeze_memory);
    return st;
}

// Uniformly samples an aligned patch-grid tile from one image.
Tensor sample_tile(const Image& img, int patch, Rng& rng) {
    const int ty = img.h / patch, tx = img.w / patch;
    std::uniform_int_distribution<int> yd(0, ty - 1), xd(0, tx - 1);
    const int y0 = yd(rng) * patch, x0 = xd(rng) * patch;
    return image_to_tensor(crop(img, y0, x0, patch, patch));
}

}  // namespace

TrainReport train_stage1(CmaModel& model, const std::vector<Image>& positives, const TrainConfig& cfg) {
    cfg.validate();
    if (positives.empty()) throw DataError("train_stage1: empty dataset");
    const int P = model.arch().patch_size;
    for (const auto& img : positives)
        if (img.h < P || img.w < P) throw DataError("train_stage1: image smaller than patch size");

    const auto start = std::chrono::steady_clock::now();
    TrainReport report;
    AdamOptimizer adam(model, cfg.alpha);
    Rng rng(cfg.seed);
    std::uniform_int_distribution<size_t> pick(0, positives.size() - 1);
    std::vector<Eigen::VectorXd> snapshot;

    for (int step = 0; step < cfg.t1; ++step) {
        std::vector<Tensor> batch;
        batch.reserve(cfg.batch_size);
        for (int b = 0; b < cfg.batch_size; ++b) batch.push_back(sample_tile(positives[pick(rng)], P, rng));
        StepStats st = run_step(model, adam, batch, batch, cfg, /*freeze_memory=*/false, snapshot);
        report.stage1.push_back({st.rec, st.sparse, st.total});
    }
    model.set_stage(TrainStage::Stage1Complete);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

TrainReport train_stage2(CmaModel& model, const std::vector<AnomalySample>& samples,
                         const TrainConfig& cfg) {
    cfg.validate();
    if (model.stage() == TrainStage::Initialized)
        throw ValidationError("train_stage2: model is not stage1-complete");
    if (samples.empty()) throw DataError("train_stage2: empty dataset");
    const int P = model.arch().patch_size;

    const auto start = std::chrono::steady_clock::now();
    TrainReport report;
    AdamOptimizer adam(model, cfg.alpha);
    Rng rng(cfg.seed + 1);
    std::uniform_int_distribution<size_t> pick(0, samples.size() - 1);
    std::vector<Eigen::VectorXd> snapshot;

    for (int step = 0; step < cfg.t2; ++step) {
        std::vector<Tensor> inputs, targets;
        inputs.reserve(cfg.batch_size);
        targets.reserve(cfg.batch_size);
        for (int b = 0; b < cfg.batch_size; ++b) {
            const AnomalySample& s = samples[pick(rng)];
            const int ty = s.anomalous.h / P, tx = s.anomalous.w / P;
            std::uniform_int_distribution<int> yd(0, ty - 1), xd(0, tx - 1);
            const int y0 = yd(rng) * P, x0 = xd(rng) * P;
            inputs.push_back(image_to_tensor(crop(s.anomalous, y0, x0, P, P)));
            const Image& target_img = cfg.stage2_target == Stage2Target::Clean ? s.clean : s.anomalous;
            targets.push_back(image_to_tensor(crop(target_img, y0, x0, P, P)));
        }
        StepStats st = run_step(model, adam, inputs, targets, cfg, /*freeze_memory=*/true, snapshot);
        report.stage2.push_back({st.rec, st.sparse, st.total});
    }
    model.set_stage(TrainStage::Stage2Complete);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void write_trace_csv(const LossTrace& trace, const std::string& path) {
    std::ostringstream os;
    os << "step,l_rec,l_s,total\n";
    for (size_t i = 0; i < trace.size(); ++i)
        os << i << "," << trace[i][0] << "," << trace[i][1] << "," << trace[i][2] << "\n";
    atomic_write_text(path, os.str());
}

}  // namespace cma
