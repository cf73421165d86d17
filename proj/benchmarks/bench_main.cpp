#include <benchmark/benchmark.h>

#include <random>

#include "cma/eval/auroc.hpp"
#include "cma/model/model.hpp"
#include "cma/seg/msfr.hpp"

namespace {

cma::ArchConfig small_arch() {
    cma::ArchConfig a;
    a.channels = {16, 16, 32, 64, 64, 64};
    a.latent_dim = 64;
    a.memory_items = 32;
    return a;
}

void BM_PatchForward(benchmark::State& state) {
    cma::ArchConfig arch = small_arch();
    cma::CmaModel model(arch, 7);
    cma::Tensor patch(arch.in_channels, arch.patch_size, arch.patch_size);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < patch.data.size(); ++i) patch.data[i] = u(rng);
    for (auto _ : state) {
        cma::Tensor out = model.forward_patch(patch);
        benchmark::DoNotOptimize(out.data.data());
    }
}
BENCHMARK(BM_PatchForward);

void BM_PatchTrainStep(benchmark::State& state) {
    cma::ArchConfig arch = small_arch();
    cma::CmaModel model(arch, 7);
    cma::Tensor patch(arch.in_channels, arch.patch_size, arch.patch_size);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < patch.data.size(); ++i) patch.data[i] = u(rng);
    for (auto _ : state) {
        cma::PatchCache cache;
        model.zero_grads();
        model.forward_train(patch, cache);
        cma::Tensor d_recon = cache.dec_post.back();
        d_recon.data.setOnes();
        Eigen::VectorXd d_shrunk = Eigen::VectorXd::Zero(arch.memory_items);
        model.backward(cache, d_recon, d_shrunk);
        benchmark::DoNotOptimize(cache.dec_post.back().data.data());
    }
}
BENCHMARK(BM_PatchTrainStep);

void BM_Msfr256(benchmark::State& state) {
    cma::ArchConfig arch = small_arch();
    cma::CmaModel model(arch, 7);
    cma::Image img(256, 256, arch.in_channels);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : img.v) v = u(rng);
    cma::Image recon = model.reconstruct_image(img);
    for (auto _ : state) {
        cma::ScoreMap m = cma::msfr(img, recon, model, {});
        benchmark::DoNotOptimize(m.scores.data());
    }
}
BENCHMARK(BM_Msfr256);

void BM_Auroc(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> scores(n);
    std::vector<uint8_t> labels(n);
    for (int i = 0; i < n; ++i) {
        labels[i] = i % 2;
        scores[i] = u(rng) + 0.3 * labels[i];
    }
    for (auto _ : state) {
        double a = cma::auroc(scores, labels);
        benchmark::DoNotOptimize(a);
    }
}
BENCHMARK(BM_Auroc)->Arg(1 << 14)->Arg(1 << 18);

}  // namespace

BENCHMARK_MAIN();
