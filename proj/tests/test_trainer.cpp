#include <doctest.h>

#include <cstring>
#include <fstream>

#include "cma/errors.hpp"
#include "cma/synthesis/texture.hpp"
#include "cma/train/losses.hpp"
#include "cma/train/trainer.hpp"

using cma::ArchConfig;
using cma::CmaModel;
using cma::Image;

namespace {

ArchConfig tiny_arch() {
    ArchConfig a;
    a.patch_size = 16;
    a.layers = {{4, 2}, {3, 1}, {4, 2}, {4, 2}};
    a.channels = {4, 4, 8, 8};
    a.latent_dim = 8;
    a.memory_items = 4;
    return a;
}

std::vector<Image> tiny_dataset(int n, uint64_t seed) {
    cma::Rng rng(seed);
    cma::TextureSpec spec;
    spec.period = 8;
    spec.height = 64;
    spec.width = 64;
    std::vector<Image> out;
    for (int i = 0; i < n; ++i) out.push_back(cma::synth_texture(spec, rng));
    return out;
}

cma::TrainConfig quick_cfg() {
    cma::TrainConfig cfg;
    cfg.t1 = 30;
    cfg.t2 = 20;
    cfg.batch_size = 2;
    cfg.alpha = 1e-3;
    cfg.seed = 5;
    return cfg;
}

std::vector<cma::AnomalySample> tiny_negatives(const std::vector<Image>& positives, uint64_t seed) {
    cma::Rng rng(seed);
    auto pool = cma::NaturalPool::builtin(4, 80, 3);
    cma::GaagaOptions opts;
    opts.crop_size = 32;
    std::vector<cma::AnomalySample> out;
    for (const auto& p : positives) out.push_back(cma::generate(p, pool, rng, opts));
    return out;
}

}  // namespace

TEST_CASE("train config validation") {
    cma::TrainConfig cfg;
    cfg.alpha = 0.0;
    CHECK_THROWS_AS(cfg.validate(), cma::ConfigError);
    cfg = {};
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), cma::ConfigError);
    cfg = {};
    cfg.t1 = -1;
    CHECK_THROWS_AS(cfg.validate(), cma::ConfigError);
}

TEST_CASE("stage 1 reduces the training loss") {
    CmaModel model(tiny_arch(), 21);
    auto data = tiny_dataset(4, 11);
    cma::TrainConfig cfg = quick_cfg();
    cfg.t1 = 150;
    auto report = cma::train_stage1(model, data, cfg);
    REQUIRE(report.stage1.size() == 150);
    double first = report.stage1.front()[2];
    double last = report.stage1.back()[2];
    CHECK(last < first);
    CHECK(model.stage() == cma::TrainStage::Stage1Complete);
}

TEST_CASE("stage-1 training is seed deterministic") {
    auto data = tiny_dataset(3, 13);
    cma::TrainConfig cfg = quick_cfg();
    CmaModel m1(tiny_arch(), 33), m2(tiny_arch(), 33);
    auto r1 = cma::train_stage1(m1, data, cfg);
    auto r2 = cma::train_stage1(m2, data, cfg);
    REQUIRE(r1.stage1.size() == r2.stage1.size());
    for (size_t i = 0; i < r1.stage1.size(); ++i) CHECK(r1.stage1[i][2] == r2.stage1[i][2]);
    auto p1 = m1.params(), p2 = m2.params();
    for (size_t b = 0; b < p1.size(); ++b)
        CHECK(std::memcmp(p1[b].data, p2[b].data, sizeof(double) * p1[b].size) == 0);
}

TEST_CASE("stage 2 requires a stage-1 model and freezes the memory bitwise") {
    auto data = tiny_dataset(3, 17);
    auto negatives = tiny_negatives(data, 19);
    cma::TrainConfig cfg = quick_cfg();

    CmaModel fresh(tiny_arch(), 41);
    CHECK_THROWS_AS(cma::train_stage2(fresh, negatives, cfg), cma::ValidationError);

    CmaModel model(tiny_arch(), 41);
    cma::train_stage1(model, data, cfg);
    cma::MatrixXd memory_before = model.memory;
    auto gates_before = model.gates.W_f;

    cma::train_stage2(model, negatives, cfg);
    CHECK(model.stage() == cma::TrainStage::Stage2Complete);
    // memory rows untouched down to the last bit
    CHECK(std::memcmp(model.memory.data(), memory_before.data(),
                      sizeof(double) * memory_before.size()) == 0);
    // while the rest of the model did move
    CHECK((model.gates.W_f - gates_before).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("stage 2 trains against the clean target by default") {
    // On aligned tiles of an artificial negative, the model should move toward
    // reconstructing the clean pixels, so the repair error on masked regions drops.
    auto data = tiny_dataset(4, 23);
    auto negatives = tiny_negatives(data, 29);
    cma::TrainConfig cfg = quick_cfg();
    cfg.t2 = 120;

    CmaModel model(tiny_arch(), 47);
    cma::train_stage1(model, data, cfg);

    auto repair_error = [&](const CmaModel& m) {
        double err = 0;
        int64_t count = 0;
        for (const auto& s : negatives) {
            Image rec = m.reconstruct_image(cma::with_channels(s.anomalous, 1));
            for (int y = 0; y < s.mask.h; ++y)
                for (int x = 0; x < s.mask.w; ++x)
                    if (s.mask.at(y, x) > 0.5) {
                        err += std::abs(rec.at(y, x) - s.clean.at(y, x, 0));
                        ++count;
                    }
        }
        return err / count;
    };

    double before = repair_error(model);
    cma::train_stage2(model, negatives, cfg);
    double after = repair_error(model);
    CHECK(after < before);
}

TEST_CASE("adam with frozen memory never writes memory even with nonzero grads") {
    CmaModel model(tiny_arch(), 53);
    cma::AdamOptimizer opt(model, 1e-2);
    model.zero_grads();
    for (auto& g : model.grads())
        for (Eigen::Index i = 0; i < g.size; ++i) g.data[i] = 1.0;
    cma::MatrixXd memory_before = model.memory;
    opt.step(/*freeze_memory=*/true);
    CHECK(std::memcmp(model.memory.data(), memory_before.data(),
                      sizeof(double) * memory_before.size()) == 0);
    opt.step(/*freeze_memory=*/false);
    CHECK((model.memory - memory_before).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("divergence raises instead of emitting NaN parameters") {
    CmaModel model(tiny_arch(), 59);
    auto data = tiny_dataset(2, 31);
    cma::TrainConfig cfg = quick_cfg();
    cfg.alpha = 1e6;  // force the parameters to blow up
    cfg.t1 = 200;
    bool diverged = false;
    try {
        cma::train_stage1(model, data, cfg);
    } catch (const cma::DivergenceError&) {
        diverged = true;
    }
    if (diverged) {
        // parameters must still be finite after the rollback
        for (auto& p : model.params())
            for (Eigen::Index i = 0; i < p.size; ++i) CHECK(std::isfinite(p.data[i]));
    }
}

TEST_CASE("trace csv round trip") {
    cma::LossTrace trace = {{1.0, 2.0, 3.0}, {0.5, 0.25, 0.125}};
    std::string path = "/tmp/cma_trace_test.csv";
    cma::write_trace_csv(trace, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "step,l_rec,l_s,total");
    std::string row;
    int rows = 0;
    while (std::getline(in, row))
        if (!row.empty()) ++rows;
    CHECK(rows == 2);
    std::remove(path.c_str());
}
