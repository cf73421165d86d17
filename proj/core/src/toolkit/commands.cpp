#include "cma/toolkit/commands.hpp"

#include <filesystem>
#include <iostream>

#include <json.hpp>

#include "cma/errors.hpp"
#include "cma/fsutil.hpp"
#include "cma/model/checkpoint.hpp"
#include "cma/toolkit/dataset.hpp"

namespace cma {

namespace fs = std::filesystem;

void cmd_generate(const RunConfig& cfg) { emit_synthetic_dataset(cfg); }

void cmd_train(const RunConfig& cfg, const std::string& resume_checkpoint) {
    fs::create_directories(cfg.out_dir);
    std::vector<Image> positives;
    for (auto& img : load_train_good(cfg.dataset))
        positives.push_back(with_channels(img, cfg.arch.in_channels));

    CmaModel model = resume_checkpoint.empty() ? CmaModel(cfg.arch, cfg.seed)
                                               : load_checkpoint(resume_checkpoint);

    if (model.stage() == TrainStage::Initialized) {
        TrainReport r1 = train_stage1(model, positives, cfg.train);
        write_trace_csv(r1.stage1, (fs::path(cfg.out_dir) / "stage1_trace.csv").string());
        save_checkpoint(model, (fs::path(cfg.out_dir) / "checkpoint_stage1.cmae").string());
        std::cout << "stage 1 done: " << cfg.train.t1 << " steps in " << r1.seconds << " s\n";
    }

    if (cfg.train.use_stage2 && model.stage() == TrainStage::Stage1Complete) {
        std::vector<AnomalySample> negatives = load_synthetic_negatives(cfg.dataset);
        if (negatives.empty()) {
            // GAAGA on the fly from the training positives
            NaturalPool pool = load_pool(cfg);
            Rng rng(cfg.seed + 2);
            const int count = std::max<int>(2 * static_cast<int>(positives.size()), 16);
            for (int i = 0; i < count; ++i) {
                std::uniform_int_distribution<size_t> pick(0, positives.size() - 1);
                negatives.push_back(generate(positives[pick(rng)], pool, rng, cfg.gaaga));
            }
        } else {
            for (auto& s : negatives) {
                s.anomalous = with_channels(s.anomalous, cfg.arch.in_channels);
                s.clean = with_channels(s.clean, cfg.arch.in_channels);
            }
        }
        TrainReport r2 = train_stage2(model, negatives, cfg.train);
        write_trace_csv(r2.stage2, (fs::path(cfg.out_dir) / "stage2_trace.csv").string());
        std::cout << "stage 2 done: " << cfg.train.t2 << " steps in " << r2.seconds << " s\n";
    }

    save_checkpoint(model, (fs::path(cfg.out_dir) / "checkpoint.cmae").string());
}

void cmd_infer(const RunConfig& cfg, const std::string& checkpoint_path,
               const std::string& image_path) {
    CmaModel model = load_checkpoint(checkpoint_path);
    fs::create_directories(cfg.out_dir);

    Image img = with_channels(load_image(image_path), model.arch().in_channels);
    bool resized = false;
    const int P = model.arch().patch_size;
    if (img.h % P != 0 || img.w % P != 0) {
        const int size = cfg.dataset.eval_size > 0 ? cfg.dataset.eval_size : 512;
        img = resize_bilinear(img, size, size);
        resized = true;
    }

    Image recon = model.reconstruct_image(img, cfg.infer_tile_stride);
    ScoreMap map = msfr(img, recon, model, cfg.msfr);

    const fs::path out(cfg.out_dir);
    const std::string stem = fs::path(image_path).stem().string();
    save_image(recon, (out / (stem + "_recon.png")).string());
    save_score_map(map, (out / (stem + "_score.png")).string());
    // 8-bit visualization, min-max normalized
    const double lo = map.scores.minCoeff(), hi = map.scores.maxCoeff();
    Image vis(map.h, map.w, 1);
    for (int y = 0; y < map.h; ++y)
        for (int x = 0; x < map.w; ++x)
            vis.at(y, x) = hi > lo ? (map.scores(y, x) - lo) / (hi - lo) : 0.0;
    save_image(vis, (out / (stem + "_score_vis.png")).string());

    nlohmann::json meta;
    meta["image"] = image_path;
    meta["image_level_score"] = map.max();
    meta["resized"] = resized;
    meta["size"] = {img.h, img.w};
    atomic_write_text((out / (stem + "_infer.json")).string(), meta.dump(2) + "\n");

    std::cout << "image-level score: " << map.max() << "\n";
}

void cmd_eval(const RunConfig& cfg, const std::string& checkpoint_path) {
    CmaModel model = load_checkpoint(checkpoint_path);
    fs::create_directories(cfg.out_dir);

    EvalOptions opts;
    opts.eval_size = cfg.dataset.eval_size;
    opts.tile_stride = cfg.infer_tile_stride;
    opts.msfr = cfg.msfr;
    opts.roc_csv = cfg.roc_csv;

    EvalReport report = evaluate(model, load_test_set(cfg.dataset), opts);

    const fs::path out(cfg.out_dir);
    atomic_write_text((out / "report.txt").string(), report.to_table());
    atomic_write_text((out / "report.json").string(),
                      report.to_json(checkpoint_path, "seed=" + std::to_string(cfg.seed)) + "\n");
    if (opts.roc_csv) {
        std::string csv = "fpr,tpr\n";
        for (const auto& [fpr, tpr] : report.roc_points)
            csv += std::to_string(fpr) + "," + std::to_string(tpr) + "\n";
        atomic_write_text((out / "roc.csv").string(), csv);
    }
    std::cout << report.to_table();
}

}  // namespace cma
