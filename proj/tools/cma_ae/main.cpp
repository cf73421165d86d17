#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cma/errors.hpp"
#include "cma/toolkit/commands.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string ablation = "none";
    int64_t seed = -1;
    int t1 = -1, t2 = -1;
};

cma::RunConfig make_config(const CommonArgs& a) {
    cma::RunConfig cfg = a.config_path.empty() ? cma::RunConfig{} : cma::load_run_config(a.config_path);
    if (a.seed >= 0) {
        cfg.seed = static_cast<uint64_t>(a.seed);
        cfg.train.seed = cfg.seed;
    }
    if (a.t1 >= 0) cfg.train.t1 = a.t1;
    if (a.t2 >= 0) cfg.train.t2 = a.t2;
    if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;

    if (a.ablation == "mam") cfg.arch.mode = cma::CmamMode::Mam;
    else if (a.ablation == "cat") cfg.arch.mode = cma::CmamMode::Cat;
    else if (a.ablation == "no-stage2") cfg.train.use_stage2 = false;
    else if (a.ablation == "no-msfr") cfg.msfr.use_msfr = false;
    else if (a.ablation != "none")
        throw cma::ConfigError("unknown ablation: " + a.ablation +
                               " (expected none|mam|cat|no-stage2|no-msfr)");
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* app, CommonArgs& a, bool train_opts) {
    app->add_option("--config", a.config_path, "JSON config file");
    app->add_option("--out", a.out_dir, "output directory override");
    app->add_option("--seed", a.seed, "seed override");
    if (train_opts) {
        app->add_option("--t1", a.t1, "stage-1 iteration override");
        app->add_option("--t2", a.t2, "stage-2 iteration override");
    }
    app->add_option("--ablation", a.ablation, "none|mam|cat|no-stage2|no-msfr");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CMA-AE surface defect detection toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string checkpoint, image, dataset_root, resume;

    auto* gen = app.add_subcommand("generate", "emit a synthetic texture dataset");
    add_common(gen, args, false);

    auto* train = app.add_subcommand("train", "two-stage training");
    add_common(train, args, true);
    train->add_option("--data", dataset_root, "dataset root override");
    train->add_option("--resume", resume, "resume from checkpoint");

    auto* infer = app.add_subcommand("infer", "reconstruct one image and emit its score map");
    add_common(infer, args, false);
    infer->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
    infer->add_option("--image", image, "input image path")->required();

    auto* eval = app.add_subcommand("eval", "evaluate pixel AuROC on a test layout");
    add_common(eval, args, false);
    eval->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
    eval->add_option("--data", dataset_root, "dataset root override");

    CLI11_PARSE(app, argc, argv);

    try {
        cma::RunConfig cfg = make_config(args);
        if (!dataset_root.empty()) cfg.dataset.root = dataset_root;
        if (gen->parsed()) cma::cmd_generate(cfg);
        else if (train->parsed()) cma::cmd_train(cfg, resume);
        else if (infer->parsed()) cma::cmd_infer(cfg, checkpoint, image);
        else if (eval->parsed()) cma::cmd_eval(cfg, checkpoint);
        return 0;
    } catch (const cma::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cma::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cma::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const cma::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const cma::DimensionError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
