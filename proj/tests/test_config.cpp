#include <doctest.h>

#include "cma/errors.hpp"
#include "cma/toolkit/config.hpp"

TEST_CASE("empty config yields the documented defaults") {
    auto cfg = cma::parse_run_config("{}");
    CHECK(cfg.schema_version == 1);
    CHECK(cfg.arch.latent_dim == 256);
    CHECK(cfg.arch.memory_items == 100);
    CHECK(cfg.arch.patch_size == 64);
    CHECK(cfg.train.w1 == 50.0);
    CHECK(cfg.train.w2 == 0.01);
    CHECK(cfg.train.use_stage2);
    CHECK(cfg.gaaga.crop_size == 256);
    CHECK(cfg.dataset.eval_size == 512);
    CHECK(cfg.msfr.scales == std::vector<int>{1, 2, 3});
}

TEST_CASE("known keys are parsed into the right places") {
    auto cfg = cma::parse_run_config(R"({
        "seed": 9,
        "out_dir": "/tmp/x",
        "arch": {"latent_dim": 64, "memory_items": 32, "mode": "mam", "renorm": "l2"},
        "train": {"t1": 100, "t2": 50, "alpha": 0.001, "stage2_target": "anomalous"},
        "gaaga": {"crop_size": 64, "paste_mode": "one-of"},
        "dataset": {"root": "/data", "layout": "mvtec", "category": "carpet"},
        "msfr": {"scales": [1, 2], "use_msfr": false}
    })");
    CHECK(cfg.seed == 9);
    CHECK(cfg.arch.latent_dim == 64);
    CHECK(cfg.arch.mode == cma::CmamMode::Mam);
    CHECK(cfg.arch.renorm == cma::Renorm::L2);
    CHECK(cfg.train.t1 == 100);
    CHECK(cfg.train.stage2_target == cma::Stage2Target::Anomalous);
    CHECK(cfg.gaaga.crop_size == 64);
    CHECK(cfg.gaaga.paste_mode == cma::PasteMode::OneOf);
    CHECK(cfg.dataset.layout == cma::DatasetKind::Mvtec);
    CHECK(cfg.dataset.category == "carpet");
    CHECK(cfg.msfr.scales == std::vector<int>{1, 2});
    CHECK_FALSE(cfg.msfr.use_msfr);
}

TEST_CASE("unknown keys are rejected at every nesting level") {
    CHECK_THROWS_AS(cma::parse_run_config(R"({"sead": 1})"), cma::ConfigError);
    CHECK_THROWS_AS(cma::parse_run_config(R"({"arch": {"latent_dmi": 8}})"), cma::ConfigError);
    CHECK_THROWS_AS(cma::parse_run_config(R"({"train": {"alpha": 0.1, "warmup": 5}})"),
                    cma::ConfigError);
    CHECK_THROWS_AS(cma::parse_run_config(R"({"dataset": {"roots": "/x"}})"), cma::ConfigError);
    CHECK_THROWS_AS(cma::parse_run_config(R"({"msfr": {"scale": [1]}})"), cma::ConfigError);
}

TEST_CASE("malformed json and wrong types are config errors") {
    CHECK_THROWS_AS(cma::parse_run_config("{"), cma::ConfigError);
    CHECK_THROWS_AS(cma::parse_run_config(R"({"seed": "nine"})"), cma::ConfigError);
    CHECK_THROWS_AS(cma::parse_run_config(R"({"arch": {"latent_dim": "big"}})"),
                    cma::ConfigError);
}

TEST_CASE("validate rejects inconsistent combinations") {
    auto cfg = cma::parse_run_config("{}");
    cfg.dataset.eval_size = 100;  // not divisible by patch_size 64
    CHECK_THROWS_AS(cfg.validate(), cma::ConfigError);

    cfg = cma::parse_run_config("{}");
    cfg.msfr.scales = {0, 1};
    CHECK_THROWS_AS(cfg.validate(), cma::ConfigError);

    cfg = cma::parse_run_config("{}");
    cfg.msfr.scales = {7};  // default arch has 6 layers
    CHECK_THROWS_AS(cfg.validate(), cma::ConfigError);

    cfg = cma::parse_run_config("{}");
    cfg.arch.patch_size = 63;
    CHECK_THROWS_AS(cfg.validate(), cma::ConfigError);
}

TEST_CASE("unsupported schema version is rejected") {
    CHECK_THROWS_AS(cma::parse_run_config(R"({"schema_version": 2})"), cma::ConfigError);
}

TEST_CASE("missing config file is a config error") {
    CHECK_THROWS_AS(cma::load_run_config("/nonexistent/cfg.json"), cma::ConfigError);
}
