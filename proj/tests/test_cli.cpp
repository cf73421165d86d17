#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "cma/toolkit/config.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / (tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
    std::string cmd = std::string(CMA_AE_BIN) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_config(const fs::path& path, const std::string& root, const std::string& out) {
    std::ofstream(path) << R"({
        "seed": 19,
        "out_dir": ")" << out << R"(",
        "arch": {"channels": [8, 8, 16, 32, 32, 32], "latent_dim": 32, "memory_items": 16},
        "train": {"t1": 4, "t2": 2, "batch_size": 2, "alpha": 0.001},
        "gaaga": {"crop_size": 64},
        "dataset": {"root": ")" << root << R"(", "layout": "synthetic", "eval_size": 128},
        "generate": {"train_good": 3, "test_good": 2, "test_defect": 2,
                     "height": 128, "width": 128, "synthetic_negatives": 2}
    })";
}

}  // namespace

TEST_CASE("cli runs generate, train, infer and eval end to end") {
    TempDir tmp("cma_cli_e2e");
    fs::path cfg = tmp.path / "cfg.json";
    write_config(cfg, (tmp.path / "data").string(), (tmp.path / "run").string());

    CHECK(run("generate --config " + cfg.string()) == 0);
    CHECK(fs::exists(tmp.path / "data/train/good/00.png"));

    CHECK(run("train --config " + cfg.string()) == 0);
    CHECK(fs::exists(tmp.path / "run/checkpoint.cmae"));
    CHECK(fs::exists(tmp.path / "run/checkpoint_stage1.cmae"));
    CHECK(fs::exists(tmp.path / "run/stage1_trace.csv"));
    CHECK(fs::exists(tmp.path / "run/stage2_trace.csv"));

    std::string ckpt = (tmp.path / "run/checkpoint.cmae").string();
    CHECK(run("infer --config " + cfg.string() + " --checkpoint " + ckpt + " --image " +
              (tmp.path / "data/test/defect/00.png").string()) == 0);
    CHECK(fs::exists(tmp.path / "run/00_recon.png"));
    CHECK(fs::exists(tmp.path / "run/00_score.png"));
    CHECK(fs::exists(tmp.path / "run/00_infer.json"));

    CHECK(run("eval --config " + cfg.string() + " --checkpoint " + ckpt) == 0);
    CHECK(fs::exists(tmp.path / "run/report.txt"));
    CHECK(fs::exists(tmp.path / "run/report.json"));
}

TEST_CASE("cli maps error classes to documented exit codes") {
    TempDir tmp("cma_cli_codes");

    // 2: config errors (unknown key / bad json / bad ablation)
    fs::path bad = tmp.path / "bad.json";
    std::ofstream(bad) << R"({"sead": 3})";
    CHECK(run("generate --config " + bad.string()) == 2);
    CHECK(run("generate --config /nonexistent.json") == 2);
    fs::path ok = tmp.path / "ok.json";
    write_config(ok, (tmp.path / "d").string(), (tmp.path / "r").string());
    CHECK(run("train --config " + ok.string() + " --ablation bogus") == 2);

    // 3: data errors (missing dataset / missing checkpoint)
    CHECK(run("train --config " + ok.string()) == 3);
    CHECK(run("eval --config " + ok.string() + " --checkpoint /nonexistent.cmae") == 3);

    // CLI11 usage errors (missing required option) are nonzero too
    CHECK(run("infer --config " + ok.string()) != 0);
}

TEST_CASE("cli ablation flags map onto the config") {
    TempDir tmp("cma_cli_ablate");
    fs::path cfg = tmp.path / "cfg.json";
    write_config(cfg, (tmp.path / "data").string(), (tmp.path / "run").string());
    REQUIRE(run("generate --config " + cfg.string()) == 0);
    // no-stage2 run trains but must not produce a stage-2 trace
    CHECK(run("train --config " + cfg.string() + " --ablation no-stage2 --out " +
              (tmp.path / "ns").string()) == 0);
    CHECK(fs::exists(tmp.path / "ns/checkpoint.cmae"));
    CHECK(fs::exists(tmp.path / "ns/stage1_trace.csv"));
    CHECK_FALSE(fs::exists(tmp.path / "ns/stage2_trace.csv"));

    // mam ablation trains end to end
    CHECK(run("train --config " + cfg.string() + " --ablation mam --out " +
              (tmp.path / "mam").string()) == 0);
    CHECK(fs::exists(tmp.path / "mam/checkpoint.cmae"));
}

TEST_CASE("training twice with the same seed gives identical checkpoints") {
    TempDir tmp("cma_cli_det");
    fs::path cfg = tmp.path / "cfg.json";
    write_config(cfg, (tmp.path / "data").string(), (tmp.path / "r1").string());
    REQUIRE(run("generate --config " + cfg.string()) == 0);
    REQUIRE(run("train --config " + cfg.string()) == 0);
    REQUIRE(run("train --config " + cfg.string() + " --out " + (tmp.path / "r2").string()) == 0);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    };
    CHECK(slurp(tmp.path / "r1/checkpoint.cmae") == slurp(tmp.path / "r2/checkpoint.cmae"));
}
