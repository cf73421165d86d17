#include "cma/toolkit/config.hpp"

#include <set>

#include <json.hpp>

#include "cma/errors.hpp"
#include "cma/fsutil.hpp"

namespace cma {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown config key '" + it.key() + "' in " + where);
}

template <typename T>
void get_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void parse_arch(const json& j, ArchConfig& a) {
    check_keys(j,
               {"in_channels", "patch_size", "layers", "channels", "latent_dim", "memory_items",
                "shrink_eps", "leaky_slope", "renorm", "frm_update", "mode"},
               "arch");
    get_opt(j, "in_channels", a.in_channels);
    get_opt(j, "patch_size", a.patch_size);
    if (j.contains("layers")) {
        a.layers.clear();
        for (const auto& l : j.at("layers")) a.layers.push_back({l.at(0).get<int>(), l.at(1).get<int>()});
    }
    get_opt(j, "channels", a.channels);
    get_opt(j, "latent_dim", a.latent_dim);
    get_opt(j, "memory_items", a.memory_items);
    get_opt(j, "shrink_eps", a.shrink_eps);
    get_opt(j, "leaky_slope", a.leaky_slope);
    if (j.contains("renorm")) {
        const std::string s = j.at("renorm").get<std::string>();
        if (s == "l1") a.renorm = Renorm::L1;
        else if (s == "l2") a.renorm = Renorm::L2;
        else throw ConfigError("arch.renorm must be l1 or l2");
    }
    if (j.contains("frm_update")) {
        const std::string s = j.at("frm_update").get<std::string>();
        if (s == "forgotten") a.frm_update = FrmUpdate::Forgotten;
        else if (s == "raw") a.frm_update = FrmUpdate::Raw;
        else throw ConfigError("arch.frm_update must be forgotten or raw");
    }
    if (j.contains("mode")) {
        const std::string s = j.at("mode").get<std::string>();
        if (s == "cmam") a.mode = CmamMode::Cmam;
        else if (s == "mam") a.mode = CmamMode::Mam;
        else if (s == "cat") a.mode = CmamMode::Cat;
        else throw ConfigError("arch.mode must be cmam, mam or cat");
    }
}

void parse_train(const json& j, TrainConfig& t) {
    check_keys(j, {"w1", "w2", "alpha", "t1", "t2", "batch_size", "use_stage2", "stage2_target"},
               "train");
    get_opt(j, "w1", t.w1);
    get_opt(j, "w2", t.w2);
    get_opt(j, "alpha", t.alpha);
    get_opt(j, "t1", t.t1);
    get_opt(j, "t2", t.t2);
    get_opt(j, "batch_size", t.batch_size);
    get_opt(j, "use_stage2", t.use_stage2);
    if (j.contains("stage2_target")) {
        const std::string s = j.at("stage2_target").get<std::string>();
        if (s == "clean") t.stage2_target = Stage2Target::Clean;
        else if (s == "anomalous") t.stage2_target = Stage2Target::Anomalous;
        else throw ConfigError("train.stage2_target must be clean or anomalous");
    }
}

}  // namespace

void RunConfig::validate() const {
    if (schema_version != 1) throw ConfigError("unsupported schema_version");
    arch.feature_sizes();  // throws on impossible architectures
    train.validate();
    if (gaaga.crop_size < 8) throw ConfigError("gaaga.crop_size must be >= 8");
    if (dataset.eval_size != 0 && dataset.eval_size % arch.patch_size != 0)
        throw ConfigError("dataset.eval_size must be a multiple of the patch size");
    for (int s : msfr.scales)
        if (s < 1 || s > static_cast<int>(arch.layers.size()))
            throw ConfigError("msfr.scales entry out of range");
}

namespace {

RunConfig parse_run_config_impl(const json& j) {
    check_keys(j,
               {"schema_version", "seed", "out_dir", "arch", "train", "gaaga", "dataset", "generate",
                "infer", "msfr"},
               "config root");
    RunConfig cfg;
    get_opt(j, "schema_version", cfg.schema_version);
    get_opt(j, "seed", cfg.seed);
    cfg.train.seed = cfg.seed;
    get_opt(j, "out_dir", cfg.out_dir);
    if (j.contains("arch")) parse_arch(j.at("arch"), cfg.arch);
    if (j.contains("train")) {
        parse_train(j.at("train"), cfg.train);
        cfg.train.seed = cfg.seed;
    }
    if (j.contains("gaaga")) {
        const auto& g = j.at("gaaga");
        check_keys(g, {"crop_size", "paste_mode", "blur_sigma_min", "blur_sigma_max", "pool_dir"},
                   "gaaga");
        get_opt(g, "crop_size", cfg.gaaga.crop_size);
        get_opt(g, "blur_sigma_min", cfg.gaaga.blur_sigma_min);
        get_opt(g, "blur_sigma_max", cfg.gaaga.blur_sigma_max);
        get_opt(g, "pool_dir", cfg.gaaga_pool_dir);
        if (g.contains("paste_mode")) {
            const std::string s = g.at("paste_mode").get<std::string>();
            if (s == "both") cfg.gaaga.paste_mode = PasteMode::Both;
            else if (s == "one-of") cfg.gaaga.paste_mode = PasteMode::OneOf;
            else throw ConfigError("gaaga.paste_mode must be both or one-of");
        }
    }
    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        check_keys(d, {"root", "layout", "category", "eval_size"}, "dataset");
        get_opt(d, "root", cfg.dataset.root);
        get_opt(d, "category", cfg.dataset.category);
        get_opt(d, "eval_size", cfg.dataset.eval_size);
        if (d.contains("layout")) {
            const std::string s = d.at("layout").get<std::string>();
            if (s == "synthetic") cfg.dataset.layout = DatasetKind::Synthetic;
            else if (s == "mvtec") cfg.dataset.layout = DatasetKind::Mvtec;
            else if (s == "dagm") cfg.dataset.layout = DatasetKind::Dagm;
            else throw ConfigError("dataset.layout must be synthetic, mvtec or dagm");
        }
    }
    if (j.contains("generate")) {
        const auto& g = j.at("generate");
        check_keys(g,
                   {"pattern", "period", "orientation", "noise_sigma", "height", "width",
                    "train_good", "test_good", "test_defect", "synthetic_negatives"},
                   "generate");
        get_opt(g, "pattern", cfg.generate.pattern);
        get_opt(g, "period", cfg.generate.period);
        get_opt(g, "orientation", cfg.generate.orientation);
        get_opt(g, "noise_sigma", cfg.generate.noise_sigma);
        get_opt(g, "height", cfg.generate.height);
        get_opt(g, "width", cfg.generate.width);
        get_opt(g, "train_good", cfg.generate.train_good);
        get_opt(g, "test_good", cfg.generate.test_good);
        get_opt(g, "test_defect", cfg.generate.test_defect);
        get_opt(g, "synthetic_negatives", cfg.generate.synthetic_negatives);
    }
    if (j.contains("infer")) {
        const auto& i = j.at("infer");
        check_keys(i, {"tile_stride"}, "infer");
        get_opt(i, "tile_stride", cfg.infer_tile_stride);
    }
    if (j.contains("msfr")) {
        const auto& m = j.at("msfr");
        check_keys(m, {"scales", "use_msfr", "roc_csv"}, "msfr");
        get_opt(m, "scales", cfg.msfr.scales);
        get_opt(m, "use_msfr", cfg.msfr.use_msfr);
        get_opt(m, "roc_csv", cfg.roc_csv);
    }
    cfg.validate();
    return cfg;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return parse_run_config_impl(j);
    } catch (const json::exception& e) {
        // wrong value types surface here (e.g. a string where a number belongs)
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

RunConfig load_run_config(const std::string& path) {
    std::string text;
    try {
        text = read_text(path);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("cannot read config: ") + e.what());
    }
    return parse_run_config(text);
}

}  // namespace cma
