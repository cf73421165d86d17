#include "cma/toolkit/dataset.hpp"

#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "cma/errors.hpp"
#include "cma/fsutil.hpp"

namespace cma {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<fs::path> sorted_images(const fs::path& dir) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        auto ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".tif" ||
            ext == ".tiff")
            out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Image binarize(const Image& img) {
    Image m = to_grayscale(img);
    for (auto& p : m.v) p = p >= 0.5 ? 1.0 : 0.0;
    return m;
}

std::string two_digit(int i) { return (i < 10 ? "0" : "") + std::to_string(i); }

}  // namespace

// MVTec roots hold one subdirectory per category; an empty category means the
// root already points inside one.
fs::path mvtec_base(const DatasetConfig& ds) {
    fs::path root(ds.root);
    return ds.category.empty() ? root : root / ds.category;
}

std::vector<Image> load_train_good(const DatasetConfig& ds) {
    fs::path root(ds.root);
    fs::path dir;
    switch (ds.layout) {
        case DatasetKind::Synthetic: dir = root / "train" / "good"; break;
        case DatasetKind::Mvtec: dir = mvtec_base(ds) / "train" / "good"; break;
        case DatasetKind::Dagm:
            dir = ds.category.empty() ? root / "Train" : root / ds.category / "Train";
            break;
    }
    std::vector<Image> out;
    for (const auto& p : sorted_images(dir)) {
        // DAGM training folders mix defective samples in; skip any image with
        // a label file next to it.
        if (ds.layout == DatasetKind::Dagm) {
            fs::path lbl = dir / "Label" / (p.stem().string() + "_label.PNG");
            if (fs::exists(lbl)) continue;
        }
        out.push_back(load_image(p.string()));
    }
    if (out.empty()) throw DataError("no training images under " + dir.string());
    return out;
}

std::vector<TestItem> load_test_set(const DatasetConfig& ds) {
    fs::path root(ds.root);
    std::vector<TestItem> items;

    auto add_good = [&](const fs::path& dir) {
        for (const auto& p : sorted_images(dir)) {
            TestItem it;
            it.name = "good/" + p.filename().string();
            it.image = load_image(p.string());
            it.mask = Image(it.image.h, it.image.w, 1);
            items.push_back(std::move(it));
        }
    };
    auto add_defect = [&](const fs::path& dir, const fs::path& mask_dir, const std::string& suffix) {
        for (const auto& p : sorted_images(dir)) {
            TestItem it;
            it.name = dir.filename().string() + "/" + p.filename().string();
            it.image = load_image(p.string());
            fs::path mp = mask_dir / (p.stem().string() + suffix);
            if (!fs::exists(mp)) throw DataError("missing ground-truth mask: " + mp.string());
            it.mask = binarize(load_image(mp.string()));
            if (it.mask.h != it.image.h || it.mask.w != it.image.w)
                throw DataError("mask size mismatch for " + it.name);
            items.push_back(std::move(it));
        }
    };

    switch (ds.layout) {
        case DatasetKind::Synthetic:
            add_good(root / "test" / "good");
            add_defect(root / "test" / "defect", root / "ground_truth" / "defect", "_mask.png");
            break;
        case DatasetKind::Mvtec: {
            fs::path base = mvtec_base(ds);
            fs::path test = base / "test";
            if (!fs::is_directory(test)) throw DataError("no test directory under " + base.string());
            std::vector<fs::path> cats;
            for (const auto& e : fs::directory_iterator(test))
                if (e.is_directory()) cats.push_back(e.path());
            std::sort(cats.begin(), cats.end());
            for (const auto& c : cats) {
                if (c.filename() == "good")
                    add_good(c);
                else
                    add_defect(c, base / "ground_truth" / c.filename(), "_mask.png");
            }
            break;
        }
        case DatasetKind::Dagm: {
            fs::path dir = ds.category.empty() ? root / "Test" : root / ds.category / "Test";
            fs::path lbl = dir / "Label";
            for (const auto& p : sorted_images(dir)) {
                TestItem it;
                it.name = p.filename().string();
                it.image = load_image(p.string());
                fs::path mp = lbl / (p.stem().string() + "_label.PNG");
                if (fs::exists(mp)) {
                    it.mask = binarize(load_image(mp.string()));
                } else {
                    it.mask = Image(it.image.h, it.image.w, 1);
                }
                items.push_back(std::move(it));
            }
            break;
        }
    }
    if (items.empty()) throw DataError("empty test set under " + root.string());
    return items;
}

std::vector<AnomalySample> load_synthetic_negatives(const DatasetConfig& ds) {
    fs::path dir = fs::path(ds.root) / "train" / "synthetic";
    std::vector<AnomalySample> out;
    for (const auto& p : sorted_images(dir)) {
        const std::string stem = p.stem().string();
        if (stem.size() > 5 && (stem.ends_with("_mask") || stem.ends_with("_clean"))) continue;
        AnomalySample s;
        s.anomalous = load_image(p.string());
        fs::path mp = dir / (stem + "_mask.png");
        fs::path cp = dir / (stem + "_clean.png");
        if (!fs::exists(mp) || !fs::exists(cp))
            throw DataError("synthetic sample missing mask/clean: " + p.string());
        s.mask = binarize(load_image(mp.string()));
        s.clean = load_image(cp.string());
        out.push_back(std::move(s));
    }
    return out;
}

NaturalPool load_pool(const RunConfig& cfg) {
    if (!cfg.gaaga_pool_dir.empty()) return NaturalPool::from_directory(cfg.gaaga_pool_dir);
    return NaturalPool::builtin();
}

void emit_synthetic_dataset(const RunConfig& cfg) {
    const auto& g = cfg.generate;
    TextureSpec spec;
    spec.pattern = texture_pattern_from_string(g.pattern);
    spec.period = g.period;
    spec.orientation = g.orientation;
    spec.noise_sigma = g.noise_sigma;
    spec.height = g.height;
    spec.width = g.width;
    spec.validate();

    fs::path root(cfg.dataset.root.empty() ? cfg.out_dir : cfg.dataset.root);
    fs::create_directories(root / "train" / "good");
    fs::create_directories(root / "test" / "good");
    fs::create_directories(root / "test" / "defect");
    fs::create_directories(root / "ground_truth" / "defect");

    Rng rng(cfg.seed);
    for (int i = 0; i < g.train_good; ++i)
        save_image(synth_texture(spec, rng), (root / "train" / "good" / (two_digit(i) + ".png")).string());
    for (int i = 0; i < g.test_good; ++i)
        save_image(synth_texture(spec, rng), (root / "test" / "good" / (two_digit(i) + ".png")).string());
    for (int i = 0; i < g.test_defect; ++i) {
        Image base = synth_texture(spec, rng);
        InjectedDefect d = inject_synthetic_defect(base, rng);
        save_image(d.image, (root / "test" / "defect" / (two_digit(i) + ".png")).string());
        save_image(d.mask, (root / "ground_truth" / "defect" / (two_digit(i) + "_mask.png")).string());
    }

    if (g.synthetic_negatives > 0) {
        fs::create_directories(root / "train" / "synthetic");
        NaturalPool pool = load_pool(cfg);
        for (int i = 0; i < g.synthetic_negatives; ++i) {
            Image base = synth_texture(spec, rng);
            AnomalySample s = generate(base, pool, rng, cfg.gaaga);
            const std::string stem = two_digit(i);
            save_image(s.anomalous, (root / "train" / "synthetic" / (stem + ".png")).string());
            save_image(s.mask, (root / "train" / "synthetic" / (stem + "_mask.png")).string());
            save_image(s.clean, (root / "train" / "synthetic" / (stem + "_clean.png")).string());
        }
    }

    json manifest;
    manifest["seed"] = cfg.seed;
    manifest["pattern"] = g.pattern;
    manifest["period"] = g.period;
    manifest["orientation"] = g.orientation;
    manifest["noise_sigma"] = g.noise_sigma;
    manifest["size"] = {g.height, g.width};
    manifest["train_good"] = g.train_good;
    manifest["test_good"] = g.test_good;
    manifest["test_defect"] = g.test_defect;
    manifest["synthetic_negatives"] = g.synthetic_negatives;
    manifest["gaaga"] = {{"crop_size", cfg.gaaga.crop_size},
                         {"paste_mode", cfg.gaaga.paste_mode == PasteMode::Both ? "both" : "one-of"},
                         {"blur_sigma", {cfg.gaaga.blur_sigma_min, cfg.gaaga.blur_sigma_max}}};
    atomic_write_text((root / "manifest.json").string(), manifest.dump(2) + "\n");
}

}  // namespace cma
