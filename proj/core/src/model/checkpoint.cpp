#include "cma/model/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "cma/errors.hpp"
#include "cma/fsutil.hpp"

namespace cma {

namespace {

constexpr char kMagic[4] = {'C', 'M', 'A', 'E'};
constexpr uint32_t kVersion = 1;

using nlohmann::json;

json arch_to_json(const ArchConfig& a) {
    json layers = json::array();
    for (const auto& l : a.layers) layers.push_back({l.kernel, l.stride});
    return json{{"in_channels", a.in_channels},
                {"patch_size", a.patch_size},
                {"layers", layers},
                {"channels", a.channels},
                {"latent_dim", a.latent_dim},
                {"memory_items", a.memory_items},
                {"shrink_eps", a.shrink_eps},
                {"leaky_slope", a.leaky_slope},
                {"renorm", a.renorm == Renorm::L1 ? "l1" : "l2"},
                {"frm_update", a.frm_update == FrmUpdate::Forgotten ? "forgotten" : "raw"},
                {"mode", a.mode == CmamMode::Cmam ? "cmam" : (a.mode == CmamMode::Mam ? "mam" : "cat")}};
}

ArchConfig arch_from_json(const json& j) {
    ArchConfig a;
    a.in_channels = j.at("in_channels").get<int>();
    a.patch_size = j.at("patch_size").get<int>();
    a.layers.clear();
    for (const auto& l : j.at("layers")) a.layers.push_back({l.at(0).get<int>(), l.at(1).get<int>()});
    a.channels = j.at("channels").get<std::vector<int>>();
    a.latent_dim = j.at("latent_dim").get<int>();
    a.memory_items = j.at("memory_items").get<int>();
    a.shrink_eps = j.at("shrink_eps").get<double>();
    a.leaky_slope = j.at("leaky_slope").get<double>();
    const std::string rn = j.at("renorm").get<std::string>();
    a.renorm = rn == "l2" ? Renorm::L2 : Renorm::L1;
    const std::string fu = j.at("frm_update").get<std::string>();
    a.frm_update = fu == "raw" ? FrmUpdate::Raw : FrmUpdate::Forgotten;
    const std::string md = j.at("mode").get<std::string>();
    a.mode = md == "mam" ? CmamMode::Mam : (md == "cat" ? CmamMode::Cat : CmamMode::Cmam);
    return a;
}

}  // namespace

void save_checkpoint(CmaModel& model, const std::string& path) {
    json header;
    header["format_version"] = kVersion;
    header["arch"] = arch_to_json(model.arch());
    header["stage"] = static_cast<int>(model.stage());
    const std::string hs = header.dump();

    atomic_file_write(path, [&](const std::string& tmp) {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw DataError("cannot open checkpoint for write: " + path);
        f.write(kMagic, 4);
        uint64_t hlen = hs.size();
        f.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
        f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
        const auto ps = model.params();
        uint32_t count = static_cast<uint32_t>(ps.size());
        f.write(reinterpret_cast<const char*>(&count), sizeof(count));
        for (const auto& p : ps) {
            uint32_t nlen = static_cast<uint32_t>(p.name.size());
            f.write(reinterpret_cast<const char*>(&nlen), sizeof(nlen));
            f.write(p.name.data(), nlen);
            uint64_t sz = static_cast<uint64_t>(p.size);
            f.write(reinterpret_cast<const char*>(&sz), sizeof(sz));
            f.write(reinterpret_cast<const char*>(p.data), static_cast<std::streamsize>(sz * sizeof(double)));
        }
        if (!f.good()) throw DataError("checkpoint write failed: " + path);
    });
}

CmaModel load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open checkpoint: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f.good() || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError("not a checkpoint file: " + path);
    uint64_t hlen = 0;
    f.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    std::string hs(hlen, '\0');
    f.read(hs.data(), static_cast<std::streamsize>(hlen));
    json header = json::parse(hs);
    if (header.at("format_version").get<uint32_t>() != kVersion)
        throw DataError("unsupported checkpoint version");

    CmaModel model(arch_from_json(header.at("arch")), 0);
    model.set_stage(static_cast<TrainStage>(header.at("stage").get<int>()));

    auto ps = model.params();
    uint32_t count = 0;
    f.read(reinterpret_cast<char*>(&count), sizeof(count));
    if (count != ps.size()) throw DataError("checkpoint parameter count mismatch");
    for (auto& p : ps) {
        uint32_t nlen = 0;
        f.read(reinterpret_cast<char*>(&nlen), sizeof(nlen));
        std::string name(nlen, '\0');
        f.read(name.data(), nlen);
        uint64_t sz = 0;
        f.read(reinterpret_cast<char*>(&sz), sizeof(sz));
        if (name != p.name || sz != static_cast<uint64_t>(p.size))
            throw DataError("checkpoint parameter mismatch at " + name);
        f.read(reinterpret_cast<char*>(p.data), static_cast<std::streamsize>(sz * sizeof(double)));
    }
    if (!f.good()) throw DataError("truncated checkpoint: " + path);
    return model;
}

}  // namespace cma
