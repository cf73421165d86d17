#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "cma/errors.hpp"

namespace cma {

// Writes via a temp file in the same directory, then renames into place, so
// interrupted runs never leave a partially written artifact. The temp file
// keeps the target extension (image codecs dispatch on it).
template <typename WriteFn>
void atomic_file_write(const std::string& path, WriteFn&& write) {
    namespace fs = std::filesystem;
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    fs::path tmp = p.parent_path() /
                   (p.stem().string() + ".tmp-" + std::to_string(::getpid()) + p.extension().string());
    try {
        write(tmp.string());
        fs::rename(tmp, p);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

inline void atomic_write_text(const std::string& path, const std::string& text) {
    atomic_file_write(path, [&](const std::string& tmp) {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw DataError("cannot open for write: " + path);
        f << text;
        if (!f.good()) throw DataError("write failed: " + path);
    });
}

inline std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open: " + path);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

}  // namespace cma
