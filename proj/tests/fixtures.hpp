#pragma once

// Temporary directories and synthetic benchmark-format data for CLI tests.

#include <filesystem>
#include <random>
#include <string>

#include "mtstereo/pnm.hpp"
#include "oracles.hpp"

namespace mts::fixture {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("mts_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Writes <name>_left.pgm, <name>_right.pgm and, if asked, a constant-shift
/// <name>_gt.pfm into `dir`; returns the index line for the pair.
inline std::string write_shifted_pair(const std::filesystem::path& dir, const std::string& name,
                                      int width, int height, int shift, unsigned seed, bool with_gt) {
    const auto [left, right] = oracle::shifted_pair(width, height, shift, seed);
    save_pgm(dir / (name + "_left.pgm"), left);
    save_pgm(dir / (name + "_right.pgm"), right);
    std::string line = name + "," + name + "_left.pgm," + name + "_right.pgm";
    if (with_gt) {
        save_pfm(dir / (name + "_gt.pfm"), GrayImage(width, height, static_cast<float>(shift)));
        line += "," + name + "_gt.pfm";
    }
    return line;
}

}  // namespace mts::fixture
