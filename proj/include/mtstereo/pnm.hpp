#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mtstereo/image.hpp"

namespace mts {

class PnmError : public std::runtime_error {
public:
    enum class Kind { Io, UnsupportedMagic, MalformedHeader, Truncated };

    PnmError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// PGM/PPM ("P5", "P2", and color "P6", "P3"). Samples are scaled to 0..255 as
// 255*v/maxval; color is reduced to luma 0.299R + 0.587G + 0.114B.
GrayImage decode_pnm(std::string_view bytes);
GrayImage load_pgm(const std::filesystem::path& path);

/// Binary P5 with header "P5\n<w> <h>\n<maxval>\n". Samples are round(v*maxval/255),
/// clamped; two big-endian bytes per sample when maxval > 255.
std::string encode_pgm(const GrayImage& img, int maxval = 255);
void save_pgm(const std::filesystem::path& path, const GrayImage& img, int maxval = 255);

/// Raw P5 writer for integer samples already in [0, maxval].
std::string encode_pgm_samples(int width, int height, std::span<const std::uint16_t> samples,
                               int maxval);

// Grayscale PFM ("Pf"). A negative scale means little-endian payload, positive
// big-endian. Rows are stored bottom-to-top. Non-finite samples are kept as-is.
GrayImage decode_pfm(std::string_view bytes);
GrayImage load_pfm(const std::filesystem::path& path);

/// Writes "Pf\n<w> <h>\n-1.0\n" followed by little-endian floats.
std::string encode_pfm(const GrayImage& img);
void save_pfm(const std::filesystem::path& path, const GrayImage& img);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace mts
