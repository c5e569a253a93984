#include "mtstereo/pnm.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace mts {

namespace {

using Kind = PnmError::Kind;

class HeaderReader {
public:
    explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

    std::string_view magic() {
        if (bytes_.size() < 2) {
            throw PnmError(Kind::MalformedHeader, "file too short for a magic number");
        }
        pos_ = 2;
        return bytes_.substr(0, 2);
    }

    std::string_view token() {
        skip_space_and_comments();
        std::size_t start = pos_;
        while (pos_ < bytes_.size() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#') {
            ++pos_;
        }
        if (start == pos_) {
            throw PnmError(Kind::MalformedHeader, "unexpected end of header");
        }
        return bytes_.substr(start, pos_ - start);
    }

    long integer(const char* what) {
        std::string_view tok = token();
        long value = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            throw PnmError(Kind::MalformedHeader, std::string("invalid ") + what + " '" +
                                                      std::string(tok) + "'");
        }
        return value;
    }

    double real(const char* what) {
        std::string_view tok = token();
        double value = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            throw PnmError(Kind::MalformedHeader, std::string("invalid ") + what + " '" +
                                                      std::string(tok) + "'");
        }
        return value;
    }

    // Exactly one whitespace byte separates the header from a binary raster.
    std::string_view binary_payload() {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
            throw PnmError(Kind::MalformedHeader, "missing separator before raster");
        }
        return bytes_.substr(pos_ + 1);
    }

    std::size_t position() const { return pos_; }

private:
    static bool is_space(char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

void check_size(long width, long height) {
    if (width < 1 || height < 1 || width > (1L << 20) || height > (1L << 20)) {
        throw PnmError(Kind::MalformedHeader, "image dimensions out of range");
    }
}

float luma(double r, double g, double b) {
    return static_cast<float>(0.299 * r + 0.587 * g + 0.114 * b);
}

}  // namespace

GrayImage decode_pnm(std::string_view bytes) {
    HeaderReader reader(bytes);
    std::string_view magic = reader.magic();
    const bool binary = magic == "P5" || magic == "P6";
    const bool ascii = magic == "P2" || magic == "P3";
    if (!binary && !ascii) {
        throw PnmError(Kind::UnsupportedMagic, "unsupported magic '" + std::string(magic) + "'");
    }
    const int channels = (magic == "P6" || magic == "P3") ? 3 : 1;

    const long width = reader.integer("width");
    const long height = reader.integer("height");
    check_size(width, height);
    const long maxval = reader.integer("maxval");
    if (maxval < 1 || maxval > 65535) {
        throw PnmError(Kind::MalformedHeader, "maxval must be in [1, 65535]");
    }

    const std::size_t count = static_cast<std::size_t>(width) * height * channels;
    std::vector<double> samples(count);

    if (binary) {
        std::string_view payload = reader.binary_payload();
        const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
        if (payload.size() < count * bytes_per_sample) {
            throw PnmError(Kind::Truncated, "raster is truncated");
        }
        const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
        for (std::size_t i = 0; i < count; ++i) {
            unsigned v = bytes_per_sample == 2 ? (unsigned{p[2 * i]} << 8) | p[2 * i + 1] : p[i];
            if (v > static_cast<unsigned>(maxval)) {
                throw PnmError(Kind::MalformedHeader, "sample exceeds maxval");
            }
            samples[i] = v;
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            long v = 0;
            try {
                v = reader.integer("sample");
            } catch (const PnmError&) {
                throw PnmError(Kind::Truncated, "ASCII raster is truncated or malformed");
            }
            if (v < 0 || v > maxval) {
                throw PnmError(Kind::MalformedHeader, "sample exceeds maxval");
            }
            samples[i] = static_cast<double>(v);
        }
    }

    const double scale = 255.0 / static_cast<double>(maxval);
    std::vector<float> out(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (channels == 1) {
            out[i] = static_cast<float>(samples[i] * scale);
        } else {
            out[i] = luma(samples[3 * i] * scale, samples[3 * i + 1] * scale,
                          samples[3 * i + 2] * scale);
        }
    }
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(out));
}

std::string encode_pgm_samples(int width, int height, std::span<const std::uint16_t> samples,
                               int maxval) {
    if (maxval < 1 || maxval > 65535) {
        throw std::invalid_argument("maxval must be in [1, 65535]");
    }
    if (samples.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("sample count does not match dimensions");
    }
    std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
                      std::to_string(maxval) + "\n";
    const bool wide = maxval > 255;
    out.reserve(out.size() + samples.size() * (wide ? 2 : 1));
    for (std::uint16_t v : samples) {
        if (wide) {
            out.push_back(static_cast<char>(v >> 8));
        }
        out.push_back(static_cast<char>(v & 0xff));
    }
    return out;
}

std::string encode_pgm(const GrayImage& img, int maxval) {
    std::vector<std::uint16_t> samples(img.size());
    const double scale = static_cast<double>(maxval) / 255.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double v = std::round(static_cast<double>(img.data()[i]) * scale);
        samples[i] = static_cast<std::uint16_t>(std::clamp(v, 0.0, static_cast<double>(maxval)));
    }
    return encode_pgm_samples(img.width(), img.height(), samples, maxval);
}

GrayImage decode_pfm(std::string_view bytes) {
    HeaderReader reader(bytes);
    std::string_view magic = reader.magic();
    if (magic == "PF") {
        throw PnmError(Kind::UnsupportedMagic, "color PFM ('PF') is not supported");
    }
    if (magic != "Pf") {
        throw PnmError(Kind::UnsupportedMagic, "unsupported magic '" + std::string(magic) + "'");
    }
    const long width = reader.integer("width");
    const long height = reader.integer("height");
    check_size(width, height);
    const double scale = reader.real("scale");
    if (scale == 0.0 || !std::isfinite(scale)) {
        throw PnmError(Kind::MalformedHeader, "PFM scale must be a non-zero number");
    }
    const bool little = scale < 0.0;

    std::string_view payload = reader.binary_payload();
    const std::size_t count = static_cast<std::size_t>(width) * height;
    if (payload.size() < count * 4) {
        throw PnmError(Kind::Truncated, "PFM raster is truncated");
    }

    std::vector<float> out(count);
    const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
    for (long row = 0; row < height; ++row) {
        // bottom-to-top storage
        const long y = height - 1 - row;
        for (long x = 0; x < width; ++x) {
            const unsigned char* s = p + 4 * (static_cast<std::size_t>(row) * width + x);
            std::uint32_t bits = little ? (std::uint32_t{s[0]} | std::uint32_t{s[1]} << 8 |
                                           std::uint32_t{s[2]} << 16 | std::uint32_t{s[3]} << 24)
                                        : (std::uint32_t{s[3]} | std::uint32_t{s[2]} << 8 |
                                           std::uint32_t{s[1]} << 16 | std::uint32_t{s[0]} << 24);
            out[static_cast<std::size_t>(y) * width + x] = std::bit_cast<float>(bits);
        }
    }
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(out));
}

std::string encode_pfm(const GrayImage& img) {
    std::string out = "Pf\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                      "\n-1.0\n";
    out.reserve(out.size() + img.size() * 4);
    for (int y = img.height() - 1; y >= 0; --y) {
        for (float v : img.row(y)) {
            const auto bits = std::bit_cast<std::uint32_t>(v);
            for (int b = 0; b < 4; ++b) {
                out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
            }
        }
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw PnmError(Kind::Io, "cannot open '" + path.string() + "'");
    }
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw PnmError(Kind::Io, "cannot write '" + path.string() + "'");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw PnmError(Kind::Io, "write failed for '" + path.string() + "'");
    }
}

GrayImage load_pgm(const std::filesystem::path& path) {
    return decode_pnm(read_file(path));
}

void save_pgm(const std::filesystem::path& path, const GrayImage& img, int maxval) {
    write_file(path, encode_pgm(img, maxval));
}

GrayImage load_pfm(const std::filesystem::path& path) {
    return decode_pfm(read_file(path));
}

void save_pfm(const std::filesystem::path& path, const GrayImage& img) {
    write_file(path, encode_pfm(img));
}

}  // namespace mts
