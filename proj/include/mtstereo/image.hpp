#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace mts {

/// Row-major single-channel float raster. Loaded images carry intensities in
/// 0..255; filter outputs (e.g. Sobel responses) may be signed.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, float fill = 0.0f);
    GrayImage(int width, int height, std::vector<float> data);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    float at(int x, int y) const { return data_[index(x, y)]; }
    float& at(int x, int y) { return data_[index(x, y)]; }

    /// Clamp-to-edge access.
    float clamped(int x, int y) const;

    std::span<const float> row(int y) const {
        return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
    }
    std::span<float> row(int y) {
        return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
    }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }

    bool same_shape(const GrayImage& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

/// Edge image reduced to `levels` gray levels, values in [0, levels-1].
class QuantizedImage {
public:
    using Level = std::uint16_t;

    QuantizedImage() = default;
    QuantizedImage(int width, int height, int levels, std::vector<Level> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int levels() const { return levels_; }

    Level at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    std::span<const Level> row(int y) const {
        return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
    }
    const std::vector<Level>& data() const { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    int levels_ = 0;
    std::vector<Level> data_;
};

struct CameraParams {
    double baseline_m;
    double focal_px;
};

/// Depth in meters of a point seen at disparity `disparity_px`: z = B*f/d.
/// Throws std::domain_error for d <= 0 or invalid camera parameters.
double disparity_to_depth(double disparity_px, const CameraParams& cam);

/// Inverse of disparity_to_depth.
double depth_to_disparity(double depth_m, const CameraParams& cam);

}  // namespace mts
