#include "mtstereo/image.hpp"

#include <algorithm>
#include <string>

namespace mts {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("image dimensions must be positive, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
    }
}

}  // namespace

GrayImage::GrayImage(int width, int height, float fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("image data length does not match width*height");
    }
}

float GrayImage::clamped(int x, int y) const {
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return data_[index(x, y)];
}

QuantizedImage::QuantizedImage(int width, int height, int levels, std::vector<Level> data)
    : width_(width), height_(height), levels_(levels), data_(std::move(data)) {
    check_dims(width, height);
    if (levels < 2) {
        throw std::invalid_argument("quantized image needs at least 2 levels");
    }
    if (data_.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("image data length does not match width*height");
    }
    for (Level v : data_) {
        if (v >= levels) {
            throw std::invalid_argument("quantized value out of range");
        }
    }
}

double disparity_to_depth(double disparity_px, const CameraParams& cam) {
    if (!(cam.baseline_m > 0.0) || !(cam.focal_px > 0.0)) {
        throw std::domain_error("camera baseline and focal length must be positive");
    }
    if (!(disparity_px > 0.0)) {
        throw std::domain_error("disparity must be positive to convert to depth");
    }
    return cam.baseline_m * cam.focal_px / disparity_px;
}

double depth_to_disparity(double depth_m, const CameraParams& cam) {
    if (!(depth_m > 0.0)) {
        throw std::domain_error("depth must be positive to convert to disparity");
    }
    return disparity_to_depth(depth_m, cam);
}

}  // namespace mts
