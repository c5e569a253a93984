#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "mtstereo/image.hpp"

namespace mts {

/// Weights of the gray-level, horizontal Sobel and vertical Sobel absolute
/// differences in the pixel matching cost.
struct CostWeights {
    double gray = 0.5;
    double sobel_h = 0.25;
    double sobel_v = 0.25;

    /// Throws std::invalid_argument unless all weights are >= 0 and sum to 1.
    void validate() const;
};

/// W x H x D matching costs stored slice by slice (fixed disparity), so
/// cost(x, y, d) sits at d*W*H + y*W + x. Entries with x - d < 0 hold kInvalid.
class CostVolume {
public:
    static constexpr float kInvalid = std::numeric_limits<float>::max();

    CostVolume() = default;
    CostVolume(int width, int height, int max_disparity);

    int width() const { return width_; }
    int height() const { return height_; }
    int max_disparity() const { return dmax_; }

    float at(int x, int y, int d) const { return cost_[offset(x, y, d)]; }
    float& at(int x, int y, int d) { return cost_[offset(x, y, d)]; }
    static bool is_valid(float c) { return c != kInvalid; }

    std::span<const float> slice(int d) const { return {cost_.data() + slice_offset(d), slice_size()}; }
    std::span<float> slice(int d) { return {cost_.data() + slice_offset(d), slice_size()}; }

    /// Largest finite cost in the volume, 0 when there is none.
    float max_valid_cost() const;

private:
    std::size_t slice_size() const { return static_cast<std::size_t>(width_) * height_; }
    std::size_t slice_offset(int d) const { return static_cast<std::size_t>(d) * slice_size(); }
    std::size_t offset(int x, int y, int d) const {
        return slice_offset(d) + static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    int dmax_ = 0;
    std::vector<float> cost_;
};

/// cost(x,y,d) = w_g|L-R| + w_h|Lh-Rh| + w_v|Lv-Rv| with R sampled at x-d.
/// Sobel responses are taken from the given (already denoised) images.
CostVolume compute_cost_volume(const GrayImage& left, const GrayImage& right, int max_disparity,
                               const CostWeights& weights, int threads = 1);

/// Normalized 1D Gaussian taps for a window of `window` samples, sigma = window/6.
std::vector<double> gaussian_kernel(int window);

/// Blurs every disparity slice with a window x window Gaussian (sigma = window/6),
/// clamp-to-edge borders. Invalid entries stay invalid and are left out of the
/// normalization of their valid neighbours. `window` must be odd.
CostVolume smooth_cost_volume(CostVolume cv, int window, int threads = 1);

/// Debug dump: text line "W H D\n" followed by little-endian float32 data in
/// slice order.
void write_cost_volume(std::ostream& out, const CostVolume& cv);

}  // namespace mts
