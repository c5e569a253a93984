#include "mtstereo/cost_volume.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mtstereo/filters.hpp"
#include "mtstereo/parallel.hpp"

namespace mts {

void CostWeights::validate() const {
    if (gray < 0.0 || sobel_h < 0.0 || sobel_v < 0.0) {
        throw std::invalid_argument("cost weights must be non-negative");
    }
    if (std::abs(gray + sobel_h + sobel_v - 1.0) > 1e-9) {
        throw std::invalid_argument("cost weights must sum to 1");
    }
}

CostVolume::CostVolume(int width, int height, int max_disparity)
    : width_(width), height_(height), dmax_(max_disparity) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("cost volume dimensions must be positive");
    }
    if (max_disparity < 1) {
        throw std::invalid_argument("max disparity must be at least 1");
    }
    cost_.assign(slice_size() * static_cast<std::size_t>(max_disparity), kInvalid);
}

float CostVolume::max_valid_cost() const {
    float best = 0.0f;
    for (float c : cost_) {
        if (c != kInvalid) {
            best = std::max(best, c);
        }
    }
    return best;
}

CostVolume compute_cost_volume(const GrayImage& left, const GrayImage& right, int max_disparity,
                               const CostWeights& weights, int threads) {
    if (!left.same_shape(right)) {
        throw std::invalid_argument("dimension mismatch between left and right images");
    }
    weights.validate();
    CostVolume cv(left.width(), left.height(), max_disparity);

    const GrayImage lh = sobel_h(left);
    const GrayImage lv = sobel_v(left);
    const GrayImage rh = sobel_h(right);
    const GrayImage rv = sobel_v(right);
    const auto wg = static_cast<float>(weights.gray);
    const auto wh = static_cast<float>(weights.sobel_h);
    const auto wv = static_cast<float>(weights.sobel_v);
    const int width = left.width();

    parallel_for(0, max_disparity, threads, [&](int d) {
        for (int y = 0; y < left.height(); ++y) {
            const auto l = left.row(y), r = right.row(y);
            const auto lhr = lh.row(y), rhr = rh.row(y);
            const auto lvr = lv.row(y), rvr = rv.row(y);
            float* out = cv.slice(d).data() + static_cast<std::size_t>(y) * width;
            for (int x = d; x < width; ++x) {
                out[x] = wg * std::abs(l[x] - r[x - d]) + wh * std::abs(lhr[x] - rhr[x - d]) +
                         wv * std::abs(lvr[x] - rvr[x - d]);
            }
        }
    });
    return cv;
}

std::vector<double> gaussian_kernel(int window) {
    if (window < 1 || window % 2 == 0) {
        throw std::invalid_argument("Gaussian window must be odd and positive, got " +
                                    std::to_string(window));
    }
    const int radius = window / 2;
    const double sigma = window / 6.0;
    std::vector<double> taps(static_cast<std::size_t>(window));
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        const double v = std::exp(-0.5 * (k * k) / (sigma * sigma));
        taps[static_cast<std::size_t>(k + radius)] = v;
        sum += v;
    }
    for (auto& t : taps) {
        t /= sum;
    }
    return taps;
}

CostVolume smooth_cost_volume(CostVolume cv, int window, int threads) {
    const std::vector<double> taps64 = gaussian_kernel(window);
    if (window == 1) {
        return cv;
    }
    const std::vector<float> taps(taps64.begin(), taps64.end());
    const int radius = window / 2;
    const int width = cv.width();
    const int height = cv.height();

    // Validity depends on x only (x >= d), so a full vertical pass followed by a
    // horizontal pass renormalized over valid taps equals the 2D renormalized blur.
    parallel_for(0, cv.max_disparity(), threads, [&](int d) {
        if (d >= width) {
            return;
        }
        std::span<float> slice = cv.slice(d);
        const std::size_t valid_cols = static_cast<std::size_t>(width - d);
        std::vector<float> vertical(static_cast<std::size_t>(width) * height, 0.0f);
        for (int y = 0; y < height; ++y) {
            float* dst = vertical.data() + static_cast<std::size_t>(y) * width + d;
            for (int k = 0; k < window; ++k) {
                const int yy = std::clamp(y + k - radius, 0, height - 1);
                const float* src = slice.data() + static_cast<std::size_t>(yy) * width + d;
                const float g = taps[static_cast<std::size_t>(k)];
                for (std::size_t i = 0; i < valid_cols; ++i) {
                    dst[i] += g * src[i];
                }
            }
        }

        std::vector<float> padded(static_cast<std::size_t>(width + 2 * radius));
        for (int y = 0; y < height; ++y) {
            const float* row = vertical.data() + static_cast<std::size_t>(y) * width;
            for (int i = 0; i < width + 2 * radius; ++i) {
                const int xx = std::clamp(i - radius, 0, width - 1);
                padded[static_cast<std::size_t>(i)] = xx >= d ? row[xx] : 0.0f;
            }
            float* out = slice.data() + static_cast<std::size_t>(y) * width;
            // Near the invalid region some taps fall on x' < d.
            const int full_from = std::min(width, d + radius);
            for (int x = d; x < full_from; ++x) {
                float sum = 0.0f;
                float weight = 0.0f;
                for (int k = 0; k < window; ++k) {
                    const int xx = std::clamp(x + k - radius, 0, width - 1);
                    if (xx >= d) {
                        sum += taps[static_cast<std::size_t>(k)] * padded[static_cast<std::size_t>(x + k)];
                        weight += taps[static_cast<std::size_t>(k)];
                    }
                }
                out[x] = sum / weight;
            }
            for (int x = full_from; x < width; ++x) {
                float sum = 0.0f;
                const float* p = padded.data() + x;
                for (int k = 0; k < window; ++k) {
                    sum += taps[static_cast<std::size_t>(k)] * p[k];
                }
                out[x] = sum;
            }
        }
    });
    return cv;
}

void write_cost_volume(std::ostream& out, const CostVolume& cv) {
    out << cv.width() << ' ' << cv.height() << ' ' << cv.max_disparity() << '\n';
    for (int d = 0; d < cv.max_disparity(); ++d) {
        for (float v : cv.slice(d)) {
            const auto bits = std::bit_cast<std::uint32_t>(v);
            char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                             static_cast<char>((bits >> 16) & 0xff),
                             static_cast<char>((bits >> 24) & 0xff)};
            out.write(bytes, 4);
        }
    }
}

}  // namespace mts
