#include "mtstereo/filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mtstereo/parallel.hpp"

namespace mts {

GrayImage median_filter(const GrayImage& img, int radius, int threads) {
    if (radius < 0) {
        throw std::invalid_argument("median radius must be non-negative");
    }
    if (radius == 0) {
        return img;
    }
    GrayImage out(img.width(), img.height());
    const int side = 2 * radius + 1;
    parallel_for(0, img.height(), threads, [&](int y) {
        std::vector<float> window(static_cast<std::size_t>(side) * side);
        for (int x = 0; x < img.width(); ++x) {
            std::size_t k = 0;
            for (int dy = -radius; dy <= radius; ++dy) {
                for (int dx = -radius; dx <= radius; ++dx) {
                    window[k++] = img.clamped(x + dx, y + dy);
                }
            }
            auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
            std::nth_element(window.begin(), mid, window.end());
            out.at(x, y) = *mid;
        }
    });
    return out;
}

namespace {

// 3x3 correlation with the separable kernel smooth^T * diff (or its transpose).
GrayImage sobel(const GrayImage& img, bool horizontal) {
    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            float v;
            if (horizontal) {
                v = (img.clamped(x + 1, y - 1) - img.clamped(x - 1, y - 1)) +
                    2.0f * (img.clamped(x + 1, y) - img.clamped(x - 1, y)) +
                    (img.clamped(x + 1, y + 1) - img.clamped(x - 1, y + 1));
            } else {
                v = (img.clamped(x - 1, y + 1) - img.clamped(x - 1, y - 1)) +
                    2.0f * (img.clamped(x, y + 1) - img.clamped(x, y - 1)) +
                    (img.clamped(x + 1, y + 1) - img.clamped(x + 1, y - 1));
            }
            out.at(x, y) = v;
        }
    }
    return out;
}

}  // namespace

GrayImage sobel_h(const GrayImage& img) { return sobel(img, true); }

GrayImage sobel_v(const GrayImage& img) { return sobel(img, false); }

GrayImage edge_magnitude(const GrayImage& img) {
    GrayImage h = sobel_h(img);
    const GrayImage v = sobel_v(img);
    for (std::size_t i = 0; i < h.size(); ++i) {
        h.data()[i] = (std::abs(h.data()[i]) + std::abs(v.data()[i])) * 0.5f;
    }
    return h;
}

QuantizedImage quantize_edges(const GrayImage& edges, int levels) {
    if (levels < 2) {
        throw std::invalid_argument("quantization needs at least 2 levels");
    }
    const auto [lo_it, hi_it] = std::minmax_element(edges.data().begin(), edges.data().end());
    // Inversion max(E) - E maps [lo, hi] onto [0, hi - lo]; stretching that range
    // to [0, 255] gives 255 * (hi - E) / (hi - lo).
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<QuantizedImage::Level> data(edges.size(), 0);
    if (hi > lo) {
        const double range = hi - lo;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double stretched = 255.0 * (hi - edges.data()[i]) / range;
            const auto level = static_cast<long>(std::floor(stretched * levels / 256.0));
            data[i] = static_cast<QuantizedImage::Level>(std::clamp(level, 0L, long{levels - 1}));
        }
    }
    return QuantizedImage(edges.width(), edges.height(), levels, std::move(data));
}

QuantizedImage preprocess(const GrayImage& img, int levels) {
    return quantize_edges(edge_magnitude(img), levels);
}

}  // namespace mts
