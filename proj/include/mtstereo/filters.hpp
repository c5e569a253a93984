#pragma once

#include "mtstereo/image.hpp"

namespace mts {

/// Median of the (2r+1)x(2r+1) window around each pixel, clamp-to-edge borders.
GrayImage median_filter(const GrayImage& img, int radius, int threads = 1);

/// Horizontal-gradient Sobel response, kernel [-1 0 1; -2 0 2; -1 0 1] applied as
/// a correlation with clamp-to-edge borders. Output is signed.
GrayImage sobel_h(const GrayImage& img);

/// Vertical-gradient Sobel response, kernel [-1 -2 -1; 0 0 0; 1 2 1].
GrayImage sobel_v(const GrayImage& img);

/// (|sobel_h| + |sobel_v|) / 2.
GrayImage edge_magnitude(const GrayImage& img);

/// Inverts an edge image (max(E) - E), stretches it linearly to [0, 255] and
/// quantizes with floor(v*q/256) clamped to q-1. A flat input maps to all zeros.
QuantizedImage quantize_edges(const GrayImage& edges, int levels);

/// Edge detection followed by quantize_edges: bright output levels are
/// low-contrast regions, level 0 the strongest edges.
QuantizedImage preprocess(const GrayImage& img, int levels);

}  // namespace mts
