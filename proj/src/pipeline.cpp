#include "mtstereo/pipeline.hpp"

#include <stdexcept>

#include "mtstereo/filters.hpp"
#include "mtstereo/maxtree.hpp"

namespace mts {

StereoParams StereoParams::defaults(MapMode mode) {
    StereoParams p;
    p.refine.mode = mode;
    p.match.quantization_levels = mode == MapMode::Sparse ? 16 : 8;
    p.refine.min_confidence_pixel = mode == MapMode::Sparse ? 12.0 : 4.0;
    return p;
}

int StereoParams::effective_max_disparity(int image_width) const {
    return max_disparity > 0 ? max_disparity : std::max(1, image_width / 3);
}

void StereoParams::validate() const {
    match.validate();
    refine.validate();
    weights.validate();
    if (max_disparity < 0) {
        throw std::invalid_argument("dmax must be non-negative (0 selects width/3)");
    }
    if (median_radius < 0) {
        throw std::invalid_argument("median radius must be non-negative");
    }
    if (cost_window < 1 || cost_window % 2 == 0) {
        throw std::invalid_argument("omega_cv must be odd and positive");
    }
}

StereoStages estimate_stages(const GrayImage& left, const GrayImage& right,
                             const StereoParams& params, int threads) {
    params.validate();
    if (!left.same_shape(right)) {
        throw std::invalid_argument("dimension mismatch between left and right images");
    }
    const int width = left.width();
    const int height = left.height();
    const int dmax = params.effective_max_disparity(width);
    const MapMode mode = params.refine.mode;

    const GrayImage left_clean = median_filter(left, params.median_radius, threads);
    const GrayImage right_clean = median_filter(right, params.median_radius, threads);

    const auto left_trees = build_trees(preprocess(left_clean, params.match.quantization_levels), threads);
    const auto right_trees = build_trees(preprocess(right_clean, params.match.quantization_levels), threads);

    const CostVolume cv = smooth_cost_volume(
        compute_cost_volume(left_clean, right_clean, dmax, params.weights, threads),
        params.cost_window, threads);

    StereoStages s;
    s.node_matches = coarse_to_fine(left_trees, right_trees, cv, params.match, threads);
    const auto finest = s.node_matches.finest();
    s.matched = render(finest, mode, width, height);
    s.filtered = remove_outliers(s.matched, threads);
    s.extrapolated = extrapolate_reliable(left_trees, finest, s.filtered, params.match, threads);
    s.extrapolated_map = render(s.extrapolated, mode, width, height);
    s.refined = guided_pixel_match(cv, s.extrapolated_map, params.refine, threads);
    s.final_map = remove_outliers(s.refined, threads);
    return s;
}

DisparityMap estimate(const GrayImage& left, const GrayImage& right, const StereoParams& params,
                      int threads) {
    return estimate_stages(left, right, params, threads).final_map;
}

}  // namespace mts
