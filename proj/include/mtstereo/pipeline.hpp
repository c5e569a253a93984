#pragma once

#include "mtstereo/cost_volume.hpp"
#include "mtstereo/disparity.hpp"
#include "mtstereo/image.hpp"
#include "mtstereo/matcher.hpp"

namespace mts {

struct StereoParams {
    MatchParams match;
    RefineParams refine;
    CostWeights weights;
    int max_disparity = 0;  // 0 selects width / 3
    int median_radius = 1;
    int cost_window = 21;   // omega_cv

    /// Defaults for the given output mode (q and the pixel-stage
    /// confidence depend on it).
    static StereoParams defaults(MapMode mode);

    int effective_max_disparity(int image_width) const;
    void validate() const;
};

/// Intermediate results of one run, in pipeline order.
struct StereoStages {
    MatchResult node_matches;
    DisparityMap matched;       // render of the finest matches
    DisparityMap filtered;      // after the first outlier removal
    std::vector<NodeMatch> extrapolated;
    DisparityMap extrapolated_map;
    DisparityMap refined;       // after guided pixel matching
    DisparityMap final_map;     // after the second outlier removal
};

/// Full pipeline: median filter, edge quantization, scan-line trees, smoothed
/// cost volume, coarse-to-fine node matching, render, outlier removal,
/// reliable-node extrapolation, render, guided pixel matching, outlier removal.
StereoStages estimate_stages(const GrayImage& left, const GrayImage& right,
                             const StereoParams& params, int threads = 1);

DisparityMap estimate(const GrayImage& left, const GrayImage& right, const StereoParams& params,
                      int threads = 1);

}  // namespace mts
