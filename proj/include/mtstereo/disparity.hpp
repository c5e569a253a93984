#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtstereo/cost_volume.hpp"
#include "mtstereo/image.hpp"
#include "mtstereo/matcher.hpp"

namespace mts {

enum class MapMode { Sparse, Semidense };

std::string to_string(MapMode mode);
MapMode parse_map_mode(const std::string& text);

/// Real-valued disparities with a validity mask. Values under an invalid mask
/// entry are meaningless.
class DisparityMap {
public:
    DisparityMap() = default;
    DisparityMap(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    bool valid(int x, int y) const { return valid_[index(x, y)] != 0; }
    float value(int x, int y) const { return values_[index(x, y)]; }
    void set(int x, int y, float d) {
        values_[index(x, y)] = d;
        valid_[index(x, y)] = 1;
    }
    void invalidate(int x, int y) { valid_[index(x, y)] = 0; }

    std::size_t valid_count() const;
    /// Fraction of valid pixels, in [0, 1].
    double density() const;

    /// Raster with invalid pixels as +inf, as written to PFM.
    GrayImage to_image() const;
    /// Non-finite samples become invalid, everything else is kept.
    static DisparityMap from_image(const GrayImage& img);

    friend bool operator==(const DisparityMap&, const DisparityMap&) = default;

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<float> values_;
    std::vector<std::uint8_t> valid_;
};

struct RefineParams {
    double search_band = 15.0;          // omega_omega, percent
    double min_confidence_pixel = 4.0;  // omega_Pi for guided pixel matching, percent
    MapMode mode = MapMode::Semidense;

    void validate() const;
};

/// Writes node matches into a map. Semidense fills each left interval with the
/// linear interpolation of d_left..d_right; sparse writes only the two endpoints.
/// Overlapping writes keep the lower cost, then the lower disparity.
DisparityMap render(std::span<const NodeMatch> matches, MapMode mode, int width, int height);

/// Half-size of the outlier vote window; the window spans offsets [-21, 20].
inline constexpr int kOutlierHalfWindow = 21;

/// Removes a pixel when, among the valid pixels of its window, more disagree
/// with it (|dd| > |dx|) than agree (|dd| <= |dx|). Decisions are taken on the
/// input map.
DisparityMap remove_outliers(const DisparityMap& map, int threads = 1,
                             int half_window = kOutlierHalfWindow);

/// Assigns each finest-level node the median endpoint disparities of the nodes
/// in its vertical neighbourhood (up to neighborhood_rows above and below) that
/// carry disparities. A node carries disparities when it was matched and both of
/// its endpoint pixels are still valid in `filtered`. Nodes without carrying
/// neighbours keep their own disparities if they carry any, and are dropped
/// otherwise.
std::vector<NodeMatch> extrapolate_reliable(std::span<const MaxTree> left_trees,
                                            std::span<const NodeMatch> finest_matches,
                                            const DisparityMap& filtered, const MatchParams& params,
                                            int threads = 1);

/// Integer disparities tried for a pixel with prior disparity `prior`: those in
/// [prior*(1-band/100), prior*(1+band/100)] plus round(prior), within [0, dmax).
std::vector<int> guided_band(double prior, double band_percent, int max_disparity);

/// Re-estimates every valid pixel as the cost-volume argmin over its guided band
/// and drops pixels that fail the peak-ratio check.
DisparityMap guided_pixel_match(const CostVolume& cv, const DisparityMap& map,
                                const RefineParams& params, int threads = 1);

/// 16-bit visualization samples: round(d * 256 / dmax), invalid pixels 0.
/// Written with maxval 256.
std::vector<std::uint16_t> visualization_samples(const DisparityMap& map, int max_disparity);
inline constexpr int kVisualizationMaxval = 256;

}  // namespace mts
