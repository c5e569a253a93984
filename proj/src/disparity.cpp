#include "mtstereo/disparity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mtstereo/parallel.hpp"

namespace mts {

std::string to_string(MapMode mode) {
    return mode == MapMode::Sparse ? "sparse" : "semidense";
}

MapMode parse_map_mode(const std::string& text) {
    if (text == "sparse") {
        return MapMode::Sparse;
    }
    if (text == "semidense" || text == "semi-dense") {
        return MapMode::Semidense;
    }
    throw std::invalid_argument("mode must be 'sparse' or 'semidense', got '" + text + "'");
}

DisparityMap::DisparityMap(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("disparity map dimensions must be positive");
    }
    values_.assign(static_cast<std::size_t>(width) * height, 0.0f);
    valid_.assign(values_.size(), 0);
}

std::size_t DisparityMap::valid_count() const {
    return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

double DisparityMap::density() const {
    return valid_.empty() ? 0.0 : static_cast<double>(valid_count()) / static_cast<double>(valid_.size());
}

GrayImage DisparityMap::to_image() const {
    GrayImage img(width_, height_);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        img.data()[i] = valid_[i] ? values_[i] : std::numeric_limits<float>::infinity();
    }
    return img;
}

DisparityMap DisparityMap::from_image(const GrayImage& img) {
    DisparityMap map(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const float v = img.data()[i];
        if (std::isfinite(v)) {
            map.values_[i] = v;
            map.valid_[i] = 1;
        }
    }
    return map;
}

void RefineParams::validate() const {
    if (!(search_band >= 0.0)) {
        throw std::invalid_argument("omega_omega must be non-negative");
    }
    if (!(min_confidence_pixel >= 0.0)) {
        throw std::invalid_argument("omega_pi_pixel must be non-negative");
    }
}

DisparityMap render(std::span<const NodeMatch> matches, MapMode mode, int width, int height) {
    DisparityMap map(width, height);
    std::vector<float> cost(static_cast<std::size_t>(width) * height,
                            std::numeric_limits<float>::infinity());
    const auto write = [&](int x, int y, float d, float c) {
        auto& slot = cost[static_cast<std::size_t>(y) * width + x];
        if (!map.valid(x, y) || c < slot || (c == slot && d < map.value(x, y))) {
            map.set(x, y, d);
            slot = c;
        }
    };
    for (const auto& m : matches) {
        if (m.row < 0 || m.row >= height || m.left_begin < 0 || m.left_end >= width ||
            m.left_begin > m.left_end) {
            throw std::out_of_range("match lies outside the map");
        }
        if (mode == MapMode::Sparse) {
            write(m.left_begin, m.row, m.d_left, m.cost);
            write(m.left_end, m.row, m.d_right, m.cost);
            continue;
        }
        const int span = m.left_end - m.left_begin;
        for (int x = m.left_begin; x <= m.left_end; ++x) {
            const float t = span > 0 ? static_cast<float>(x - m.left_begin) / static_cast<float>(span) : 0.0f;
            write(x, m.row, m.d_left + (m.d_right - m.d_left) * t, m.cost);
        }
    }
    return map;
}

DisparityMap remove_outliers(const DisparityMap& map, int threads, int half_window) {
    const int width = map.width();
    const int height = map.height();
    // NaN for invalid pixels: both comparisons below are false, so they never vote.
    std::vector<float> values(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            values[static_cast<std::size_t>(y) * width + x] =
                map.valid(x, y) ? map.value(x, y) : std::numeric_limits<float>::quiet_NaN();
        }
    }

    DisparityMap out = map;
    std::vector<std::uint8_t> drop(values.size(), 0);
    parallel_for(0, height, threads, [&](int y) {
        const int y0 = std::max(0, y - half_window);
        const int y1 = std::min(height - 1, y + half_window - 1);
        for (int x = 0; x < width; ++x) {
            if (!map.valid(x, y)) {
                continue;
            }
            const float d = map.value(x, y);
            const int x0 = std::max(0, x - half_window);
            const int x1 = std::min(width - 1, x + half_window - 1);
            int bad = 0;
            int good = 0;
            for (int yy = y0; yy <= y1; ++yy) {
                const float* row = values.data() + static_cast<std::size_t>(yy) * width;
                for (int xx = x0; xx <= x1; ++xx) {
                    const float diff = std::abs(row[xx] - d);
                    const auto offset = static_cast<float>(std::abs(xx - x));
                    bad += diff > offset;
                    good += diff <= offset;
                }
            }
            --good;  // the pixel itself
            if (bad > good) {
                drop[static_cast<std::size_t>(y) * width + x] = 1;
            }
        }
    });
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (drop[static_cast<std::size_t>(y) * width + x]) {
                out.invalidate(x, y);
            }
        }
    }
    return out;
}

namespace {

float median(std::vector<float>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5f * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<NodeMatch> extrapolate_reliable(std::span<const MaxTree> left_trees,
                                            std::span<const NodeMatch> finest_matches,
                                            const DisparityMap& filtered, const MatchParams& params,
                                            int threads) {
    const int finest = params.coarseness.back();
    const auto rows = left_trees.size();

    // Endpoint disparities stored per node, for matched nodes whose endpoints
    // survived outlier removal.
    struct Stored {
        bool carries = false;
        float d_left = 0.0f;
        float d_right = 0.0f;
        const NodeMatch* match = nullptr;
    };
    std::vector<std::vector<Stored>> stored(rows);
    for (std::size_t y = 0; y < rows; ++y) {
        stored[y].resize(left_trees[y].size());
    }
    for (const auto& m : finest_matches) {
        auto& s = stored[static_cast<std::size_t>(m.row)][static_cast<std::size_t>(m.left_node)];
        s.match = &m;
        if (filtered.valid(m.left_begin, m.row) && filtered.valid(m.left_end, m.row)) {
            s.carries = true;
            s.d_left = filtered.value(m.left_begin, m.row);
            s.d_right = filtered.value(m.left_end, m.row);
        }
    }

    const auto eligible = [&](const MaxTree& t, NodeId n) { return eligible_node(t, n, finest, params); };
    const ColumnIndex index(left_trees, eligible, threads);

    std::vector<std::vector<NodeMatch>> per_row(rows);
    parallel_for(0, static_cast<int>(rows), threads, [&](int y) {
        const MaxTree& tree = left_trees[static_cast<std::size_t>(y)];
        std::vector<float> lefts, rights;
        for (NodeId id = 0; id < static_cast<NodeId>(tree.size()); ++id) {
            if (!eligible(tree, id)) {
                continue;
            }
            lefts.clear();
            rights.clear();
            for (int direction : {-1, 1}) {
                NodeId current = id;
                int row = y;
                for (int step = 0; step < params.neighborhood_rows; ++step) {
                    const int next_row = row + direction;
                    if (next_row < 0 || next_row >= static_cast<int>(rows)) {
                        break;
                    }
                    const int center = left_trees[static_cast<std::size_t>(row)].node(current).center();
                    const NodeId next = index.at(next_row, center);
                    if (next == kNoNode) {
                        break;
                    }
                    const Stored& s = stored[static_cast<std::size_t>(next_row)][static_cast<std::size_t>(next)];
                    if (s.carries) {
                        lefts.push_back(s.d_left);
                        rights.push_back(s.d_right);
                    }
                    current = next;
                    row = next_row;
                }
            }

            const Stored& own = stored[static_cast<std::size_t>(y)][static_cast<std::size_t>(id)];
            NodeMatch m;
            m.row = y;
            m.left_node = id;
            m.right_node = own.match ? own.match->right_node : kNoNode;
            m.left_begin = tree.node(id).begin;
            m.left_end = tree.node(id).end;
            m.coarseness = finest;
            m.cost = own.match ? own.match->cost : std::numeric_limits<float>::max();
            if (!lefts.empty()) {
                m.d_left = median(lefts);
                m.d_right = median(rights);
            } else if (own.carries) {
                m.d_left = own.d_left;
                m.d_right = own.d_right;
            } else {
                continue;
            }
            per_row[static_cast<std::size_t>(y)].push_back(m);
        }
    });

    std::vector<NodeMatch> out;
    for (auto& row : per_row) {
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

std::vector<int> guided_band(double prior, double band_percent, int max_disparity) {
    const double lo = prior * (1.0 - band_percent / 100.0);
    const double hi = prior * (1.0 + band_percent / 100.0);
    const long first = std::max(0L, static_cast<long>(std::ceil(lo)));
    const long last = std::min(static_cast<long>(max_disparity) - 1, static_cast<long>(std::floor(hi)));
    std::vector<int> band;
    for (long d = first; d <= last; ++d) {
        band.push_back(static_cast<int>(d));
    }
    const long rounded = std::lround(prior);
    if (rounded >= 0 && rounded < max_disparity &&
        !std::binary_search(band.begin(), band.end(), static_cast<int>(rounded))) {
        band.insert(std::upper_bound(band.begin(), band.end(), static_cast<int>(rounded)),
                    static_cast<int>(rounded));
    }
    return band;
}

DisparityMap guided_pixel_match(const CostVolume& cv, const DisparityMap& map,
                                const RefineParams& params, int threads) {
    params.validate();
    if (map.width() != cv.width() || map.height() != cv.height()) {
        throw std::invalid_argument("disparity map and cost volume dimensions disagree");
    }
    DisparityMap out(map.width(), map.height());
    parallel_for(0, map.height(), threads, [&](int y) {
        for (int x = 0; x < map.width(); ++x) {
            if (!map.valid(x, y)) {
                continue;
            }
            int best_d = -1;
            double best = 0.0;
            std::optional<double> second;
            for (int d : guided_band(map.value(x, y), params.search_band, cv.max_disparity())) {
                const float c = cv.at(x, y, d);
                if (!CostVolume::is_valid(c)) {
                    continue;
                }
                if (best_d < 0 || c < best) {
                    if (best_d >= 0) {
                        second = best;
                    }
                    best = c;
                    best_d = d;
                } else if (!second || c < *second) {
                    second = c;
                }
            }
            if (best_d >= 0 && peak_ratio_ok(best, second, params.min_confidence_pixel)) {
                out.set(x, y, static_cast<float>(best_d));
            }
        }
    });
    return out;
}

std::vector<std::uint16_t> visualization_samples(const DisparityMap& map, int max_disparity) {
    std::vector<std::uint16_t> samples(static_cast<std::size_t>(map.width()) * map.height(), 0);
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            if (!map.valid(x, y)) {
                continue;
            }
            const double v = std::round(map.value(x, y) * 256.0 / max_disparity);
            samples[static_cast<std::size_t>(y) * map.width() + x] =
                static_cast<std::uint16_t>(std::clamp(v, 0.0, static_cast<double>(kVisualizationMaxval)));
        }
    }
    return samples;
}

}  // namespace mts
