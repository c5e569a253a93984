#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mtstereo/cost_volume.hpp"
#include "oracles.hpp"

using namespace mts;

namespace {

std::vector<double> gauss1d(int window) {
    const double sigma = window / 6.0;
    std::vector<double> k;
    double sum = 0;
    for (int i = -window / 2; i <= window / 2; ++i) {
        k.push_back(std::exp(-i * i / (2 * sigma * sigma)));
        sum += k.back();
    }
    for (auto& v : k) {
        v /= sum;
    }
    return k;
}

// 2D renormalized blur of one slice, tap by tap.
double blur_at(const CostVolume& cv, int x, int y, int d, int window) {
    const auto k = gauss1d(window);
    const int r = window / 2;
    double acc = 0, weight = 0;
    for (int j = -r; j <= r; ++j) {
        for (int i = -r; i <= r; ++i) {
            const int xx = std::clamp(x + i, 0, cv.width() - 1);
            const int yy = std::clamp(y + j, 0, cv.height() - 1);
            const float c = cv.at(xx, yy, d);
            if (!CostVolume::is_valid(c)) {
                continue;
            }
            const double w = k[static_cast<std::size_t>(i + r)] * k[static_cast<std::size_t>(j + r)];
            acc += w * c;
            weight += w;
        }
    }
    return acc / weight;
}

CostVolume random_volume(int w, int h, int dmax, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> v(0.0f, 50.0f);
    CostVolume cv(w, h, dmax);
    for (int d = 0; d < dmax; ++d) {
        for (int y = 0; y < h; ++y) {
            for (int x = d; x < w; ++x) {
                cv.at(x, y, d) = v(rng);
            }
        }
    }
    return cv;
}

double argmin_hit_rate(const CostVolume& cv, int k, int margin) {
    int hits = 0, total = 0;
    for (int y = 0; y < cv.height(); ++y) {
        for (int x = cv.max_disparity() + margin; x < cv.width() - margin; ++x) {
            int best = 0;
            for (int d = 1; d < cv.max_disparity(); ++d) {
                if (cv.at(x, y, d) < cv.at(x, y, best)) {
                    best = d;
                }
            }
            hits += best == k;
            ++total;
        }
    }
    return static_cast<double>(hits) / total;
}

}  // namespace

TEST(CostVolume, IdenticalPairHasZeroCostAtZeroDisparity) {
    const GrayImage img = oracle::textured_noise(20, 10, 3);
    const CostVolume cv = compute_cost_volume(img, img, 5, CostWeights{});
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 20; ++x) {
            EXPECT_EQ(cv.at(x, y, 0), 0.0f);
        }
    }
}

TEST(CostVolume, DirectFormula) {
    const GrayImage l = oracle::textured_noise(12, 6, 1);
    const GrayImage r = oracle::textured_noise(12, 6, 2);
    const CostWeights w{0.2, 0.3, 0.5};
    const CostVolume cv = compute_cost_volume(l, r, 4, w);
    const GrayImage lh = oracle::correlate3x3(l, oracle::kSobelH), rh = oracle::correlate3x3(r, oracle::kSobelH);
    const GrayImage lv = oracle::correlate3x3(l, oracle::kSobelV), rv = oracle::correlate3x3(r, oracle::kSobelV);
    for (int d = 0; d < 4; ++d) {
        for (int y = 0; y < 6; ++y) {
            for (int x = d; x < 12; ++x) {
                const double expected = 0.2 * std::abs(l.at(x, y) - r.at(x - d, y)) +
                                        0.3 * std::abs(lh.at(x, y) - rh.at(x - d, y)) +
                                        0.5 * std::abs(lv.at(x, y) - rv.at(x - d, y));
                EXPECT_NEAR(cv.at(x, y, d), expected, 1e-3);
            }
        }
    }
}

TEST(CostVolume, ShiftedPairHasZeroCostAtTheShift) {
    const int k = 3;
    const auto [l, r] = oracle::shifted_pair(40, 20, k, 9);
    const CostVolume cv = compute_cost_volume(l, r, 8, CostWeights{});
    for (int y = 0; y < 20; ++y) {
        for (int x = k + 1; x <= 40 - 2; ++x) {
            EXPECT_EQ(cv.at(x, y, k), 0.0f) << x << "," << y;
        }
    }
}

TEST(CostVolume, ArgminRecoversShiftBeforeAndAfterSmoothing) {
    for (int k : {3, 7, 12}) {
        const auto [l, r] = oracle::shifted_pair(128, 96, k, 40u + k);
        const CostVolume cv = compute_cost_volume(l, r, 20, CostWeights{});
        EXPECT_GE(argmin_hit_rate(cv, k, 2), 0.99) << k;
        EXPECT_GE(argmin_hit_rate(smooth_cost_volume(cv, 21), k, 11), 0.99) << k;
    }
}

TEST(CostVolume, OutOfRangeEntriesAreInvalid) {
    const GrayImage img = oracle::textured_noise(10, 4, 5);
    const CostVolume cv = compute_cost_volume(img, img, 6, CostWeights{});
    for (int d = 0; d < 6; ++d) {
        for (int x = 0; x < 10; ++x) {
            EXPECT_EQ(CostVolume::is_valid(cv.at(x, 2, d)), x >= d);
        }
    }
    EXPECT_EQ(CostVolume::kInvalid, std::numeric_limits<float>::max());
}

TEST(CostVolume, Errors) {
    EXPECT_THROW(compute_cost_volume(GrayImage(4, 4), GrayImage(5, 4), 2, CostWeights{}), std::invalid_argument);
    EXPECT_THROW(compute_cost_volume(GrayImage(4, 4), GrayImage(4, 4), 0, CostWeights{}), std::invalid_argument);
    EXPECT_THROW((CostWeights{0.5, 0.5, 0.5}.validate()), std::invalid_argument);
    EXPECT_THROW((CostWeights{1.5, -0.25, -0.25}.validate()), std::invalid_argument);
    EXPECT_THROW(smooth_cost_volume(CostVolume(4, 4, 1), 4), std::invalid_argument);
    EXPECT_THROW(gaussian_kernel(0), std::invalid_argument);
}

TEST(Smoothing, KernelIsNormalizedGaussian) {
    for (int w : {1, 3, 5, 21}) {
        const auto k = gaussian_kernel(w);
        const auto expected = gauss1d(w);
        ASSERT_EQ(k.size(), expected.size());
        for (std::size_t i = 0; i < k.size(); ++i) {
            EXPECT_NEAR(k[i], expected[i], 1e-12);
        }
    }
}

TEST(Smoothing, ConstantSliceUnchanged) {
    CostVolume cv(15, 9, 1);
    for (auto& c : cv.slice(0)) {
        c = 7.5f;
    }
    const CostVolume out = smooth_cost_volume(cv, 5);
    for (float c : out.slice(0)) {
        EXPECT_NEAR(c, 7.5f, 1e-5);
    }
}

TEST(Smoothing, ImpulseKeepsCenterWeight) {
    CostVolume cv(9, 9, 1);
    std::fill(cv.slice(0).begin(), cv.slice(0).end(), 0.0f);
    cv.at(4, 4, 0) = 1.0f;
    const CostVolume out = smooth_cost_volume(cv, 3);
    const auto k = gauss1d(3);
    EXPECT_NEAR(out.at(4, 4, 0), k[1] * k[1], 1e-6);
    EXPECT_NEAR(out.at(5, 4, 0), k[1] * k[2], 1e-6);
    double interior = 0;
    for (float c : out.slice(0)) {
        interior += c;
    }
    EXPECT_NEAR(interior, 1.0, 1e-6);
}

TEST(Smoothing, WindowOneIsIdentity) {
    const CostVolume cv = random_volume(11, 7, 4, 3);
    const CostVolume out = smooth_cost_volume(cv, 1);
    for (int d = 0; d < 4; ++d) {
        for (std::size_t i = 0; i < cv.slice(d).size(); ++i) {
            EXPECT_FLOAT_EQ(out.slice(d)[i], cv.slice(d)[i]);
        }
    }
}

TEST(Smoothing, MatchesRenormalizedTwoDimensionalBlur) {
    const CostVolume cv = random_volume(23, 13, 7, 17);
    for (int window : {3, 7}) {
        const CostVolume out = smooth_cost_volume(cv, window, 3);
        for (int d = 0; d < 7; ++d) {
            for (int y = 0; y < 13; ++y) {
                for (int x = 0; x < 23; ++x) {
                    if (x < d) {
                        ASSERT_FALSE(CostVolume::is_valid(out.at(x, y, d)));
                    } else {
                        ASSERT_NEAR(out.at(x, y, d), blur_at(cv, x, y, d, window), 1e-3)
                            << x << "," << y << "," << d;
                    }
                }
            }
        }
    }
}

TEST(Smoothing, StaysWithinValidRange) {
    const CostVolume cv = random_volume(30, 20, 5, 8);
    const CostVolume out = smooth_cost_volume(cv, 9);
    for (int d = 0; d < 5; ++d) {
        float lo = CostVolume::kInvalid, hi = 0;
        for (float c : cv.slice(d)) {
            if (CostVolume::is_valid(c)) {
                lo = std::min(lo, c);
                hi = std::max(hi, c);
            }
        }
        for (float c : out.slice(d)) {
            if (CostVolume::is_valid(c)) {
                EXPECT_GE(c, lo - 1e-4f);
                EXPECT_LE(c, hi + 1e-4f);
            }
        }
    }
}

TEST(Smoothing, ThreadCountDoesNotChangeResult) {
    const CostVolume cv = random_volume(30, 20, 6, 2);
    const CostVolume a = smooth_cost_volume(cv, 7, 1);
    const CostVolume b = smooth_cost_volume(cv, 7, 4);
    for (int d = 0; d < 6; ++d) {
        EXPECT_TRUE(std::equal(a.slice(d).begin(), a.slice(d).end(), b.slice(d).begin()));
    }
}

TEST(CostVolume, DumpHeaderAndSize) {
    CostVolume cv(3, 2, 2);
    cv.at(1, 1, 1) = 2.0f;
    std::ostringstream out;
    write_cost_volume(out, cv);
    const std::string s = out.str();
    EXPECT_EQ(s.substr(0, 6), "3 2 2\n");
    EXPECT_EQ(s.size(), 6u + 3 * 2 * 2 * 4);
    EXPECT_FLOAT_EQ(cv.max_valid_cost(), 2.0f);
}
