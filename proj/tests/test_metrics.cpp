#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "mtstereo/metrics.hpp"

using namespace mts;

namespace {

// 2x2 maps; NaN marks an invalid pixel.
DisparityMap fixture(std::initializer_list<float> v) {
    return DisparityMap::from_image(GrayImage(2, 2, std::vector<float>(v)));
}

const float kNone = std::numeric_limits<float>::quiet_NaN();

}  // namespace

TEST(Metrics, PerfectEstimate) {
    const DisparityMap gt = fixture({1, 2, 3, 4});
    EXPECT_EQ(avgerr(gt, gt), 0.0);
    EXPECT_EQ(rmse(gt, gt), 0.0);
    EXPECT_EQ(bad(gt, gt), 0.0);
    EXPECT_EQ(d_all_est(gt, gt), 0.0);
}

TEST(Metrics, TwoJointPixels) {
    const DisparityMap est = fixture({1, 3, 5, kNone});
    const DisparityMap gt = fixture({0, 0, kNone, 7});
    EXPECT_NEAR(avgerr(est, gt), 2.0, 1e-9);
    EXPECT_NEAR(rmse(est, gt), std::sqrt(5.0), 1e-9);
    EXPECT_NEAR(bad(est, gt, 2.0), 50.0, 1e-9);
    EXPECT_NEAR(bad(est, gt, std::numeric_limits<double>::infinity()), 0.0, 1e-9);
    EXPECT_NEAR(rmse(fixture({4, kNone, kNone, kNone}), fixture({0, 0, 0, 0})), 4.0, 1e-9);
}

TEST(Metrics, DisjointValidityThrows) {
    const DisparityMap est = fixture({1, kNone, kNone, kNone});
    const DisparityMap gt = fixture({kNone, 1, 1, 1});
    EXPECT_THROW(avgerr(est, gt), MetricError);
    EXPECT_THROW(rmse(est, gt), MetricError);
    EXPECT_THROW(bad(est, gt), MetricError);
    EXPECT_THROW(d_all_est(est, gt), MetricError);
    EXPECT_THROW(avgerr(DisparityMap(2, 2), DisparityMap(3, 2)), std::invalid_argument);
}

TEST(Metrics, DAllEstNeedsBothClauses) {
    EXPECT_NEAR(d_all_est(fixture({12.9f, 12.9f, 12.9f, 12.9f}), fixture({10, 10, 10, 10})), 0.0, 1e-9);
    EXPECT_NEAR(d_all_est(fixture({96, 96, 96, 96}), fixture({100, 100, 100, 100})), 0.0, 1e-9);
    EXPECT_NEAR(d_all_est(fixture({20, 20, 20, 20}), fixture({10, 10, 10, 10})), 100.0, 1e-9);
    EXPECT_NEAR(d_all_est(fixture({20, 12, 10, 40}), fixture({10, 10, 10, 100})), 50.0, 1e-9);
}

TEST(Metrics, DensityAndTime) {
    EXPECT_NEAR(density_percent(fixture({1, 1, 1, 1})), 100.0, 1e-9);
    EXPECT_NEAR(density_percent(fixture({1, kNone, kNone, kNone})), 25.0, 1e-9);
    EXPECT_NEAR(time_per_mp(2.0, 1000, 500), 4.0, 1e-9);
}

TEST(Metrics, RandomProperties) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<float> u(0.0f, 60.0f);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = 5 + trial % 7, h = 3 + trial % 5;
        std::vector<float> e(static_cast<std::size_t>(w) * h), g(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) {
            e[i] = u(rng);
            g[i] = u(rng) < 6.0f ? kNone : u(rng);
        }
        g[0] = 1.0f;
        const DisparityMap est = DisparityMap::from_image(GrayImage(w, h, e));
        const DisparityMap gt = DisparityMap::from_image(GrayImage(w, h, g));
        ASSERT_LE(avgerr(est, gt), rmse(est, gt) + 1e-12);
        double previous = 100.0;
        for (double tau : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 32.0}) {
            const double b = bad(est, gt, tau);
            ASSERT_LE(b, previous);
            ASSERT_GE(b, 0.0);
            previous = b;
        }
        // Same pixels in another order give the same numbers.
        std::vector<std::size_t> order(e.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<float> pe(e.size()), pg(e.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            pe[i] = e[order[i]];
            pg[i] = g[order[i]];
        }
        const DisparityMap est2 = DisparityMap::from_image(GrayImage(w, h, pe));
        const DisparityMap gt2 = DisparityMap::from_image(GrayImage(w, h, pg));
        ASSERT_NEAR(avgerr(est, gt), avgerr(est2, gt2), 1e-9);
        ASSERT_NEAR(rmse(est, gt), rmse(est2, gt2), 1e-9);
        ASSERT_NEAR(d_all_est(est, gt), d_all_est(est2, gt2), 1e-9);
    }
}

TEST(Report, CsvRowsAndMean) {
    EXPECT_EQ(csv_header(), "name,avgerr,rmse,bad2.0,d_all_est,density,time_per_mp");
    const DisparityMap est = fixture({1, 3, kNone, kNone});
    const DisparityMap gt = fixture({0, 0, 0, 0});
    const MetricReport a = evaluate("a", est, &gt, 2e-6);
    EXPECT_EQ(csv_row(a), "a,2,2.23607,50,50,50,0.5");
    const MetricReport b = evaluate("b", est, nullptr, 4e-6);
    EXPECT_EQ(csv_row(b), "b,,,,,50,1");
    const MetricReport mean = mean_report({a, b});
    EXPECT_EQ(csv_row(mean), "mean,2,2.23607,50,50,50,0.75");
    const DisparityMap disjoint = fixture({kNone, kNone, 1, 1});
    EXPECT_FALSE(evaluate("c", est, &disjoint, 1.0).avgerr.has_value());
}
