#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "mtstereo/disparity.hpp"

namespace mts {

/// Raised when a metric has no pixels to average over.
class MetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Error metrics are taken over the pixels valid in both maps and throw
// MetricError when there are none.

/// Mean absolute disparity error, pixels.
double avgerr(const DisparityMap& est, const DisparityMap& gt);
/// Root mean squared disparity error, pixels.
double rmse(const DisparityMap& est, const DisparityMap& gt);
/// Percentage of pixels with |est - gt| > tau.
double bad(const DisparityMap& est, const DisparityMap& gt, double tau = 2.0);
/// Percentage of pixels whose error is >= 3 px and >= 5% of the true disparity.
double d_all_est(const DisparityMap& est, const DisparityMap& gt);

/// Percentage of valid pixels.
double density_percent(const DisparityMap& est);
/// Seconds per megapixel of the reference image.
double time_per_mp(double elapsed_seconds, int width, int height);

struct MetricReport {
    std::string name;
    // Empty when no ground truth is available or the maps share no valid pixel.
    std::optional<double> avgerr;
    std::optional<double> rmse;
    std::optional<double> bad;
    std::optional<double> d_all_est;
    double density = 0.0;      // percent
    double time_per_mp = 0.0;  // s/MP
};

MetricReport evaluate(const std::string& name, const DisparityMap& est, const DisparityMap* gt,
                      double elapsed_seconds, double tau = 2.0);

/// `name,avgerr,rmse,bad2.0,d_all_est,density,time_per_mp`
std::string csv_header();
std::string csv_row(const MetricReport& report);

/// Unweighted mean of every column over the reports that have it.
MetricReport mean_report(const std::vector<MetricReport>& reports, const std::string& name = "mean");

}  // namespace mts
