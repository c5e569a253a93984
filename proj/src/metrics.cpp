#include "mtstereo/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

namespace mts {

namespace {

template <typename Fn>
void for_joint_valid(const DisparityMap& est, const DisparityMap& gt, Fn&& fn) {
    if (est.width() != gt.width() || est.height() != gt.height()) {
        throw std::invalid_argument("estimate and ground truth dimensions disagree");
    }
    for (int y = 0; y < est.height(); ++y) {
        for (int x = 0; x < est.width(); ++x) {
            if (est.valid(x, y) && gt.valid(x, y)) {
                fn(static_cast<double>(est.value(x, y)), static_cast<double>(gt.value(x, y)));
            }
        }
    }
}

void require_pixels(std::size_t n) {
    if (n == 0) {
        throw MetricError("no pixel is valid in both the estimate and the ground truth");
    }
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_value(*v) : std::string();
}

}  // namespace

double avgerr(const DisparityMap& est, const DisparityMap& gt) {
    double sum = 0.0;
    std::size_t n = 0;
    for_joint_valid(est, gt, [&](double e, double g) {
        sum += std::abs(e - g);
        ++n;
    });
    require_pixels(n);
    return sum / static_cast<double>(n);
}

double rmse(const DisparityMap& est, const DisparityMap& gt) {
    double sum = 0.0;
    std::size_t n = 0;
    for_joint_valid(est, gt, [&](double e, double g) {
        sum += (e - g) * (e - g);
        ++n;
    });
    require_pixels(n);
    return std::sqrt(sum / static_cast<double>(n));
}

double bad(const DisparityMap& est, const DisparityMap& gt, double tau) {
    std::size_t over = 0;
    std::size_t n = 0;
    for_joint_valid(est, gt, [&](double e, double g) {
        over += std::abs(e - g) > tau;
        ++n;
    });
    require_pixels(n);
    return 100.0 * static_cast<double>(over) / static_cast<double>(n);
}

double d_all_est(const DisparityMap& est, const DisparityMap& gt) {
    std::size_t outliers = 0;
    std::size_t n = 0;
    for_joint_valid(est, gt, [&](double e, double g) {
        const double err = std::abs(e - g);
        outliers += err >= 3.0 && err >= 0.05 * g;
        ++n;
    });
    require_pixels(n);
    return 100.0 * static_cast<double>(outliers) / static_cast<double>(n);
}

double density_percent(const DisparityMap& est) { return 100.0 * est.density(); }

double time_per_mp(double elapsed_seconds, int width, int height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("image dimensions must be positive");
    }
    return elapsed_seconds / (static_cast<double>(width) * height / 1e6);
}

MetricReport evaluate(const std::string& name, const DisparityMap& est, const DisparityMap* gt,
                      double elapsed_seconds, double tau) {
    MetricReport r;
    r.name = name;
    r.density = density_percent(est);
    r.time_per_mp = time_per_mp(elapsed_seconds, est.width(), est.height());
    if (gt != nullptr) {
        try {
            r.avgerr = avgerr(est, *gt);
            r.rmse = rmse(est, *gt);
            r.bad = bad(est, *gt, tau);
            r.d_all_est = d_all_est(est, *gt);
        } catch (const MetricError&) {
            r.avgerr = r.rmse = r.bad = r.d_all_est = std::nullopt;
        }
    }
    return r;
}

std::string csv_header() { return "name,avgerr,rmse,bad2.0,d_all_est,density,time_per_mp"; }

std::string csv_row(const MetricReport& r) {
    return r.name + "," + format_optional(r.avgerr) + "," + format_optional(r.rmse) + "," +
           format_optional(r.bad) + "," + format_optional(r.d_all_est) + "," +
           format_value(r.density) + "," + format_value(r.time_per_mp);
}

MetricReport mean_report(const std::vector<MetricReport>& reports, const std::string& name) {
    MetricReport out;
    out.name = name;
    const auto mean_of = [&](std::optional<double> MetricReport::*field) -> std::optional<double> {
        double sum = 0.0;
        int n = 0;
        for (const auto& r : reports) {
            if (r.*field) {
                sum += *(r.*field);
                ++n;
            }
        }
        return n > 0 ? std::optional<double>(sum / n) : std::nullopt;
    };
    out.avgerr = mean_of(&MetricReport::avgerr);
    out.rmse = mean_of(&MetricReport::rmse);
    out.bad = mean_of(&MetricReport::bad);
    out.d_all_est = mean_of(&MetricReport::d_all_est);
    if (!reports.empty()) {
        for (const auto& r : reports) {
            out.density += r.density;
            out.time_per_mp += r.time_per_mp;
        }
        out.density /= static_cast<double>(reports.size());
        out.time_per_mp /= static_cast<double>(reports.size());
    }
    return out;
}

}  // namespace mts
