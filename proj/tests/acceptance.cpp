// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "fixtures.hpp"
#include "mtstereo/metrics.hpp"
#include "mtstereo/pipeline.hpp"
#include "mtstereo/pnm.hpp"
#include "oracles.hpp"

using namespace mts;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    while (!o.detail.empty() && (o.detail.back() == ' ' || o.detail.back() == ';')) {
        o.detail.pop_back();
    }
    failures += !o.pass;
    std::printf("[%s] %d. %s: %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

DisparityMap constant_gt(int w, int h, float d) {
    DisparityMap m(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            m.set(x, y, d);
        }
    }
    return m;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h = (h ^ c) * 1099511628211ull;
    }
    return h;
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
    args.insert(args.begin(), "mtstereo");
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    if (out != nullptr) {
        *out = o.str() + e.str();
    }
    return code;
}

Outcome maxtree_oracle() {
    std::mt19937 rng(2024);
    const auto start = Clock::now();
    int mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<std::uint16_t> line(1 + rng() % 64);
        for (auto& v : line) {
            v = static_cast<std::uint16_t>(rng() % 8);
        }
        const MaxTree t = build_scanline_tree(line);
        std::set<std::tuple<int, int, int>> nodes;
        for (const auto& n : t.nodes()) {
            nodes.emplace(n.level, n.begin, n.end);
        }
        mismatches += nodes != oracle::threshold_decomposition(line) || nodes.size() != t.size();
    }
    const double elapsed = seconds_since(start);
    return {mismatches == 0 && elapsed < 5.0,
            fmt("%.0f/1000 lines differ, %.3f s (limit 5 s)", mismatches, elapsed)};
}

Outcome identity_pair() {
    const GrayImage img = oracle::textured_noise(128, 96, 77);
    std::string detail;
    bool ok = true;
    for (MapMode mode : {MapMode::Semidense, MapMode::Sparse}) {
        const DisparityMap d = estimate(img, img, StereoParams::defaults(mode));
        std::size_t nonzero = 0;
        for (int y = 0; y < d.height(); ++y) {
            for (int x = 0; x < d.width(); ++x) {
                nonzero += d.valid(x, y) && d.value(x, y) != 0.0f;
            }
        }
        ok &= nonzero == 0 && d.density() > 0.0;
        detail += to_string(mode) + fmt(" density %.1f%% nonzero %.0f; ", 100 * d.density(), nonzero);
    }
    return {ok, detail};
}

Outcome synthetic_shift() {
    bool ok = true;
    std::string detail;
    for (int k : {3, 7, 12}) {
        const auto [l, r] = oracle::shifted_pair(128, 96, k, 100u + k);
        const DisparityMap gt = constant_gt(128, 96, static_cast<float>(k));
        const DisparityMap dense = estimate(l, r, StereoParams::defaults(MapMode::Semidense));
        const DisparityMap sparse = estimate(l, r, StereoParams::defaults(MapMode::Sparse));
        std::size_t within = 0;
        for (int y = 0; y < 96; ++y) {
            for (int x = 0; x < 128; ++x) {
                within += dense.valid(x, y) && std::abs(dense.value(x, y) - k) <= 1.0f;
            }
        }
        const double frac = dense.valid_count() ? static_cast<double>(within) / dense.valid_count() : 0.0;
        const double dense_err = avgerr(dense, gt);
        const double sparse_err = avgerr(sparse, gt);
        ok &= dense_err <= 0.5 && frac >= 0.95 && sparse_err <= 0.5;
        detail += fmt("k=%.0f semidense avgerr %.3f within1 %.1f%% sparse avgerr %.3f; ", k, dense_err,
                      100 * frac, sparse_err);
    }
    return {ok, detail};
}

Outcome metric_fixtures() {
    const float none = std::numeric_limits<float>::quiet_NaN();
    const auto map = [](std::vector<float> v) { return DisparityMap::from_image(GrayImage(2, 2, std::move(v))); };
    const DisparityMap est = map({1, 3, 5, none});
    const DisparityMap gt = map({0, 0, none, 7});
    struct Case {
        const char* name;
        double got;
        double want;
    };
    const Case cases[] = {
        {"avgerr", avgerr(est, gt), 2.0},
        {"rmse", rmse(est, gt), std::sqrt(5.0)},
        {"bad2", bad(est, gt, 2.0), 50.0},
        {"avgerr identical", avgerr(gt, gt), 0.0},
        {"d_all_est 2.9", d_all_est(map({12.9f, 12.9f, 12.9f, 12.9f}), map({10, 10, 10, 10})), 0.0},
        {"d_all_est 96/100", d_all_est(map({96, 96, 96, 96}), map({100, 100, 100, 100})), 0.0},
        {"d_all_est 20/10", d_all_est(map({20, 20, 20, 20}), map({10, 10, 10, 10})), 100.0},
        {"density", density_percent(map({1, none, none, none})), 25.0},
        {"time/MP", time_per_mp(2.0, 1000, 500), 4.0},
    };
    std::string detail;
    bool ok = true;
    for (const auto& c : cases) {
        if (std::abs(c.got - c.want) > 1e-9) {
            ok = false;
            detail += std::string(c.name) + fmt(" got %.12g want %.12g; ", c.got, c.want);
        }
    }
    std::mt19937 rng(55);
    std::uniform_real_distribution<float> u(0.0f, 100.0f);
    int violations = 0;
    for (int i = 0; i < 100; ++i) {
        std::vector<float> e(4), g(4);
        for (int j = 0; j < 4; ++j) {
            e[j] = u(rng);
            g[j] = u(rng);
        }
        violations += avgerr(map(e), map(g)) > rmse(map(e), map(g)) + 1e-12;
    }
    ok &= violations == 0;
    detail += fmt("%.0f fixtures checked to 1e-9, avgerr > rmse on %.0f/100 random fixtures",
                  sizeof cases / sizeof cases[0], violations);
    return {ok, detail};
}

Outcome outlier_filter() {
    DisparityMap plane = constant_gt(5, 5, 3.0f);
    const DisparityMap constant_out = remove_outliers(plane);
    DisparityMap spiky = plane;
    spiky.set(2, 2, 103.0f);
    const DisparityMap spike_out = remove_outliers(spiky);
    const bool exact = spike_out.valid_count() == 24 && !spike_out.valid(2, 2);

    std::mt19937 rng(8);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    int increases = 0;
    for (int i = 0; i < 100; ++i) {
        DisparityMap m(48, 40);
        const float density = 0.05f + 0.9f * u(rng);
        for (int y = 0; y < 40; ++y) {
            for (int x = 0; x < 48; ++x) {
                if (u(rng) < density) {
                    m.set(x, y, u(rng) < 0.7f ? 20.0f + u(rng) : 64.0f * u(rng));
                }
            }
        }
        increases += remove_outliers(m).density() > m.density();
    }
    const bool unchanged = constant_out == plane;
    const bool ok = exact && unchanged && increases == 0;
    return {ok, std::string("spike removed alone: ") + (exact ? "yes" : "no") +
                    ", constant plane unchanged: " + (unchanged ? "yes" : "no") +
                    fmt(", density increased on %.0f/100 random maps", increases)};
}

Outcome confidence_sweep() {
    const auto [l, r] = oracle::shifted_pair(128, 96, 6, 31);
    std::size_t prev_matches = std::numeric_limits<std::size_t>::max();
    double prev_density = 2.0;
    bool ok = true;
    std::string detail;
    for (double pi : {0.0, 6.0, 12.0, 24.0, 48.0}) {
        StereoParams p = StereoParams::defaults(MapMode::Semidense);
        p.match.min_confidence = pi;
        const StereoStages s = estimate_stages(l, r, p);
        const std::size_t matches = s.node_matches.finest().size();
        const double density = s.final_map.density();
        ok &= matches <= prev_matches && density <= prev_density;
        prev_matches = matches;
        prev_density = density;
        detail += fmt("%.0f:%.0f matches/%.2f%% ", pi, matches, 100 * density);
    }
    return {ok, detail};
}

Outcome determinism() {
    ::unsetenv("MTS_THREADS");
    fixture::TempDir dir("acceptance_det");
    fixture::write_shifted_pair(dir.path(), "p", 160, 120, 9, 5, false);
    std::uint64_t hashes[2] = {0, 0};
    const char* threads[2] = {"1", "8"};
    for (int i = 0; i < 2; ++i) {
        const auto out = dir / ("d" + std::string(threads[i]) + ".pfm");
        std::string log;
        if (run_cli({"match", (dir / "p_left.pgm").string(), (dir / "p_right.pgm").string(), "--out",
                     out.string(), "--threads", threads[i]},
                    &log) != 0) {
            return {false, "match failed: " + log};
        }
        hashes[i] = fnv1a(read_file(out));
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "--threads 1 %016llx, --threads 8 %016llx",
                  static_cast<unsigned long long>(hashes[0]), static_cast<unsigned long long>(hashes[1]));
    return {hashes[0] == hashes[1], buf};
}

Outcome performance() {
    const auto [l, r] = oracle::shifted_pair(640, 480, 10, 640);
    const auto start = Clock::now();
    const DisparityMap d = estimate(l, r, StereoParams::defaults(MapMode::Semidense), 1);
    const double elapsed = seconds_since(start);
    return {elapsed < 10.0, fmt("640x480 semidense, 1 thread: %.2f s (limit 10 s, %.2f s/MP), density %.1f%%",
                                elapsed, time_per_mp(elapsed, 640, 480), 100 * d.density())};
}

Outcome dataset_mode() {
    fixture::TempDir dir("acceptance_data");
    std::string index;
    std::string source;
    if (const char* env = std::getenv("MTS_DATASET_INDEX"); env != nullptr && *env != '\0') {
        index = env;
        source = "user index " + index;
    } else {
        std::ofstream idx(dir / "index.csv");
        idx << fixture::write_shifted_pair(dir.path(), "synth_a", 160, 120, 5, 1, true) << "\n"
            << fixture::write_shifted_pair(dir.path(), "synth_b", 160, 120, 11, 2, true) << "\n"
            << fixture::write_shifted_pair(dir.path(), "synth_c", 160, 120, 17, 3, true) << "\n";
        index = (dir / "index.csv").string();
        source = "synthetic PGM/PFM index";
    }
    const auto csv = dir / "results.csv";
    std::string log;
    if (run_cli({"eval", index, "--out", csv.string()}, &log) != 0) {
        return {false, "eval failed: " + log};
    }
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    if (line != csv_header()) {
        return {false, "unexpected header '" + line + "'"};
    }
    int rows = 0;
    bool ok = true;
    std::string bad_rows;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string field; std::getline(ss, field, ',');) {
            f.push_back(field);
        }
        if (!line.empty() && line.back() == ',') {
            f.emplace_back();
        }
        bool row_ok = f.size() == 7;
        for (std::size_t c = 1; row_ok && c < 7; ++c) {
            row_ok = !f[c].empty();
        }
        if (row_ok) {
            const double avg = std::stod(f[1]);
            const double density = std::stod(f[5]);
            row_ok = std::isfinite(avg) && density > 0.0 && density < 100.0;
        }
        if (!row_ok) {
            bad_rows += " '" + line + "'";
        }
        ok &= row_ok;
        ++rows;
    }
    ok &= rows >= 2;
    return {ok, source + fmt(", %.0f rows (pairs + mean)", rows) + (bad_rows.empty() ? "" : ", bad:" + bad_rows)};
}

}  // namespace

int main() {
    report(1, "max-tree oracle equivalence", maxtree_oracle);
    report(2, "identity pair", identity_pair);
    report(3, "synthetic shift", synthetic_shift);
    report(4, "metric fixtures", metric_fixtures);
    report(5, "outlier filter", outlier_filter);
    report(6, "confidence monotonicity", confidence_sweep);
    report(7, "thread determinism", determinism);
    report(8, "performance", performance);
    report(9, "dataset mode", dataset_mode);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
