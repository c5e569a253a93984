#include "cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <thread>

#include "mtstereo/config.hpp"
#include "mtstereo/dataset.hpp"
#include "mtstereo/filters.hpp"
#include "mtstereo/maxtree.hpp"
#include "mtstereo/metrics.hpp"
#include "mtstereo/parallel.hpp"
#include "mtstereo/pipeline.hpp"
#include "mtstereo/pnm.hpp"

namespace mts::cli {

namespace {

struct CommonOptions {
    std::string config_path;
    std::string mode;
    int dmax = -1;
    int threads = 0;
};

void add_common(CLI::App& cmd, CommonOptions& opts) {
    cmd.add_option("--config", opts.config_path, "key = value configuration file");
    cmd.add_option("--mode", opts.mode, "sparse or semidense")
        ->check(CLI::IsMember({"sparse", "semidense"}));
    cmd.add_option("--dmax", opts.dmax, "number of disparity levels (0 = width/3)")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--threads", opts.threads, "worker threads (0 = all cores); MTS_THREADS overrides")
        ->check(CLI::NonNegativeNumber);
}

RunConfig resolve_config(const CommonOptions& opts) {
    std::optional<MapMode> mode;
    if (!opts.mode.empty()) {
        mode = parse_map_mode(opts.mode);
    }
    RunConfig config = opts.config_path.empty() ? parse_config("", mode)
                                                : load_config(opts.config_path, mode);
    if (opts.dmax >= 0) {
        config.stereo.max_disparity = opts.dmax;
    }
    return config;
}

int resolve_threads(int requested) {
    if (const char* env = std::getenv("MTS_THREADS"); env != nullptr && *env != '\0') {
        try {
            const int n = std::stoi(env);
            if (n >= 0) {
                requested = n;
            }
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    return requested > 0 ? requested : default_thread_count();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int cmd_match(const std::string& left_path, const std::string& right_path, const std::string& out_path,
              const std::string& vis_path, const CommonOptions& opts, std::ostream& out) {
    const RunConfig config = resolve_config(opts);
    const GrayImage left = load_pgm(left_path);
    const GrayImage right = load_pgm(right_path);
    if (!left.same_shape(right)) {
        throw std::invalid_argument("dimension mismatch: left is " + std::to_string(left.width()) + "x" +
                                    std::to_string(left.height()) + ", right is " +
                                    std::to_string(right.width()) + "x" + std::to_string(right.height()));
    }
    const int threads = resolve_threads(opts.threads);

    const auto start = std::chrono::steady_clock::now();
    const DisparityMap disparity = estimate(left, right, config.stereo, threads);
    const double elapsed = seconds_since(start);

    save_pfm(out_path, disparity.to_image());
    if (!vis_path.empty()) {
        const int dmax = config.stereo.effective_max_disparity(left.width());
        write_file(vis_path, encode_pgm_samples(disparity.width(), disparity.height(),
                                                visualization_samples(disparity, dmax),
                                                kVisualizationMaxval));
    }
    out << std::fixed << std::setprecision(1) << "density " << density_percent(disparity) << "%\n"
        << std::setprecision(3) << "time " << elapsed << " s ("
        << time_per_mp(elapsed, left.width(), left.height()) << " s/MP)\n";
    return 0;
}

int cmd_eval(std::string index_path, const std::string& csv_path, const CommonOptions& opts,
             std::ostream& out) {
    const RunConfig config = resolve_config(opts);
    if (index_path.empty()) {
        index_path = config.dataset_index;
    }
    if (index_path.empty()) {
        throw DatasetError("no dataset index given");
    }
    const DatasetIndex index = load_dataset_index(index_path);
    const int threads = resolve_threads(opts.threads);
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(index.entries.size())));
    const int inner_threads = std::max(1, threads / workers);

    std::vector<MetricReport> reports(index.entries.size());
    std::vector<std::string> errors(index.entries.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < index.entries.size(); i = next++) {
            const DatasetEntry& e = index.entries[i];
            try {
                const GrayImage left = load_pgm(e.left);
                const GrayImage right = load_pgm(e.right);
                if (!left.same_shape(right)) {
                    throw std::invalid_argument("dimension mismatch in pair '" + e.name + "'");
                }
                const auto start = std::chrono::steady_clock::now();
                const DisparityMap est = estimate(left, right, config.stereo, inner_threads);
                const double elapsed = seconds_since(start);
                std::optional<DisparityMap> gt;
                if (e.ground_truth) {
                    gt = DisparityMap::from_image(load_pfm(*e.ground_truth));
                }
                reports[i] = evaluate(e.name, est, gt ? &*gt : nullptr, elapsed);
            } catch (const std::exception& ex) {
                errors[i] = e.name + ": " + ex.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) {
        pool.emplace_back(work);
    }
    work();
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& msg : errors) {
        if (!msg.empty()) {
            throw std::runtime_error(msg);
        }
    }

    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) {
        throw PnmError(PnmError::Kind::Io, "cannot write '" + csv_path + "'");
    }
    csv << csv_header() << '\n';
    for (const auto& r : reports) {
        csv << csv_row(r) << '\n';
        out << csv_row(r) << '\n';
    }
    if (!reports.empty()) {
        const MetricReport mean = mean_report(reports);
        csv << csv_row(mean) << '\n';
        out << csv_row(mean) << '\n';
    }
    return 0;
}

int cmd_dump_tree(const std::string& image_path, int row, const std::string& out_path,
                  const CommonOptions& opts, std::ostream& out) {
    const RunConfig config = resolve_config(opts);
    const GrayImage img = load_pgm(image_path);
    if (row < 0 || row >= img.height()) {
        throw std::out_of_range("row " + std::to_string(row) + " outside image of height " +
                                std::to_string(img.height()));
    }
    const QuantizedImage quantized =
        preprocess(median_filter(img, config.stereo.median_radius), config.stereo.match.quantization_levels);
    const MaxTree tree = build_scanline_tree(quantized.row(row), row);
    if (out_path.empty()) {
        write_tree(out, tree);
    } else {
        std::ofstream file(out_path, std::ios::trunc);
        if (!file) {
            throw PnmError(PnmError::Kind::Io, "cannot write '" + out_path + "'");
        }
        write_tree(file, tree);
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hierarchical scan-line max-tree stereo matching"};
    app.require_subcommand(1);

    CommonOptions match_opts;
    std::string left, right, out_path, vis_path;
    auto* match = app.add_subcommand("match", "estimate a disparity map for one rectified pair");
    match->add_option("left", left, "left image (PGM/PPM)")->required();
    match->add_option("right", right, "right image (PGM/PPM)")->required();
    match->add_option("--out", out_path, "output disparity (PFM)")->required();
    match->add_option("--vis", vis_path, "optional 16-bit PGM visualization");
    add_common(*match, match_opts);

    CommonOptions eval_opts;
    std::string index_path, csv_path;
    auto* eval = app.add_subcommand("eval", "run and score every pair of a dataset index");
    eval->add_option("index", index_path, "CSV index of name,left,right[,gt]");
    eval->add_option("--out", csv_path, "output CSV")->required();
    add_common(*eval, eval_opts);

    CommonOptions tree_opts;
    std::string tree_image, tree_out;
    int tree_row = 0;
    auto* dump = app.add_subcommand("dump-tree", "print the max-tree of one preprocessed scan-line");
    dump->add_option("image", tree_image, "input image (PGM/PPM)")->required();
    dump->add_option("--row", tree_row, "scan-line index")->required();
    dump->add_option("--out", tree_out, "write to a file instead of stdout");
    add_common(*dump, tree_opts);

    auto* version = app.add_subcommand("version", "print the version");

    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*match) {
            return cmd_match(left, right, out_path, vis_path, match_opts, out);
        }
        if (*eval) {
            return cmd_eval(index_path, csv_path, eval_opts, out);
        }
        if (*dump) {
            return cmd_dump_tree(tree_image, tree_row, tree_out, tree_opts, out);
        }
        if (*version) {
            out << "mtstereo " << kVersion << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kErrorExit;
    }
    return 0;
}

}  // namespace mts::cli
