#include "mtstereo/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "mtstereo/pnm.hpp"

namespace mts {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError(key, "expected a number, got '" + v + "'");
    }
    return out;
}

int parse_int(const std::string& key, const std::string& v) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError(key, "expected an integer, got '" + v + "'");
    }
    return out;
}

std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) {
        throw ConfigError(key, what);
    }
}

struct KeySpec {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<KeySpec>& key_specs() {
    static const std::vector<KeySpec> specs = [] {
        std::vector<KeySpec> s;
        const auto real = [&s](const std::string& name, auto ref, auto check,
                               const std::string& range) {
            s.push_back({name,
                         [=](RunConfig& c, const std::string& v) {
                             const double x = parse_real(name, v);
                             require(check(x), name, "value " + v + " out of range " + range);
                             ref(c) = x;
                         },
                         [=](const RunConfig& c) { return format_real(ref(c)); }});
        };
        const auto integer = [&s](const std::string& name, auto ref, auto check, const std::string& range) {
            s.push_back({name,
                         [=](RunConfig& c, const std::string& v) {
                             const int x = parse_int(name, v);
                             require(check(x), name, "value " + v + " out of range " + range);
                             ref(c) = x;
                         },
                         [=](const RunConfig& c) { return std::to_string(ref(c)); }});
        };

        s.push_back({"mode",
                     [](RunConfig& c, const std::string& v) {
                         try {
                             c.stereo.refine.mode = parse_map_mode(v);
                         } catch (const std::invalid_argument& e) {
                             throw ConfigError("mode", e.what());
                         }
                     },
                     [](const RunConfig& c) { return to_string(c.mode()); }});
        integer("q", [](auto& c) -> auto& { return c.stereo.match.quantization_levels; },
                [](int x) { return x >= 2 && x <= 256; }, "[2, 256]");
        real("alpha", [](auto& c) -> auto& { return c.stereo.match.alpha; },
             [](double x) { return x >= 0.0 && x <= 1.0; }, "[0, 1]");
        real("omega_alpha", [](auto& c) -> auto& { return c.stereo.match.min_width; },
             [](double x) { return x >= 0.0; }, "[0, inf)");
        real("omega_beta", [](auto& c) -> auto& { return c.stereo.match.max_width_fraction; },
             [](double x) { return x > 0.0 && x <= 1.0; }, "(0, 1]");
        s.push_back({"coarseness",
                     [](RunConfig& c, const std::string& v) {
                         std::vector<int> levels;
                         std::stringstream ss(v);
                         std::string item;
                         while (std::getline(ss, item, ',')) {
                             levels.push_back(parse_int("coarseness", trim(item)));
                         }
                         require(!levels.empty(), "coarseness", "needs at least one level");
                         for (std::size_t i = 0; i < levels.size(); ++i) {
                             require(levels[i] >= 0 && (i == 0 || levels[i] < levels[i - 1]),
                                     "coarseness", "levels must be non-negative and strictly decreasing");
                         }
                         c.stereo.match.coarseness = levels;
                     },
                     [](const RunConfig& c) {
                         std::string out;
                         for (int l : c.stereo.match.coarseness) {
                             out += (out.empty() ? "" : ",") + std::to_string(l);
                         }
                         return out;
                     }});
        integer("omega_gamma", [](auto& c) -> auto& { return c.stereo.match.neighborhood_rows; },
                [](int x) { return x >= 0; }, "[0, inf)");
        integer("omega_cv", [](auto& c) -> auto& { return c.stereo.cost_window; },
                [](int x) { return x >= 1 && x % 2 == 1; }, "odd >= 1");
        real("omega_pi", [](auto& c) -> auto& { return c.stereo.match.min_confidence; },
             [](double x) { return x >= 0.0; }, "[0, inf)");
        real("omega_pi_pixel", [](auto& c) -> auto& { return c.stereo.refine.min_confidence_pixel; },
             [](double x) { return x >= 0.0; }, "[0, inf)");
        real("omega_omega", [](auto& c) -> auto& { return c.stereo.refine.search_band; },
             [](double x) { return x >= 0.0; }, "[0, inf)");
        real("search_slack", [](auto& c) -> auto& { return c.stereo.match.search_slack; },
             [](double x) { return x >= 0.0; }, "[0, inf)");
        real("w_gray", [](auto& c) -> auto& { return c.stereo.weights.gray; },
             [](double x) { return x >= 0.0 && x <= 1.0; }, "[0, 1]");
        real("w_sobel_h", [](auto& c) -> auto& { return c.stereo.weights.sobel_h; },
             [](double x) { return x >= 0.0 && x <= 1.0; }, "[0, 1]");
        real("w_sobel_v", [](auto& c) -> auto& { return c.stereo.weights.sobel_v; },
             [](double x) { return x >= 0.0 && x <= 1.0; }, "[0, 1]");
        integer("dmax", [](auto& c) -> auto& { return c.stereo.max_disparity; },
                [](int x) { return x >= 0; }, "[0, inf), 0 = width/3");
        integer("median_radius", [](auto& c) -> auto& { return c.stereo.median_radius; },
                [](int x) { return x >= 0; }, "[0, inf)");
        s.push_back({"dataset_index",
                     [](RunConfig& c, const std::string& v) { c.dataset_index = v; },
                     [](const RunConfig& c) { return c.dataset_index; }});
        return s;
    }();
    return specs;
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
    return dump_config(a) == dump_config(b);
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& k : key_specs()) {
        keys.push_back(k.name);
    }
    return keys;
}

RunConfig parse_config(std::string_view text, std::optional<MapMode> mode_override) {
    std::map<std::string, std::string> values;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(stripped).substr(0, eq));
        const std::string value = trim(std::string_view(stripped).substr(eq + 1));
        const auto& specs = key_specs();
        if (std::none_of(specs.begin(), specs.end(), [&](const KeySpec& k) { return k.name == key; })) {
            throw ConfigError(key, "unknown configuration key");
        }
        values[key] = value;
    }

    MapMode mode = MapMode::Semidense;
    if (mode_override) {
        mode = *mode_override;
    } else if (auto it = values.find("mode"); it != values.end()) {
        RunConfig probe;
        key_specs().front().set(probe, it->second);
        mode = probe.mode();
    }

    RunConfig config;
    config.stereo = StereoParams::defaults(mode);
    for (const auto& spec : key_specs()) {
        if (spec.name == "mode") {
            continue;
        }
        if (auto it = values.find(spec.name); it != values.end()) {
            spec.set(config, it->second);
        }
    }
    try {
        config.stereo.weights.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("w_gray", e.what());
    }
    config.stereo.validate();
    return config;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<MapMode> mode_override) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const PnmError& e) {
        throw ConfigError("", e.what());
    }
    return parse_config(text, mode_override);
}

std::string dump_config(const RunConfig& config) {
    std::string out;
    for (const auto& spec : key_specs()) {
        const std::string v = spec.get(config);
        if (spec.name == "dataset_index" && v.empty()) {
            continue;
        }
        out += spec.name + " = " + v + "\n";
    }
    return out;
}

}  // namespace mts
