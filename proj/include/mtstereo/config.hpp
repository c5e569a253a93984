#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mtstereo/pipeline.hpp"

namespace mts {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct RunConfig {
    StereoParams stereo = StereoParams::defaults(MapMode::Semidense);
    std::string dataset_index;  // optional default index for `eval`

    MapMode mode() const { return stereo.refine.mode; }
    friend bool operator==(const RunConfig& a, const RunConfig& b);
};

/// Parses flat `key = value` text (`#` starts a comment). The mode is taken from
/// `mode_override`, else the `mode` key, else semidense; keys not given take the
/// defaults of that mode. Throws ConfigError naming the offending key.
RunConfig parse_config(std::string_view text, std::optional<MapMode> mode_override = std::nullopt);
RunConfig load_config(const std::filesystem::path& path,
                      std::optional<MapMode> mode_override = std::nullopt);

/// Every effective setting as `key = value` lines; parse_config of the result
/// reproduces the same RunConfig.
std::string dump_config(const RunConfig& config);

/// Names of all recognised keys, in dump order.
std::vector<std::string> config_keys();

}  // namespace mts
