#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mts {

class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DatasetEntry {
    std::string name;
    std::filesystem::path left;
    std::filesystem::path right;
    std::optional<std::filesystem::path> ground_truth;
};

struct DatasetIndex {
    std::vector<DatasetEntry> entries;
};

/// Reads an index of `name,left,right[,gt]` lines. Blank lines and lines
/// starting with `#` are skipped; relative paths are resolved against the
/// index file's directory. Every referenced file must exist.
DatasetIndex load_dataset_index(const std::filesystem::path& path);

}  // namespace mts
