#include "mtstereo/dataset.hpp"

#include <fstream>
#include <sstream>

namespace mts {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

DatasetIndex load_dataset_index(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DatasetError("cannot open dataset index '" + path.string() + "'");
    }
    const std::filesystem::path base = path.parent_path();
    const auto resolve = [&](const std::string& p) {
        const std::filesystem::path given(p);
        std::filesystem::path resolved = given.is_absolute() ? given : base / given;
        if (!std::filesystem::exists(resolved)) {
            throw DatasetError("dataset file does not exist: '" + resolved.string() + "'");
        }
        return resolved;
    };

    DatasetIndex index;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(stripped);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(trim(field));
        }
        if (!fields.empty() && stripped.back() == ',') {
            fields.emplace_back();
        }
        if (fields.size() < 3 || fields.size() > 4 || fields[0].empty()) {
            throw DatasetError("index line " + std::to_string(line_no) +
                               ": expected 'name,left,right[,gt]'");
        }
        DatasetEntry entry{fields[0], resolve(fields[1]), resolve(fields[2]), std::nullopt};
        if (fields.size() == 4 && !fields[3].empty()) {
            entry.ground_truth = resolve(fields[3]);
        }
        index.entries.push_back(std::move(entry));
    }
    return index;
}

}  // namespace mts
