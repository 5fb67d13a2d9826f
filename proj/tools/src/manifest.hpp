#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace sirp::tool {

// Reproducibility envelope: which inputs (by content digest), which
// configuration and which outputs belong to one command invocation.
// Input digests are taken before any solving starts.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs; // (path, sha256)
    std::uint64_t seed = 0;
    nlohmann::ordered_json config;
    std::string tool_version;
    double wall_seconds = 0.0;
    std::vector<std::string> outputs;

    void add_input(const std::string& path); // hashes immediately
    void write(const std::string& out_dir) const; // <out_dir>/<command>_manifest.json
};

std::string sha256_file(const std::string& path);

} // namespace sirp::tool
