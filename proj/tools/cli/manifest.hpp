#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ctrltab::cli {

/// Provenance written next to every artifact as `<out>.manifest.json`.
/// Holds no timestamps, paths or thread counts, so identical runs produce
/// identical manifests.
struct Manifest {
    std::string subcommand;
    std::uint64_t seed = 0;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    /// role -> SHA-256 of the input file (or of a directory listing).
    std::vector<std::pair<std::string, std::string>> inputs;

    void add_input(const std::string& role, const std::string& path);
    nlohmann::ordered_json to_json(const std::string& output_sha256) const;
};

/// SHA-256 over "name\0sha256\n" for each regular file, sorted by name.
std::string directory_digest(const std::string& dir);

/// Writes `contents` to `path` and its manifest, both atomically.
void write_artifact(const std::string& path, const std::string& contents, const Manifest& manifest);

} // namespace ctrltab::cli
