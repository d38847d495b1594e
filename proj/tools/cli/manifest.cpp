#include "manifest.hpp"

#include "ctrltab/util/error.hpp"
#include "ctrltab/util/hash.hpp"
#include "ctrltab/util/io.hpp"

#include <algorithm>
#include <filesystem>

namespace ctrltab::cli {

std::string directory_digest(const std::string& dir) {
    std::vector<std::string> names;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file()) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    std::string listing;
    for (const auto& n : names) {
        listing += n;
        listing.push_back('\0');
        listing += util::sha256_file((std::filesystem::path(dir) / n).string());
        listing.push_back('\n');
    }
    return util::sha256_hex(listing);
}

void Manifest::add_input(const std::string& role, const std::string& path) {
    inputs.emplace_back(role, std::filesystem::is_directory(path) ? directory_digest(path) : util::sha256_file(path));
}

nlohmann::ordered_json Manifest::to_json(const std::string& output_sha256) const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["seed"] = seed;
    j["config"] = config;
    j["config_hash"] = util::sha256_hex(config.dump());
    auto& in = j["inputs"] = nlohmann::ordered_json::object();
    for (const auto& [role, digest] : inputs) in[role] = digest;
    j["output_sha256"] = output_sha256;
    return j;
}

void write_artifact(const std::string& path, const std::string& contents, const Manifest& manifest) {
    util::write_file_atomic(path, contents);
    util::write_file_atomic(path + ".manifest.json", manifest.to_json(util::sha256_hex(contents)).dump(2) + "\n");
}

} // namespace ctrltab::cli
