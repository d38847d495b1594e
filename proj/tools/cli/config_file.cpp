#include "config_file.hpp"

#include "ctrltab/util/error.hpp"
#include "ctrltab/util/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace ctrltab::cli {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string normalize_key(std::string key) {
    key = trim(key);
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty()) throw ConfigError("config has an empty key");
    return key;
}

} // namespace

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    const std::string body = trim(text);
    if (!body.empty() && body.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        for (const auto& [key, value] : j.items()) {
            std::string v;
            if (value.is_string()) v = value.get<std::string>();
            else if (value.is_number() || value.is_boolean()) v = value.dump();
            else throw ConfigError("config key '" + key + "' must be a string, number or boolean");
            out.emplace_back(normalize_key(key), v);
        }
        return out;
    }
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        std::string l = trim(line.substr(0, line.find('#')));
        if (l.empty()) continue;
        const auto eq = l.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        out.emplace_back(normalize_key(l.substr(0, eq)), trim(l.substr(eq + 1)));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::string text;
    try {
        text = util::read_file(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return parse_config_text(text);
}

std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || args.empty()) return args;
    std::vector<std::string> merged = {args[0]};
    for (const auto& [key, value] : read_config_file(path)) {
        if (key == "config") throw ConfigError("config files cannot include other config files");
        merged.push_back("--" + key + "=" + value);
    }
    merged.insert(merged.end(), args.begin() + 1, args.end());
    return merged;
}

} // namespace ctrltab::cli
