#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ctrltab::cli {

/// Reads a config file as flag assignments. A file whose first
/// non-blank character is '{' is a flat JSON object; otherwise it is
/// key=value lines with '#' comments. Keys are flag names without the
/// leading dashes; '_' and '-' are interchangeable. Throws ConfigError.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text);

/// Puts the config assignments ahead of the explicit arguments so that,
/// with last-one-wins options, flags override the file. `args` starts with
/// the subcommand name.
std::vector<std::string> merge_config(const std::vector<std::string>& args);

} // namespace ctrltab::cli
