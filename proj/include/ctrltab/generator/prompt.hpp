#pragma once

#include "ctrltab/core/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ctrltab::generator {

struct PromptTemplate {
    std::string id;
    std::string text;
};

/// Built-in template ids: "default", "compact".
const PromptTemplate& prompt_template(std::string_view id);
std::vector<std::string> prompt_template_ids();

/// Fills {caption} {highlighted_cells} {table} {knowledge} {instruction}.
/// Highlighted cells render as "attribute=value" joined by ", "; the table
/// renders one row per line with cells joined by " | "; knowledge renders
/// one "- sentence" line each, or "(none)". Throws ConfigError when the
/// template lacks a slot or names an unknown one.
std::string build_prompt(const PairRecord& pair, const std::vector<KnowledgeSentence>& kb_topn,
                         const PromptTemplate& tmpl);

} // namespace ctrltab::generator
