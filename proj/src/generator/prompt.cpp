#include "ctrltab/generator/prompt.hpp"

#include "ctrltab/util/error.hpp"

#include <array>
#include <map>
#include <set>

namespace ctrltab::generator {
namespace {

constexpr std::array<std::string_view, 5> kSlots = {"caption", "highlighted_cells", "table", "knowledge",
                                                    "instruction"};

constexpr std::string_view kInstruction =
    "Write a short description of the table that is consistent with the highlighted cells and knowledge.";

const std::vector<PromptTemplate>& templates() {
    static const std::vector<PromptTemplate> all = {
        {"default",
         "Caption: {caption}\n"
         "Table:\n{table}\n"
         "Highlighted cells: {highlighted_cells}\n"
         "Knowledge:\n{knowledge}\n"
         "{instruction}\n"},
        {"compact", "{instruction}\n[caption] {caption}\n[table] {table}\n[highlights] {highlighted_cells}\n"
                    "[knowledge] {knowledge}\n"},
    };
    return all;
}

std::string render_table(const Table& table) {
    std::map<int, std::vector<const Cell*>> rows;
    for (const Cell* c : table.row_major()) rows[c->row].push_back(c);
    std::string out;
    for (const auto& [_, cells] : rows) {
        if (!out.empty()) out += '\n';
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += " | ";
            out += cells[i]->value;
        }
    }
    return out;
}

std::string render_highlights(const PairRecord& pair) {
    std::string out;
    for (const Cell* c : pair.table.row_major()) {
        if (!pair.highlights.contains(c->ref())) continue;
        if (!out.empty()) out += ", ";
        out += c->attribute + "=" + c->value;
    }
    return out.empty() ? "(none)" : out;
}

std::string render_knowledge(const std::vector<KnowledgeSentence>& kb) {
    if (kb.empty()) return "(none)";
    std::string out;
    for (const auto& s : kb) {
        if (!out.empty()) out += '\n';
        out += "- " + s.text;
    }
    return out;
}

} // namespace

const PromptTemplate& prompt_template(std::string_view id) {
    for (const auto& t : templates())
        if (t.id == id) return t;
    throw ConfigError("unknown prompt template '" + std::string(id) + "'");
}

std::vector<std::string> prompt_template_ids() {
    std::vector<std::string> ids;
    for (const auto& t : templates()) ids.push_back(t.id);
    return ids;
}

std::string build_prompt(const PairRecord& pair, const std::vector<KnowledgeSentence>& kb_topn,
                         const PromptTemplate& tmpl) {
    const std::map<std::string_view, std::string> values = {
        {"caption", pair.table.caption.empty() ? "(none)" : pair.table.caption},
        {"highlighted_cells", render_highlights(pair)},
        {"table", render_table(pair.table)},
        {"knowledge", render_knowledge(kb_topn)},
        {"instruction", std::string(kInstruction)},
    };
    std::set<std::string_view> seen;
    std::string out;
    const std::string& t = tmpl.text;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == '{' && i + 1 < t.size() && t[i + 1] == '{') {
            out += '{';
            ++i;
        } else if (t[i] == '}' && i + 1 < t.size() && t[i + 1] == '}') {
            out += '}';
            ++i;
        } else if (t[i] == '{') {
            const auto close = t.find('}', i);
            if (close == std::string::npos)
                throw ConfigError("template '" + tmpl.id + "': unterminated slot");
            const std::string_view name(t.data() + i + 1, close - i - 1);
            auto it = values.find(name);
            if (it == values.end())
                throw ConfigError("template '" + tmpl.id + "': unknown slot {" + std::string(name) + "}");
            out += it->second;
            seen.insert(it->first);
            i = close;
        } else {
            out += t[i];
        }
    }
    for (auto slot : kSlots)
        if (!seen.count(slot))
            throw ConfigError("template '" + tmpl.id + "': missing slot {" + std::string(slot) + "}");
    return out;
}

} // namespace ctrltab::generator
