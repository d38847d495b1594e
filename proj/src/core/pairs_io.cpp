#include "ctrltab/core/pairs_io.hpp"

#include "ctrltab/util/error.hpp"
#include "ctrltab/util/io.hpp"

#include <nlohmann/json.hpp>

namespace ctrltab {
namespace {

using ojson = nlohmann::ordered_json;

ojson to_json(const PairRecord& p) {
    ojson cells = ojson::array();
    for (const auto& c : p.table.cells) {
        ojson cj;
        cj["row"] = c.row;
        cj["col"] = c.col;
        cj["attribute"] = c.attribute;
        cj["value"] = c.value;
        cj["is_header"] = c.is_header;
        cells.push_back(std::move(cj));
    }
    ojson table;
    table["caption"] = p.table.caption;
    table["n_rows"] = p.table.n_rows;
    table["n_cols"] = p.table.n_cols;
    table["cells"] = std::move(cells);

    ojson highlights = ojson::array();
    for (const auto& r : p.highlights.refs) highlights.push_back(ojson::array({r.row, r.col}));

    ojson kb = ojson::array();
    for (const auto& s : p.kb.sentences) {
        ojson sj;
        sj["id"] = s.id;
        sj["text"] = s.text;
        sj["status"] = std::string(to_string(s.status));
        if (s.source_offset) {
            sj["source_offset"] = ojson::array({s.source_offset->first, s.source_offset->second});
        }
        kb.push_back(std::move(sj));
    }

    ojson j;
    j["id"] = p.id;
    j["table"] = std::move(table);
    j["highlights"] = std::move(highlights);
    j["kb"] = std::move(kb);
    j["description"] = p.description;
    j["split"] = std::string(to_string(p.split));
    return j;
}

const ojson& field(const ojson& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw std::out_of_range(std::string("missing key '") + key + "'");
    return *it;
}

PairRecord from_json(const ojson& j) {
    PairRecord p;
    p.id = field(j, "id").get<std::string>();
    const ojson& t = field(j, "table");
    p.table.id = p.id;
    p.table.caption = field(t, "caption").get<std::string>();
    p.table.n_rows = field(t, "n_rows").get<int>();
    p.table.n_cols = field(t, "n_cols").get<int>();
    for (const auto& cj : field(t, "cells")) {
        Cell c;
        c.row = field(cj, "row").get<int>();
        c.col = field(cj, "col").get<int>();
        c.attribute = field(cj, "attribute").get<std::string>();
        c.value = field(cj, "value").get<std::string>();
        c.is_header = field(cj, "is_header").get<bool>();
        p.table.cells.push_back(std::move(c));
    }
    for (const auto& hj : field(j, "highlights")) {
        if (!hj.is_array() || hj.size() != 2) throw std::out_of_range("highlight must be [row,col]");
        p.highlights.refs.insert({hj[0].get<int>(), hj[1].get<int>()});
    }
    for (const auto& sj : field(j, "kb")) {
        KnowledgeSentence s;
        s.id = field(sj, "id").get<std::string>();
        s.text = field(sj, "text").get<std::string>();
        s.status = kb_status_from_string(field(sj, "status").get<std::string>());
        if (auto it = sj.find("source_offset"); it != sj.end()) {
            s.source_offset = std::make_pair(it->at(0).get<std::size_t>(),
                                             it->at(1).get<std::size_t>());
        }
        p.kb.sentences.push_back(std::move(s));
    }
    p.description = field(j, "description").get<std::string>();
    p.split = split_from_string(field(j, "split").get<std::string>());
    return p;
}

} // namespace

std::string format_pair(const PairRecord& pair) { return to_json(pair).dump(); }

PairRecord parse_pair(std::string_view line, std::size_t line_no) {
    PairRecord p;
    try {
        p = from_json(ojson::parse(line));
    } catch (const ValidationError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
    } catch (const std::exception& e) {
        throw ParseError("line " + std::to_string(line_no) + ": malformed record: " + e.what(),
                         line_no);
    }
    p.validate();
    return p;
}

std::vector<PairRecord> parse_pairs(std::string_view text) {
    std::vector<PairRecord> out;
    util::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        out.push_back(parse_pair(line, line_no));
    });
    return out;
}

std::string format_pairs(const std::vector<PairRecord>& pairs) {
    std::string out;
    for (const auto& p : pairs) {
        out += format_pair(p);
        out += '\n';
    }
    return out;
}

std::vector<PairRecord> read_pairs(const std::string& path) {
    return parse_pairs(util::read_file(path));
}

void write_pairs(const std::string& path, const std::vector<PairRecord>& pairs) {
    util::write_file_atomic(path, format_pairs(pairs));
}

} // namespace ctrltab
