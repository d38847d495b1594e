#include "ctrltab/eval/human_eval.hpp"

#include "ctrltab/util/csv.hpp"
#include "ctrltab/util/error.hpp"
#include "ctrltab/util/io.hpp"
#include "ctrltab/util/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <map>

namespace ctrltab::eval {
namespace {

std::string table_snippet(const Table& t) {
    std::map<int, std::string> rows;
    for (const Cell* c : t.row_major()) {
        auto& r = rows[c->row];
        if (!r.empty()) r += " | ";
        r += c->value;
    }
    std::string out;
    for (const auto& [_, r] : rows) {
        if (!out.empty()) out += " || ";
        out += r;
    }
    return out;
}

std::string highlight_snippet(const PairRecord& p) {
    std::string out;
    for (const Cell* c : p.table.row_major()) {
        if (!p.highlights.contains(c->ref())) continue;
        if (!out.empty()) out += ", ";
        out += c->attribute + "=" + c->value;
    }
    return out;
}

std::string fmt(const std::optional<double>& v) {
    if (!v) return "";
    return nlohmann::json(*v).dump();
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_fraction(const std::string& raw, const char* column, std::size_t line) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !(v >= 0.0 && v <= 1.0))
        throw ValidationError("line " + std::to_string(line) + ": " + column + " must be a fraction in [0, 1], got '" +
                              s + "'");
    return v;
}

} // namespace

std::vector<HumanEvalRow> human_eval_rows(const std::vector<GenerationRecord>& outputs,
                                          const std::vector<PairRecord>& pairs, std::uint64_t seed) {
    std::map<std::string, const PairRecord*> by_id;
    for (const auto& p : pairs) by_id[p.id] = &p;
    std::vector<HumanEvalRow> rows;
    for (const auto& o : outputs) {
        auto it = by_id.find(o.pair_id);
        if (it == by_id.end()) throw NotFoundError("output for unknown pair " + o.pair_id);
        const PairRecord& p = *it->second;
        rows.push_back({o.pair_id, o.output, p.description, table_snippet(p.table), highlight_snippet(p), {}, {}, {}, {}});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const HumanEvalRow& a, const HumanEvalRow& b) { return a.pair_id < b.pair_id; });
    util::CounterRng rng(util::derive_seed(seed, "human-eval"));
    rng.shuffle(rows);
    return rows;
}

std::string format_human_eval_sheet(const std::vector<HumanEvalRow>& rows) {
    std::string out(kHumanEvalHeader);
    out += "\r\n";
    for (const auto& r : rows) {
        out += util::csv_format_row({r.pair_id, r.output, r.reference, r.table, r.highlights,
                                     r.fluency ? std::to_string(*r.fluency) : std::string(), fmt(r.faithfulness),
                                     fmt(r.recall), fmt(r.valid_facts)});
    }
    return out;
}

void export_human_eval_sheet(const std::vector<GenerationRecord>& outputs, const std::vector<PairRecord>& pairs,
                             const std::string& path, std::uint64_t seed) {
    const auto rows = human_eval_rows(outputs, pairs, seed);
    util::write_file_atomic(path, format_human_eval_sheet(rows));
    nlohmann::ordered_json meta;
    meta["seed"] = seed;
    meta["rows"] = rows.size();
    meta["header"] = std::string(kHumanEvalHeader);
    util::write_file_atomic(path + ".meta.json", meta.dump(2) + "\n");
}

std::vector<HumanEvalRow> parse_human_eval_sheet(std::string_view text) {
    const auto table = util::csv_parse(text);
    if (table.empty()) throw ValidationError("human-eval sheet is empty");
    std::string header;
    for (std::size_t i = 0; i < table[0].size(); ++i) header += (i ? "," : "") + table[0][i];
    if (header != kHumanEvalHeader) throw ValidationError("line 1: unexpected human-eval header");
    std::vector<HumanEvalRow> rows;
    for (std::size_t i = 1; i < table.size(); ++i) {
        const auto& f = table[i];
        const std::size_t line = i + 1;
        if (f.size() == 1 && f[0].empty()) continue;
        if (f.size() != 9)
            throw ValidationError("line " + std::to_string(line) + ": expected 9 columns, got " + std::to_string(f.size()));
        HumanEvalRow r{f[0], f[1], f[2], f[3], f[4], {}, {}, {}, {}};
        if (const std::string s = trim(f[5]); !s.empty()) {
            int v = 0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || ptr != s.data() + s.size() || v < 1 || v > 5)
                throw ValidationError("line " + std::to_string(line) + ": fluency must be an integer 1-5, got '" + s + "'");
            r.fluency = v;
        }
        r.faithfulness = parse_fraction(f[6], "faithfulness", line);
        r.recall = parse_fraction(f[7], "recall", line);
        r.valid_facts = parse_fraction(f[8], "valid_facts", line);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<HumanEvalRow> load_human_eval_sheet(const std::string& path) {
    return parse_human_eval_sheet(util::read_file(path));
}

HumanEvalSummary summarize_human_eval(const std::vector<HumanEvalRow>& rows) {
    HumanEvalSummary s;
    for (const auto& r : rows) {
        if (!r.fluency || !r.faithfulness || !r.recall || !r.valid_facts) continue;
        ++s.n_rated;
        s.fluency += *r.fluency;
        s.faithfulness += *r.faithfulness;
        s.recall += *r.recall;
        s.valid_facts += *r.valid_facts;
    }
    if (s.n_rated) {
        const double n = static_cast<double>(s.n_rated);
        s.fluency /= n;
        s.faithfulness /= n;
        s.recall /= n;
        s.valid_facts /= n;
    }
    return s;
}

} // namespace ctrltab::eval
