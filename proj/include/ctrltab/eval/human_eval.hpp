#pragma once

#include "ctrltab/core/generation_io.hpp"
#include "ctrltab/core/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctrltab::eval {

inline constexpr std::string_view kHumanEvalHeader =
    "pair_id,output,reference,table,highlights,fluency,faithfulness,recall,valid_facts";

struct HumanEvalRow {
    std::string pair_id;
    std::string output;
    std::string reference;
    std::string table;
    std::string highlights;
    /// Blank until an annotator fills the sheet.
    std::optional<int> fluency;
    std::optional<double> faithfulness;
    std::optional<double> recall;
    std::optional<double> valid_facts;
};

/// Rows in id order, then shuffled with `seed` so annotators cannot infer
/// the system from position. Unknown pair ids are a NotFoundError.
std::vector<HumanEvalRow> human_eval_rows(const std::vector<GenerationRecord>& outputs,
                                          const std::vector<PairRecord>& pairs, std::uint64_t seed);

std::string format_human_eval_sheet(const std::vector<HumanEvalRow>& rows);

/// Writes the CSV (UTF-8, CRLF rows) and `<path>.meta.json` recording the
/// seed and row count.
void export_human_eval_sheet(const std::vector<GenerationRecord>& outputs, const std::vector<PairRecord>& pairs,
                             const std::string& path, std::uint64_t seed);

/// Parses a (possibly partly filled) sheet. Throws ValidationError naming
/// the line when the header differs, fluency is not an integer in 1..5, or
/// a fraction lies outside [0, 1].
std::vector<HumanEvalRow> parse_human_eval_sheet(std::string_view text);
std::vector<HumanEvalRow> load_human_eval_sheet(const std::string& path);

struct HumanEvalSummary {
    std::size_t n_rated = 0;
    double fluency = 0;
    double faithfulness = 0;
    double recall = 0;
    double valid_facts = 0;
};

/// Means over rows with every rubric column filled.
HumanEvalSummary summarize_human_eval(const std::vector<HumanEvalRow>& rows);

} // namespace ctrltab::eval
