#pragma once

#include "ctrltab/core/types.hpp"
#include "ctrltab/corpus/align.hpp"
#include "ctrltab/corpus/article.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ctrltab::corpus {

/// A table from the source dataset, linked to its article.
struct SourceTable {
    std::string article_id;
    Table table;
    std::string description;
};

/// Table input file: one JSON object per line with keys id, article_id,
/// caption, n_rows, n_cols, cells, description.
std::vector<SourceTable> parse_source_tables(std::string_view jsonl);
std::vector<SourceTable> read_source_tables(const std::string& path);

struct BuildOptions {
    AlignOptions align;
    double theta_dup = 0.8;
    unsigned threads = 1;
};

/// Runs alignment, deduplication and auto-highlighting for every table and
/// returns pairs ordered by article id, then table input order. Tables whose
/// article is missing get an empty knowledge base. Output is independent of
/// `threads`.
std::vector<PairRecord> build_corpus(const std::vector<Article>& articles,
                                     const std::vector<SourceTable>& tables,
                                     const BuildOptions& opts);

/// Parses every *.xml file in `dir` (sorted by file name).
std::vector<Article> read_article_dir(const std::string& dir);

} // namespace ctrltab::corpus
