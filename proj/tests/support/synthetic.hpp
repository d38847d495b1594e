#pragma once

#include "ctrltab/core/types.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace ctrltab::fixture {

/// Tables with topical knowledge bases. Each table belongs to one topic;
/// its true-source sentences draw from that topic's knowledge-side tokens,
/// which mostly do not occur in the table, and distractors draw from a
/// generic pool shared by all tables.
struct RetrievalCorpus {
    std::vector<PairRecord> pairs;
    /// pair id -> ids of its true-source sentences
    std::map<std::string, std::set<std::string>> true_sources;
    std::size_t distinct_tokens = 0;
};

struct RetrievalCorpusOptions {
    std::size_t n_tables = 20;
    std::size_t kb_size = 20;
    std::size_t n_true = 3;
    /// Chance that a sentence also carries one table-side token of its topic.
    double literal_overlap = 0.5;
    std::uint64_t seed = 42;
};

RetrievalCorpus make_retrieval_corpus(const RetrievalCorpusOptions& opts = {});

/// Mean over pairs of |retrieved ∩ true| / k.
double recall_at_k(const std::map<std::string, std::vector<std::string>>& retrieved,
                   const std::map<std::string, std::set<std::string>>& truth, std::size_t k);

/// Small distinct pairs for memorization runs; descriptions restate the
/// highlighted cells.
std::vector<PairRecord> make_memorization_pairs(std::size_t n, std::uint64_t seed = 42);

/// Pairs whose descriptions mention a token that appears only in one KB
/// sentence, so a generator without knowledge cannot recover it.
struct AblationTask {
    std::vector<PairRecord> train;
    std::vector<PairRecord> test;
};

AblationTask make_ablation_task(std::size_t n_train, std::size_t n_test, std::uint64_t seed = 42);

} // namespace ctrltab::fixture
