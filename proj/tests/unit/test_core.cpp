#include "ctrltab/core/linearize.hpp"
#include "ctrltab/core/pairs_io.hpp"
#include "ctrltab/core/stats.hpp"
#include "ctrltab/core/tokenize.hpp"
#include "ctrltab/core/vocabulary.hpp"
#include "ctrltab/util/error.hpp"
#include "ctrltab/util/io.hpp"
#include "ctrltab/util/rng.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace ctrltab;
using Tokens = std::vector<std::string>;

TEST(Tokenize, SpecExamples) {
    EXPECT_EQ(tokenize("The BLEU is 16.90."), (Tokens{"the", "bleu", "is", "16.90", "."}));
    EXPECT_EQ(tokenize(""), Tokens{});
    EXPECT_EQ(tokenize("state-of-the-art"), (Tokens{"state", "-", "of", "-", "the", "-", "art"}));
}

TEST(Tokenize, NumbersStayWhole) {
    EXPECT_EQ(tokenize("gains of 1,234.5 and 12% (p<0.05)"),
              (Tokens{"gains", "of", "1,234.5", "and", "12", "%", "(", "p", "<", "0.05", ")"}));
    EXPECT_EQ(tokenize("-3.5 vs +2"), (Tokens{"-", "3.5", "vs", "+", "2"}));
}

TEST(Tokenize, UnicodePunctuationSplits) {
    EXPECT_EQ(tokenize("model–ours “best”"),
              (Tokens{"model", "–", "ours", "“", "best", "”"}));
}

TEST(Tokenize, IdempotentOnRejoinedTokens) {
    const std::vector<std::string> texts = {"The BLEU is 16.90.", "state-of-the-art (SOTA) results: 12%, 3.4 and -1.",
                                            "Fig. 3 shows x/y = 0.5; e.g. the 'best' run!", "  spaced\tout\nlines  "};
    for (const auto& t : texts) {
        const auto once = tokenize(t);
        std::string joined;
        for (const auto& tok : once) joined += (joined.empty() ? "" : " ") + tok;
        EXPECT_EQ(tokenize(joined), once) << t;
    }
}

TEST(Vocabulary, FrequencyOrderThenLexicographic) {
    const auto v = Vocabulary::build({{"a", "b"}, {"a"}}, 1, 100);
    EXPECT_EQ(v.id("a"), 7);
    EXPECT_EQ(v.id("b"), 8);
    const auto only_a = Vocabulary::build({{"a", "b"}, {"a"}}, 2, 100);
    EXPECT_EQ(only_a.id("a"), 7);
    EXPECT_EQ(only_a.id("b"), special::kUnk);
    const auto ties = Vocabulary::build({{"b"}, {"a"}}, 1, 100);
    EXPECT_EQ(ties.id("a"), 7);
    EXPECT_EQ(ties.id("b"), 8);
}

TEST(Vocabulary, ReservedIdsAndSizeCap) {
    const auto v = Vocabulary::build({{"x", "y", "z"}}, 1, 9);
    EXPECT_EQ(v.size(), 9u);
    EXPECT_EQ(v.id("<pad>"), special::kPad);
    EXPECT_EQ(v.token(special::kSepB).empty(), false);
    EXPECT_THROW(Vocabulary::build({{"x"}}, 1, 7), ConfigError);
}

TEST(Vocabulary, RoundTripAndUnknowns) {
    const auto v = Vocabulary::build({{"the", "model", "wins"}, {"the", "table"}}, 1, 100);
    const Tokens in = {"the", "table", "model", "wins"};
    const auto ids = v.encode(in);
    EXPECT_EQ(v.decode(ids), in);
    EXPECT_EQ(v.encode({"never-seen"}), std::vector<TokenId>{special::kUnk});
    EXPECT_EQ(Vocabulary::from_tokens(v.tokens()), v);
}

namespace {

Table one_cell_table() {
    Table t;
    t.id = "t";
    t.n_rows = 1;
    t.n_cols = 1;
    t.cells.push_back({0, 0, "model", "ours", false});
    return t;
}

Vocabulary vocab_for(const Segments& s) {
    std::vector<Tokens> corpus = {s.highlights, s.table, s.knowledge};
    return Vocabulary::build(corpus, 1, 1000);
}

std::vector<std::string> decode_all(const LinearizedInput& in, const Vocabulary& v) { return v.decode(in.token_ids); }

} // namespace

TEST(Linearize, OneCellTable) {
    const Table t = one_cell_table();
    const auto seg = render_segments(t, {}, {});
    const auto v = vocab_for(seg);
    const auto in = linearize(t, {}, {}, SegmentOrder::HTB, v);
    EXPECT_EQ(in.token_ids, (std::vector<TokenId>{special::kSepH, special::kSepT, v.id("model"), v.id(":"),
                                                  v.id("ours"), v.id("|"), special::kSepB}));
    EXPECT_EQ(in.l_h, 0u);
    EXPECT_EQ(in.l_t, 4u);
    EXPECT_EQ(in.l_b, 0u);
}

TEST(Linearize, HighlightedCellRepeats) {
    const Table t = one_cell_table();
    HighlightSet h;
    h.refs = {{0, 0}};
    const auto seg = render_segments(t, h, {});
    EXPECT_EQ(seg.highlights, (Tokens{"model", ":", "ours", "|"}));
    const auto v = vocab_for(seg);
    const auto bth = linearize(t, h, {}, SegmentOrder::BTH, v);
    EXPECT_EQ(bth.token_ids.front(), special::kSepB);
    EXPECT_EQ(bth.token_ids[1], special::kSepT);
    EXPECT_EQ(decode_all(bth, v).back(), "|");
}

TEST(Linearize, KnowledgeOnly) {
    Table empty;
    const std::vector<KnowledgeSentence> kb = {{"s0", "x y", KbStatus::automatic, std::nullopt}};
    const auto seg = render_segments(empty, {}, {"x y"});
    const auto in = linearize(empty, {}, kb, SegmentOrder::HTB, vocab_for(seg));
    EXPECT_EQ(in.l_t, 0u);
    EXPECT_EQ(in.l_b, 3u);  // "x", "y" and the trailing "|"
    EXPECT_EQ(in.token_ids.size(), 6u);
}

TEST(Linearize, UnknownOrderIsAnError) { EXPECT_THROW(segment_order_from_string("THB"), ConfigError); }

TEST(Linearize, LengthLawOnRandomTables) {
    util::CounterRng rng(17);
    const std::vector<std::string> words = {"model", "ours", "bleu", "27.3", "state-of-the-art", "x", "1,200"};
    for (int trial = 0; trial < 100; ++trial) {
        const int rows = 1 + static_cast<int>(rng.below(4));
        const int cols = 1 + static_cast<int>(rng.below(4));
        Table t;
        t.n_rows = rows;
        t.n_cols = cols;
        HighlightSet h;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                t.cells.push_back({r, c, words[rng.below(words.size())], words[rng.below(words.size())], r == 0});
                if (rng.uniform() < 0.3) h.refs.insert({r, c});
            }
        std::vector<KnowledgeSentence> kb;
        for (std::size_t k = 0; k < rng.below(4); ++k)
            kb.push_back({"s" + std::to_string(k), words[rng.below(words.size())] + " and " + words[rng.below(words.size())],
                          KbStatus::automatic, std::nullopt});
        std::vector<std::string> kb_text;
        for (const auto& s : kb) kb_text.push_back(s.text);
        const auto v = vocab_for(render_segments(t, h, kb_text));
        for (auto order : {SegmentOrder::HTB, SegmentOrder::BTH}) {
            const auto in = linearize(t, h, kb, order, v);
            EXPECT_EQ(in.token_ids.size(), in.l_h + in.l_t + in.l_b + 3);
            for (TokenId id : in.token_ids) EXPECT_LT(static_cast<std::size_t>(id), v.size());
        }
    }
}

TEST(Linearize, TruncationTrimsKnowledgeFirst) {
    const Table t = fixture::make_table("t", {"model", "bleu"}, {{"ours", "27.3"}});
    HighlightSet h;
    h.refs = {{1, 1}};
    const std::vector<KnowledgeSentence> kb = {{"s0", "a b c d e f", KbStatus::automatic, std::nullopt}};
    const auto seg = render_segments(t, h, {"a b c d e f"});
    const auto v = vocab_for(seg);
    const auto full = linearize(t, h, kb, SegmentOrder::HTB, v);
    const auto cut = linearize(t, h, kb, SegmentOrder::HTB, v, full.token_ids.size() - 4);
    EXPECT_TRUE(cut.truncated);
    EXPECT_EQ(cut.l_b, full.l_b - 4);
    EXPECT_EQ(cut.l_t, full.l_t);
    EXPECT_EQ(cut.l_h, full.l_h);
}

namespace {

std::vector<PairRecord> two_pairs() {
    auto a = fixture::make_pair("p1", fixture::make_table("p1", {"model", "bleu"}, {{"ours", "27.3"}}), {{1, 1}},
                                {"ours uses attention"}, "ours reaches 27.3 bleu");
    a.kb.sentences[0].source_offset = std::make_pair(std::size_t{10}, std::size_t{29});
    auto b = fixture::make_pair("p2", fixture::make_table("p2", {"method", "f1"}, {{"crf", "88.1"}, {"lstm", "90.2"}}),
                                {}, {"a \"quoted\" fact", "second"}, "");
    b.kb.sentences[1].status = KbStatus::rejected;
    b.split = Split::test;
    return {a, b};
}

} // namespace

TEST(PairsIo, RoundTrip) {
    const auto pairs = two_pairs();
    const std::string text = format_pairs(pairs);
    const auto back = parse_pairs(text);
    EXPECT_EQ(back, pairs);
    EXPECT_EQ(format_pairs(back), text);
    EXPECT_TRUE(parse_pairs("").empty());
}

TEST(PairsIo, CanonicalKeyOrder) {
    const std::string line = format_pair(two_pairs()[0]);
    EXPECT_EQ(line.rfind(R"({"id":"p1","table":{"caption":)", 0), 0u) << line;
    EXPECT_LT(line.find("\"highlights\""), line.find("\"kb\""));
    EXPECT_LT(line.find("\"description\""), line.find("\"split\""));
    EXPECT_EQ(line.find(' ', line.find("\"split\"")), std::string::npos);
}

TEST(PairsIo, FileRoundTrip) {
    const auto path = (std::filesystem::temp_directory_path() / "ctrltab_core_pairs.jsonl").string();
    write_pairs(path, two_pairs());
    EXPECT_EQ(read_pairs(path), two_pairs());
}

TEST(PairsIo, MalformedLineNamesLine) {
    const std::string text = format_pair(two_pairs()[0]) + "\n{\"id\": 1}\n";
    try {
        parse_pairs(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 2u);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(PairsIo, BadHighlightNamesPair) {
    auto p = two_pairs()[0];
    p.highlights.refs.insert({9, 9});
    try {
        parse_pairs(format_pair(p));
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("p1"), std::string::npos) << e.what();
    }
}

TEST(PairsIo, TrainPairNeedsDescription) {
    auto p = two_pairs()[1];
    p.split = Split::train;
    EXPECT_THROW(parse_pairs(format_pair(p)), ValidationError);
}

TEST(Split, StableHashAssignment) {
    std::size_t counts[3] = {0, 0, 0};
    for (int i = 0; i < 2000; ++i) counts[static_cast<int>(split_for_id("pair" + std::to_string(i)))]++;
    EXPECT_EQ(split_for_id("pair7"), split_for_id("pair7"));
    EXPECT_NEAR(counts[0] / 2000.0, 0.8, 0.04);
    EXPECT_NEAR(counts[1] / 2000.0, 0.1, 0.03);
    EXPECT_NEAR(counts[2] / 2000.0, 0.1, 0.03);
}

TEST(CorpusStats, SinglePair) {
    const auto p = fixture::make_pair("s1", fixture::make_table("s1", {"a", "b"}, {{"1", "2"}}), {{1, 0}},
                                      {"k1", "k2", "k3"}, "one two three four five");
    const auto s = corpus_stats({p});
    EXPECT_DOUBLE_EQ(s.n_pairs, 1);
    EXPECT_DOUBLE_EQ(s.avg_cells, 4.0);
    EXPECT_DOUBLE_EQ(s.avg_desc_tokens, 5.0);
    EXPECT_DOUBLE_EQ(s.highlight_ratio, 0.25);
    EXPECT_DOUBLE_EQ(s.avg_kb_sentences, 3.0);
}

TEST(CorpusStats, MeansAndErrors) {
    const auto a = fixture::make_pair("a", fixture::make_table("a", {"x"}, {{"1"}}), {}, {}, "d");
    const auto b = fixture::make_pair("b", fixture::make_table("b", {"x", "y"}, {{"1", "2"}, {"3", "4"}}), {}, {}, "d");
    EXPECT_DOUBLE_EQ(corpus_stats({a, b}).avg_cells, 4.0);
    EXPECT_THROW(corpus_stats({}), ValidationError);
}

TEST(Table, ValidateRejectsBadCells) {
    Table t = fixture::make_table("t", {"x"}, {{"1"}});
    EXPECT_NO_THROW(t.validate());
    t.cells.push_back({5, 0, "x", "9", false});
    EXPECT_THROW(t.validate(), ValidationError);
    t.cells.pop_back();
    t.cells.push_back({1, 0, "x", "dup", false});
    EXPECT_THROW(t.validate(), ValidationError);
}
