#include "ctrltab/core/pairs_io.hpp"
#include "ctrltab/corpus/agreement.hpp"
#include "ctrltab/corpus/align.hpp"
#include "ctrltab/corpus/article.hpp"
#include "ctrltab/corpus/builder.hpp"
#include "ctrltab/corpus/mentions.hpp"
#include "ctrltab/corpus/stopwords.hpp"
#include "ctrltab/util/error.hpp"
#include "ctrltab/util/io.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace ctrltab;
using namespace ctrltab::corpus;

namespace {

Article article_from(const std::string& id, const std::vector<std::string>& sentences) {
    Article a;
    a.id = id;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        a.sentences.push_back({i, sentences[i], a.text.size()});
        a.text += sentences[i] + " ";
    }
    return a;
}

Table results_table() {
    Table t = fixture::make_table("t1", {"model", "bleu"}, {{"ours", "27.3"}, {"crf", "25.1"}});
    t.caption = "translation results";
    return t;
}

bool has_kind(const std::vector<Mention>& ms, MentionKind k) {
    return std::any_of(ms.begin(), ms.end(), [&](const Mention& m) { return m.kind == k; });
}

} // namespace

TEST(Article, TwoSentenceParagraphWithOffsets) {
    const auto a = parse_article_xml(
        R"(<article id="a1"><sec><p>First claim holds. Second claim follows here.</p></sec></article>)");
    EXPECT_EQ(a.id, "a1");
    ASSERT_EQ(a.sentences.size(), 2u);
    EXPECT_EQ(a.sentences[0].text, "First claim holds.");
    EXPECT_EQ(a.sentences[1].text, "Second claim follows here.");
    for (const auto& s : a.sentences) EXPECT_EQ(a.text.substr(s.char_offset, s.text.size()), s.text);
    EXPECT_EQ(a.sentences[1].char_offset, 19u);
}

TEST(Article, EmptyArticle) {
    const auto a = parse_article_xml("<article></article>");
    EXPECT_TRUE(a.sentences.empty());
}

TEST(Article, TruncatedXmlReportsOffset) {
    try {
        parse_article_xml(R"(<article id="a"><sec><p>Unclosed text)");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_GT(e.position(), 0u);
    }
}

TEST(Article, ForeignRootRejected) { EXPECT_THROW(parse_article_xml("<html><p>x</p></html>"), ValidationError); }

TEST(Article, TablesAndUnknownElements) {
    const auto a = parse_article_xml(R"(<article id="a2"><sec><p>We use <b>bold</b> words.</p><figure>skip</figure></sec>
<table-wrap id="t9"><caption>Main results</caption></table-wrap></article>)");
    ASSERT_EQ(a.sentences.size(), 1u);
    EXPECT_EQ(a.sentences[0].text, "We use bold words.");
    EXPECT_EQ(a.table_ids, std::vector<std::string>{"t9"});
    EXPECT_EQ(a.table_captions.at("t9"), "Main results");
}

TEST(Article, MultiParagraphOffsets) {
    const auto a = parse_article_xml(R"(<article id="a"><sec><p>One here.</p><p>Two there. Three too.</p></sec></article>)");
    ASSERT_EQ(a.sentences.size(), 3u);
    for (std::size_t i = 0; i < a.sentences.size(); ++i) {
        EXPECT_EQ(a.sentences[i].index, i);
        EXPECT_EQ(a.text.substr(a.sentences[i].char_offset, a.sentences[i].text.size()), a.sentences[i].text);
    }
}

TEST(SplitSentences, AbbreviationGuard) {
    const auto s = split_sentences("As shown by Smith et al. The model wins. See Fig. 3 for details.");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0].second, "As shown by Smith et al. The model wins.");
    EXPECT_EQ(s[1].second, "See Fig. 3 for details.");
    EXPECT_EQ(split_sentences("It ends. then lowercase.").size(), 1u);
    EXPECT_EQ(split_sentences("Why? Because! Yes.").size(), 3u);
}

TEST(Stopwords, ShippedList) {
    EXPECT_EQ(stopwords().size(), 127u);
    EXPECT_TRUE(is_stopword("the"));
    EXPECT_FALSE(is_stopword("bleu"));
}

TEST(Mentions, ExactAndNumeric) {
    const Table t = fixture::make_table("t", {"BLEU"}, {{"16.90"}});
    const auto ms = detect_entity_mentions("BLEU reaches 16.90", t);
    EXPECT_TRUE(has_kind(ms, MentionKind::numeric));
    EXPECT_TRUE(has_kind(ms, MentionKind::value_exact));
    for (const auto& m : ms)
        if (m.kind != MentionKind::attribute) {
            EXPECT_EQ(m.cell_ref, (CellRef{1, 0}));
            EXPECT_EQ(m.begin, 13u);
            EXPECT_EQ(m.end, 18u);
        }
    EXPECT_TRUE(std::is_sorted(ms.begin(), ms.end(), [](const Mention& a, const Mention& b) { return a.begin < b.begin; }));
}

TEST(Mentions, RoundedNumeric) {
    const Table t = fixture::make_table("t", {"BLEU"}, {{"16.90"}});
    const auto ms = detect_entity_mentions("score 16.9", t);
    EXPECT_TRUE(has_kind(ms, MentionKind::numeric));
    EXPECT_FALSE(has_kind(ms, MentionKind::value_exact));
    EXPECT_TRUE(has_value_mention("score 16.9", t, {1, 0}));
    const Table pct = fixture::make_table("t", {"acc"}, {{"1,234%"}});
    EXPECT_TRUE(has_value_mention("reached 1234 overall", pct, {1, 0}));
}

TEST(Mentions, UnrelatedSentence) {
    const Table t = fixture::make_table("t", {"BLEU"}, {{"16.90"}});
    EXPECT_TRUE(detect_entity_mentions("we thank the reviewers", t).empty());
    EXPECT_TRUE(detect_entity_mentions("", t).empty());
}

TEST(Align, OverlapAboveThresholdKept) {
    const Table t = results_table();
    const std::string s = "CRF and BLEU reach 27.3";
    EXPECT_DOUBLE_EQ(overlap_score(s, t), 0.75);
    AlignOptions o;
    o.theta_overlap = 0.5;
    const auto kb = greedy_align(t, article_from("a", {s}), o);
    ASSERT_EQ(kb.size(), 1u);
    EXPECT_EQ(kb[0].text, s);
    EXPECT_EQ(kb[0].id, "a:s0");
    EXPECT_EQ(kb[0].status, KbStatus::automatic);
    EXPECT_EQ(kb[0].source_offset, std::make_pair(std::size_t{0}, s.size()));
}

TEST(Align, NoMentionDropped) {
    const Table t = results_table();
    const std::string s = "Translation results improved";
    EXPECT_GE(overlap_score(s, t), 0.5);
    AlignOptions o;
    o.theta_overlap = 0.5;
    EXPECT_TRUE(greedy_align(t, article_from("a", {s}), o).empty());
}

TEST(Align, CapKeepsHighestScore) {
    const Table t = results_table();
    const std::string low = "CRF and BLEU reach 27.3 points together";  // 3/6
    const std::string high = "CRF and BLEU reach 27.3";                  // 3/4
    AlignOptions o;
    o.cap = 1;
    const auto kb = greedy_align(t, article_from("a", {low, high}), o);
    ASSERT_EQ(kb.size(), 1u);
    EXPECT_EQ(kb[0].text, high);
    o.cap = 40;
    const auto both = greedy_align(t, article_from("a", {low, high}), o);
    ASSERT_EQ(both.size(), 2u);
    EXPECT_EQ(both[0].text, high);
}

TEST(Align, SentenceGoesToBestTable) {
    const Table a = results_table();
    Table b = fixture::make_table("t2", {"model", "f1"}, {{"crf", "88.1"}, {"lstm", "90.2"}});
    const auto art = article_from("x", {"The lstm beats crf with 90.2 f1", "Ours reaches 27.3 bleu"});
    const auto out = greedy_align_all({&a, &b}, art, {});
    ASSERT_EQ(out.size(), 2u);
    ASSERT_EQ(out[0].size(), 1u);
    ASSERT_EQ(out[1].size(), 1u);
    EXPECT_EQ(out[0][0].id, "x:s1");
    EXPECT_EQ(out[1][0].id, "x:s0");
}

TEST(Dedup, IdenticalDroppedDisjointKept) {
    const std::vector<KnowledgeSentence> c = {{"s0", "Ours reaches 27.3 BLEU.", KbStatus::automatic, std::nullopt},
                                              {"s1", "Training took two days.", KbStatus::automatic, std::nullopt}};
    const auto out = dedup_against_description(c, "Ours reaches 27.3 BLEU.", 0.8);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].id, "s1");
}

TEST(Dedup, BoundaryF1IsDropped) {
    EXPECT_DOUBLE_EQ(token_f1("a b c d e", "a b c d f"), 0.8);
    const std::vector<KnowledgeSentence> c = {{"s0", "a b c d e", KbStatus::automatic, std::nullopt}};
    EXPECT_TRUE(dedup_against_description(c, "a b c d f", 0.8).empty());
    EXPECT_EQ(dedup_against_description(c, "a b c d f", 0.81).size(), 1u);
}

TEST(Dedup, ContainmentDropped) {
    const std::vector<KnowledgeSentence> c = {{"s0", "ours reaches 27.3", KbStatus::automatic, std::nullopt}};
    EXPECT_TRUE(dedup_against_description(c, "In short, ours reaches 27.3 and more words follow here", 0.8).empty());
}

TEST(Dedup, Idempotent) {
    const std::vector<KnowledgeSentence> c = {{"s0", "alpha beta gamma", KbStatus::automatic, std::nullopt},
                                              {"s1", "alpha beta delta", KbStatus::automatic, std::nullopt},
                                              {"s2", "epsilon zeta", KbStatus::automatic, std::nullopt}};
    const std::string d = "alpha beta gamma. Something else.";
    const auto once = dedup_against_description(c, d, 0.6);
    EXPECT_EQ(dedup_against_description(once, d, 0.6), once);
}

TEST(AutoHighlight, QuotedValues) {
    const Table t = results_table();
    const auto h = auto_highlight(t, "Ours gets 27.3 while the CRF gets 25.1.");
    EXPECT_EQ(h.refs, (std::set<CellRef>{{1, 0}, {1, 1}, {2, 0}, {2, 1}}));
    EXPECT_EQ(auto_highlight(t, "It reaches 27.3 and 25.1 respectively.").size(), 2u);
}

TEST(AutoHighlight, HeaderOnlyAndEmpty) {
    const Table t = results_table();
    EXPECT_TRUE(auto_highlight(t, "The model column and bleu column.").empty());
    EXPECT_TRUE(auto_highlight(t, "").empty());
}

TEST(AutoHighlight, MonotoneInDescription) {
    const Table t = results_table();
    const std::string base = "The score is 27.3.";
    const auto small = auto_highlight(t, base);
    const auto large = auto_highlight(t, base + " The crf trails.");
    EXPECT_TRUE(std::includes(large.refs.begin(), large.refs.end(), small.refs.begin(), small.refs.end()));
    EXPECT_GT(large.size(), small.size());
}

namespace {

std::vector<PairRecord> agreement_pairs() {
    auto p = fixture::make_pair("p", fixture::make_table("p", {"a"}, {{"1"}, {"2"}}), {}, {"k1", "k2", "k3"}, "d");
    return {p};
}

Annotation annotation(std::set<CellRef> cells, std::map<std::string, bool> keep) {
    Annotation a;
    a.pair_id = "p";
    a.highlights.refs = std::move(cells);
    a.kb_keep = std::move(keep);
    return a;
}

} // namespace

TEST(Agreement, IdenticalIsOne) {
    const auto pairs = agreement_pairs();
    const auto a = annotation({{1, 0}}, {{"p:s0", false}});
    const auto r = compute_agreement({a}, {a}, pairs);
    EXPECT_EQ(r.n_samples, 1u);
    EXPECT_DOUBLE_EQ(r.cell_agreement, 1.0);
    EXPECT_DOUBLE_EQ(r.kb_agreement, 1.0);
}

TEST(Agreement, TwoOfThreeAndSymmetry) {
    const auto pairs = agreement_pairs();
    const auto a = annotation({{1, 0}}, {{"p:s0", false}});
    const auto b = annotation({}, {{"p:s0", false}, {"p:s1", false}});
    const auto ab = compute_agreement({a}, {b}, pairs);
    EXPECT_DOUBLE_EQ(ab.cell_agreement, 0.667);
    EXPECT_DOUBLE_EQ(ab.kb_agreement, 0.667);
    const auto ba = compute_agreement({b}, {a}, pairs);
    EXPECT_DOUBLE_EQ(ba.cell_agreement, ab.cell_agreement);
    EXPECT_DOUBLE_EQ(ba.kb_agreement, ab.kb_agreement);
}

TEST(Agreement, MismatchedIds) {
    const auto pairs = agreement_pairs();
    auto a = annotation({}, {});
    auto b = a;
    b.pair_id = "other";
    EXPECT_THROW(compute_agreement({a}, {b}, pairs), ValidationError);
}

TEST(Agreement, SampleIsSeeded) {
    std::vector<PairRecord> pairs;
    std::vector<Annotation> a, b;
    for (int i = 0; i < 30; ++i) {
        const std::string id = "p" + std::to_string(i);
        pairs.push_back(fixture::make_pair(id, fixture::make_table(id, {"a"}, {{"1"}}), {}, {"k"}, "d"));
        Annotation x;
        x.pair_id = id;
        Annotation y = x;
        if (i % 3 == 0) y.highlights.refs.insert({1, 0});
        a.push_back(x);
        b.push_back(y);
    }
    AgreementOptions o;
    o.sample_size = 10;
    const auto r1 = compute_agreement(a, b, pairs, o);
    const auto r2 = compute_agreement(a, b, pairs, o);
    EXPECT_EQ(r1.n_samples, 10u);
    EXPECT_EQ(r1.cell_agreement, r2.cell_agreement);
    o.sample_size = 100;
    EXPECT_EQ(compute_agreement(a, b, pairs, o).n_samples, 30u);
}

TEST(BuildCorpus, GoldenFixture) {
    const std::string dir = CTRLTAB_TEST_DATA "/corpus";
    const auto articles = read_article_dir(dir + "/articles");
    const auto tables = read_source_tables(dir + "/tables.jsonl");
    const std::string golden = util::read_file(dir + "/golden_pairs.jsonl");
    for (unsigned threads : {1u, 3u}) {
        BuildOptions o;
        o.threads = threads;
        EXPECT_EQ(format_pairs(build_corpus(articles, tables, o)), golden) << "threads=" << threads;
    }
}

TEST(BuildCorpus, GoldenContents) {
    const auto pairs = read_pairs(CTRLTAB_TEST_DATA "/corpus/golden_pairs.jsonl");
    ASSERT_EQ(pairs.size(), 3u);
    const auto& p = pairs[0];
    EXPECT_EQ(p.id, "t1");
    ASSERT_EQ(p.kb.size(), 2u);
    EXPECT_EQ(p.kb.sentences[0].id, "a1:s1");
    EXPECT_EQ(p.kb.sentences[1].id, "a1:s0");
    EXPECT_EQ(p.highlights.refs, (std::set<CellRef>{{1, 1}, {2, 0}}));
    EXPECT_TRUE(pairs[2].kb.empty());
}
