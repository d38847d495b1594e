#include "ctrltab/core/generation_io.hpp"
#include "ctrltab/core/tokenize.hpp"
#include "ctrltab/eval/external_scorer.hpp"
#include "ctrltab/eval/human_eval.hpp"
#include "ctrltab/eval/metrics.hpp"
#include "ctrltab/eval/porter.hpp"
#include "ctrltab/eval/report.hpp"
#include "ctrltab/eval/sign_test.hpp"
#include "ctrltab/util/error.hpp"
#include "ctrltab/util/io.hpp"
#include "ctrltab/util/rng.hpp"
#include "fixtures.hpp"
#include "metric_oracles.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <map>
#include <thread>

using namespace ctrltab;
using namespace ctrltab::eval;

namespace {

TokenSeq toks(const std::string& s) { return tokenize(s); }

using fixture::brute_force_bleu;

} // namespace

TEST(Porter, MatchesReferenceVocabulary) {
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"caresses", "caress"},    {"ponies", "poni"},         {"ties", "ti"},
        {"caress", "caress"},      {"cats", "cat"},            {"feed", "feed"},
        {"agreed", "agre"},        {"plastered", "plaster"},   {"bled", "bled"},
        {"motoring", "motor"},     {"sing", "sing"},           {"conflated", "conflat"},
        {"troubled", "troubl"},    {"sized", "size"},          {"hopping", "hop"},
        {"tanned", "tan"},         {"falling", "fall"},        {"hissing", "hiss"},
        {"fizzed", "fizz"},        {"failing", "fail"},        {"filing", "file"},
        {"happy", "happi"},        {"sky", "sky"},             {"relational", "relat"},
        {"conditional", "condit"}, {"rational", "ration"},     {"valenci", "valenc"},
        {"hesitanci", "hesit"},    {"digitizer", "digit"},     {"conformabli", "conform"},
        {"radicalli", "radic"},    {"differentli", "differ"},  {"vileli", "vile"},
        {"analogousli", "analog"}, {"vietnamization", "vietnam"}, {"predication", "predic"},
        {"operator", "oper"},      {"feudalism", "feudal"},    {"decisiveness", "decis"},
        {"hopefulness", "hope"},   {"callousness", "callous"}, {"formaliti", "formal"},
        {"sensitiviti", "sensit"}, {"sensibiliti", "sensibl"}, {"triplicate", "triplic"},
        {"formative", "form"},     {"formalize", "formal"},    {"electriciti", "electr"},
        {"electrical", "electr"},  {"hopeful", "hope"},        {"goodness", "good"},
        {"revival", "reviv"},      {"allowance", "allow"},     {"inference", "infer"},
        {"airliner", "airlin"},    {"gyroscopic", "gyroscop"}, {"adjustable", "adjust"},
        {"defensible", "defens"},  {"irritant", "irrit"},      {"replacement", "replac"},
        {"adjustment", "adjust"},  {"dependent", "depend"},    {"adoption", "adopt"},
        {"communism", "commun"},   {"activate", "activ"},      {"angulariti", "angular"},
        {"homologous", "homolog"}, {"effective", "effect"},    {"bowdlerize", "bowdler"},
        {"probate", "probat"},     {"rate", "rate"},           {"cease", "ceas"},
        {"controll", "control"},   {"roll", "roll"},           {"generalizations", "gener"},
        {"oscillators", "oscil"},  {"running", "run"},         {"dogs", "dog"},
    };
    for (const auto& [word, stem] : cases) EXPECT_EQ(porter_stem(word), stem) << word;
}

TEST(Porter, LeavesShortAndNonAlphabeticWordsAlone) {
    EXPECT_EQ(porter_stem("is"), "is");
    EXPECT_EQ(porter_stem("a"), "a");
    EXPECT_EQ(porter_stem("27.3"), "27.3");
    EXPECT_EQ(porter_stem("bert-based"), "bert-based");
    EXPECT_EQ(porter_stem(""), "");
}

TEST(Bleu, IdentityIsOne) {
    const std::vector<TokenSeq> c = {toks("the model reaches 27.3 bleu on wmt"), toks("ours beats the baseline")};
    EXPECT_DOUBLE_EQ(bleu(c, c), 1.0);
}

TEST(Bleu, ClipsRepeatedUnigrams) {
    const auto d = bleu_detail({toks("the the the the")}, {toks("the cat sat down")});
    EXPECT_DOUBLE_EQ(d.precisions[0], 0.25);
    EXPECT_DOUBLE_EQ(d.precisions[1], 0.0);
    EXPECT_DOUBLE_EQ(d.score, 0.0);
    EXPECT_DOUBLE_EQ(d.score, brute_force_bleu({toks("the the the the")}, {toks("the cat sat down")}));
}

TEST(Bleu, BrevityPenaltyHandComputed) {
    // c = 4, r = 8; all n-grams of the candidate appear in the reference.
    const auto d = bleu_detail({toks("a b c d")}, {toks("a b c d e f g h")});
    EXPECT_DOUBLE_EQ(d.brevity_penalty, std::exp(1.0 - 2.0));
    EXPECT_NEAR(d.score, std::exp(-1.0), 1e-12);
    EXPECT_EQ(d.candidate_length, 4u);
    EXPECT_EQ(d.reference_length, 8u);
}

TEST(Bleu, MatchesBruteForceOracleOnRandomPairs) {
    std::vector<TokenSeq> cands, refs;
    fixture::random_bleu_corpus(7, cands, refs);
    const double expected = brute_force_bleu(cands, refs);
    ASSERT_GT(expected, 0.0);
    EXPECT_NEAR(bleu(cands, refs), expected, 1e-9);
    // Each pair alone, where many scores are zero.
    for (int i = 0; i < 50; ++i)
        EXPECT_NEAR(bleu({cands[i]}, {refs[i]}), brute_force_bleu({cands[i]}, {refs[i]}), 1e-9) << i;
}

TEST(Bleu, PermutationInvariant) {
    std::vector<TokenSeq> c = {toks("a b c d e"), toks("x y z w"), toks("p q r s t u")};
    std::vector<TokenSeq> r = {toks("a b c d f"), toks("x y z w v"), toks("p q r s t")};
    const double base = bleu(c, r);
    std::swap(c[0], c[2]);
    std::swap(r[0], r[2]);
    EXPECT_DOUBLE_EQ(bleu(c, r), base);
}

TEST(Bleu, RejectsEmptyAndMismatchedCorpora) {
    EXPECT_THROW(bleu({}, {}), ValidationError);
    EXPECT_THROW(bleu({toks("a")}, {}), ValidationError);
}

TEST(Meteor, HandDerivedCases) {
    for (const auto& c : fixture::meteor_cases())
        EXPECT_NEAR(meteor(toks(c.cand), toks(c.ref)), c.expected, 1e-12) << c.cand << " | " << c.ref;
}

TEST(Meteor, EmptyInputsScoreZero) {
    EXPECT_EQ(meteor({}, toks("a b")), 0.0);
    EXPECT_EQ(meteor(toks("a b"), {}), 0.0);
}

TEST(Meteor, DetailReportsAlignment) {
    const auto d = meteor_detail(toks("the cat sat"), toks("sat the cat"));
    EXPECT_EQ(d.matches, 3u);
    EXPECT_EQ(d.chunks, 2u);
    EXPECT_DOUBLE_EQ(d.precision, 1.0);
    EXPECT_DOUBLE_EQ(d.recall, 1.0);
}

TEST(Meteor, IdentityLaw) {
    for (std::size_t n = 1; n <= 12; ++n) {
        TokenSeq s;
        for (std::size_t i = 0; i < n; ++i) s.push_back("w" + std::to_string(i) + "x");
        const double inv = 1.0 / static_cast<double>(n);
        EXPECT_NEAR(meteor(s, s), 1.0 - 0.5 * inv * inv * inv, 1e-12) << n;
    }
}

TEST(Meteor, LongInputsStayBounded) {
    TokenSeq c, r;
    util::CounterRng rng(3);
    for (int i = 0; i < 60; ++i) c.push_back(std::string(1, static_cast<char>('a' + rng.below(4))));
    for (int i = 0; i < 60; ++i) r.push_back(std::string(1, static_cast<char>('a' + rng.below(4))));
    const double s = meteor(c, r);
    EXPECT_GT(s, 0.0);
    EXPECT_LE(s, 1.0);
}

namespace {

Table results_table() { return fixture::make_table("t", {"model", "bleu"}, {{"ours", "27.3"}, {"base", "25.1"}}); }

} // namespace

TEST(CellRecall, CountsQuotedHighlightValues) {
    HighlightSet h;
    h.refs = {{1, 0}, {1, 1}};
    const Table t = results_table();
    EXPECT_DOUBLE_EQ(cell_recall("ours reaches 27.3 bleu", h, t), 1.0);
    EXPECT_DOUBLE_EQ(cell_recall("ours is strongest", h, t), 0.5);
    EXPECT_DOUBLE_EQ(cell_recall("nothing relevant", h, t), 0.0);
    EXPECT_DOUBLE_EQ(cell_recall("anything", HighlightSet{}, t), 1.0);
}

TEST(CellRecall, MonotoneUnderConcatenation) {
    HighlightSet h;
    h.refs = {{1, 0}, {1, 1}, {2, 1}};
    const Table t = results_table();
    const std::vector<std::string> parts = {"ours wins", "with 27.3", "while base gets 25.1", "overall"};
    std::string acc;
    double prev = cell_recall(acc, h, t);
    for (const auto& p : parts) {
        acc += (acc.empty() ? "" : " ") + p;
        const double now = cell_recall(acc, h, t);
        EXPECT_GE(now, prev) << acc;
        prev = now;
    }
    EXPECT_DOUBLE_EQ(prev, 1.0);
}

namespace {

std::vector<PairRecord> eval_pairs(int n) {
    std::vector<PairRecord> out;
    for (int i = 0; i < n; ++i) {
        const std::string id = "ev" + std::to_string(100 + i);
        out.push_back(fixture::make_pair(id, results_table(), {{1, 0}, {1, 1}}, {"ours uses attention"},
                                         "ours reaches 27.3 bleu"));
    }
    return out;
}

std::vector<GenerationRecord> outputs_for(const std::vector<PairRecord>& pairs, const std::string& text) {
    std::vector<GenerationRecord> out;
    for (const auto& p : pairs) out.push_back({p.id, text, {p.id + ":s0"}, "greedy", 1});
    return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("ctrltab_eval_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST(Report, PerfectOutputs) {
    const auto pairs = eval_pairs(3);
    const auto report = score_outputs(outputs_for(pairs, "ours reaches 27.3 bleu"), pairs);
    EXPECT_EQ(report.n_pairs, 3u);
    EXPECT_DOUBLE_EQ(report.bleu, 1.0);
    EXPECT_NEAR(report.meteor, 1.0 - 0.5 / 64.0, 1e-12);
    EXPECT_DOUBLE_EQ(report.cell_recall, 1.0);
    const auto j = to_json(report);
    for (const char* key : {"bleu", "meteor", "cell_recall", "n_pairs", "per_pair"}) EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["per_pair"].size(), 3u);
}

TEST(Report, ScoresStayInBounds) {
    const auto pairs = eval_pairs(4);
    const auto report = score_outputs(outputs_for(pairs, "base gets 25.1 on this table"), pairs);
    for (double v : {report.bleu, report.meteor, report.cell_recall}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    EXPECT_DOUBLE_EQ(report.cell_recall, 0.0);
}

TEST(Report, RejectsUnknownAndDuplicateOutputs) {
    const auto pairs = eval_pairs(2);
    auto outs = outputs_for(pairs, "x");
    outs.push_back({"missing", "x", {}, "greedy", 1});
    EXPECT_THROW(score_outputs(outs, pairs), NotFoundError);
    outs.back().pair_id = pairs[0].id;
    EXPECT_THROW(score_outputs(outs, pairs), ValidationError);
}

TEST(GenerationIo, RoundTripAndLineErrors) {
    const std::vector<GenerationRecord> recs = {{"p1", "ours wins , \"quoted\"", {"p1:s0", "p1:s2"}, "beam", 4},
                                                {"p2", "", {}, "greedy", 1}};
    EXPECT_EQ(parse_generations(format_generations(recs)), recs);
    const std::string bad = format_generation(recs[0]) + "\n{\"pair_id\": 3}\n";
    try {
        parse_generations(bad);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(HumanEval, ExportWritesHeaderRowsAndMeta) {
    const auto pairs = eval_pairs(3);
    const auto dir = scratch_dir("export");
    const std::string path = (dir / "sheet.csv").string();
    export_human_eval_sheet(outputs_for(pairs, "ours, with \"27.3\""), pairs, path, 11);
    const std::string text = util::read_file(path);
    EXPECT_EQ(text.rfind(std::string(kHumanEvalHeader) + "\r\n", 0), 0u);
    const auto rows = parse_human_eval_sheet(text);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].output, "ours, with \"27.3\"");
    EXPECT_EQ(rows[0].highlights, "model=ours, bleu=27.3");
    EXPECT_FALSE(rows[0].fluency.has_value());
    const auto meta = nlohmann::json::parse(util::read_file(path + ".meta.json"));
    EXPECT_EQ(meta["seed"], 11);
    EXPECT_EQ(meta["rows"], 3);
}

TEST(HumanEval, SeedFixesRowOrder) {
    const auto pairs = eval_pairs(12);
    const auto outs = outputs_for(pairs, "x");
    const auto order = [&](std::uint64_t seed) {
        std::vector<std::string> ids;
        for (const auto& r : human_eval_rows(outs, pairs, seed)) ids.push_back(r.pair_id);
        return ids;
    };
    EXPECT_EQ(order(5), order(5));
    EXPECT_NE(order(5), order(6));
}

TEST(HumanEval, UnknownPairIsAnError) {
    const auto pairs = eval_pairs(1);
    EXPECT_THROW(human_eval_rows({{"nope", "x", {}, "greedy", 1}}, pairs, 1), NotFoundError);
}

TEST(HumanEval, LoaderValidatesRubric) {
    const std::string h = std::string(kHumanEvalHeader) + "\n";
    const auto filled = parse_human_eval_sheet(h + "p1,o,r,t,h,4,0.5,1,0\np2,o,r,t,h,,,,\n");
    ASSERT_EQ(filled.size(), 2u);
    EXPECT_EQ(filled[0].fluency, 4);
    EXPECT_DOUBLE_EQ(*filled[0].faithfulness, 0.5);
    EXPECT_FALSE(filled[1].fluency.has_value());
    const auto s = summarize_human_eval(filled);
    EXPECT_EQ(s.n_rated, 1u);
    EXPECT_DOUBLE_EQ(s.fluency, 4.0);

    EXPECT_THROW(parse_human_eval_sheet(h + "p1,o,r,t,h,6,0.5,1,0\n"), ValidationError);
    EXPECT_THROW(parse_human_eval_sheet(h + "p1,o,r,t,h,0,0.5,1,0\n"), ValidationError);
    EXPECT_THROW(parse_human_eval_sheet(h + "p1,o,r,t,h,3.5,0.5,1,0\n"), ValidationError);
    EXPECT_THROW(parse_human_eval_sheet(h + "p1,o,r,t,h,3,1.5,1,0\n"), ValidationError);
    EXPECT_THROW(parse_human_eval_sheet(h + "p1,o,r,t,h,3,0.5,-0.1,0\n"), ValidationError);
    EXPECT_THROW(parse_human_eval_sheet(h + "p1,o,r,t,h,3,0.5\n"), ValidationError);
    EXPECT_THROW(parse_human_eval_sheet("pair_id,output\n"), ValidationError);
}

TEST(SignTest, ExactBinomialValues) {
    // n = 10, k = 1: 2 * (1 + 10) / 1024.
    EXPECT_NEAR(binomial_two_sided(1, 10), 22.0 / 1024.0, 1e-12);
    EXPECT_NEAR(binomial_two_sided(9, 10), 22.0 / 1024.0, 1e-12);
    EXPECT_NEAR(binomial_two_sided(5, 5), 2.0 / 32.0, 1e-12);
    EXPECT_DOUBLE_EQ(binomial_two_sided(5, 10), 1.0);
    EXPECT_DOUBLE_EQ(binomial_two_sided(0, 0), 1.0);
}

TEST(SignTest, DropsTies) {
    const std::vector<double> a = {1, 2, 3, 4, 5, 6, 7, 0.5};
    const std::vector<double> b = {0, 1, 2, 3, 4, 6, 7, 0.0};
    const auto r = sign_test(a, b);
    EXPECT_EQ(r.wins, 6u);
    EXPECT_EQ(r.losses, 0u);
    EXPECT_EQ(r.ties, 2u);
    EXPECT_NEAR(r.p_value, 2.0 / 64.0, 1e-12);
    EXPECT_THROW(sign_test({1.0}, {}), ValidationError);
}

namespace {

class MockScorer {
public:
    explicit MockScorer(httplib::Server::Handler handler) {
        server_.Post("/score", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~MockScorer() {
        server_.stop();
        thread_.join();
    }
    ExternalScorerConfig config() const {
        ExternalScorerConfig c;
        c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/score";
        c.metric = "bertscore";
        c.http.backoff = std::chrono::milliseconds(1);
        c.http.timeout = std::chrono::milliseconds(2000);
        return c;
    }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

} // namespace

TEST(ExternalScorer, PostsCandidatesAndReadsScores) {
    MockScorer mock([](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        nlohmann::json scores = nlohmann::json::array();
        for (std::size_t i = 0; i < body["candidates"].size(); ++i)
            scores.push_back(body["candidates"][i] == body["references"][i] ? 1.0 : 0.25);
        res.set_content(nlohmann::json{{"metric", body["metric"]}, {"scores", scores}}.dump(), "application/json");
    });
    const auto s = external_scores(mock.config(), {"a b", "c"}, {"a b", "d"});
    EXPECT_EQ(s, (std::vector<double>{1.0, 0.25}));
}

TEST(ExternalScorer, MalformedReplyIsTransportError) {
    MockScorer mock([](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"scores": [0.5]})", "application/json");
    });
    EXPECT_THROW(external_scores(mock.config(), {"a", "b"}, {"a", "b"}), TransportError);
    EXPECT_THROW(external_scores(mock.config(), {"a"}, {}), ValidationError);
    ExternalScorerConfig bad = mock.config();
    bad.endpoint = "not a url";
    EXPECT_THROW(external_scores(bad, {"a"}, {"a"}), ConfigError);
}
