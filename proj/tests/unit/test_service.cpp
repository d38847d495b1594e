#include "ctrltab/core/pairs_io.hpp"
#include "ctrltab/service/server.hpp"
#include "ctrltab/service/verdict_log.hpp"
#include "ctrltab/util/error.hpp"
#include "ctrltab/util/io.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

using namespace ctrltab;
using namespace ctrltab::service;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::vector<PairRecord> dataset() {
    std::vector<PairRecord> out;
    for (int i = 0; i < 3; ++i) {
        const std::string id = "an" + std::to_string(100 + i);
        auto p = fixture::make_pair(id, fixture::make_table(id, {"score"}, {{"1"}, {"2"}}), {{1, 0}},
                                    {"first fact", "second fact", "third fact"}, "score 1 wins");
        p.split = i == 2 ? Split::test : Split::train;
        out.push_back(std::move(p));
    }
    return out;
}

struct Paths {
    fs::path dir;
    std::string data, log;
};

Paths scratch(const std::string& name) {
    Paths p;
    p.dir = fs::temp_directory_path() / ("ctrltab_service_" + name);
    fs::remove_all(p.dir);
    fs::create_directories(p.dir);
    p.data = (p.dir / "pairs.jsonl").string();
    p.log = (p.dir / "verdicts.jsonl").string();
    write_pairs(p.data, dataset());
    return p;
}

class Running {
public:
    explicit Running(const Paths& p, std::string static_dir = "")
        : svc_(ServiceOptions{p.data, p.log, std::move(static_dir)}) {
        port_ = svc_.bind("127.0.0.1", 0);
        thread_ = std::thread([this] { svc_.run(); });
        svc_.wait_until_ready();
        cli_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    }
    ~Running() {
        svc_.stop();
        thread_.join();
    }
    httplib::Client& cli() { return *cli_; }
    AnnotationService& svc() { return svc_; }
    int port() const { return port_; }

    json get(const std::string& path, int expect = 200) {
        auto r = cli_->Get(path);
        EXPECT_TRUE(r) << path;
        if (!r) return {};
        EXPECT_EQ(r->status, expect) << path << " " << r->body;
        return json::parse(r->body);
    }
    json post(const std::string& path, const json& body, int expect = 201) {
        auto r = cli_->Post(path, body.dump(), "application/json");
        EXPECT_TRUE(r) << path;
        if (!r) return {};
        EXPECT_EQ(r->status, expect) << path << " " << r->body;
        return json::parse(r->body);
    }

private:
    AnnotationService svc_;
    int port_ = 0;
    std::thread thread_;
    std::unique_ptr<httplib::Client> cli_;
};

json verdict_body(const std::string& annotator, std::vector<std::pair<std::string, bool>> kb,
                  std::vector<std::pair<int, int>> cells) {
    json j;
    j["annotator_id"] = annotator;
    j["kb_decisions"] = json::array();
    for (const auto& [id, accept] : kb) j["kb_decisions"].push_back({{"sentence_id", id}, {"accept", accept}});
    j["highlights"] = json::array();
    for (const auto& [r, c] : cells) j["highlights"].push_back({r, c});
    j["timestamp"] = "2024-01-01T00:00:00Z";
    return j;
}

std::size_t line_count(const std::string& path) {
    std::ifstream in(path);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

} // namespace

TEST(AnnotationService, ListsPairsWithProgress) {
    const auto p = scratch("list");
    Running s(p);
    auto all = s.get("/api/pairs");
    EXPECT_EQ(all["total"], 3);
    EXPECT_EQ(all["verified"], 0);
    s.post("/api/pairs/an100/verdicts", verdict_body("ann1", {}, {{1, 0}}));
    all = s.get("/api/pairs");
    EXPECT_EQ(all["verified"], 1);
    EXPECT_EQ(all["pairs"][0]["annotators"], json::array({"ann1"}));
    EXPECT_EQ(s.get("/api/pairs?split=test")["total"], 1);
    const auto bad = s.get("/api/pairs?split=nope", 400);
    EXPECT_EQ(bad["code"], "bad_request");
}

TEST(AnnotationService, UnknownPairIs404WithErrorBody) {
    const auto p = scratch("404");
    Running s(p);
    const auto body = s.get("/api/pairs/missing", 404);
    EXPECT_EQ(body["code"], "not_found");
    EXPECT_TRUE(body["message"].is_string());
    s.post("/api/pairs/missing/verdicts", verdict_body("ann1", {}, {}), 404);
    EXPECT_EQ(s.get("/api/nothing-here", 404)["code"], "not_found");
}

TEST(AnnotationService, RejectionShowsInAnnotatorViewOnly) {
    const auto p = scratch("view");
    Running s(p);
    const auto ack = s.post("/api/pairs/an100/verdicts", verdict_body("ann1", {{"an100:s1", false}}, {{2, 0}}));
    EXPECT_EQ(ack["seq"], 1);
    const auto mine = s.get("/api/pairs/an100?annotator=ann1");
    EXPECT_EQ(mine["kb"][1]["status"], "rejected");
    EXPECT_EQ(mine["kb"][0]["status"], "auto");
    EXPECT_EQ(mine["highlights"], json::array({json::array({2, 0})}));
    EXPECT_EQ(mine["auto_highlights"], json::array({json::array({1, 0})}));
    EXPECT_EQ(mine["verdict"]["seq"], 1);
    const auto other = s.get("/api/pairs/an100?annotator=ann2");
    EXPECT_EQ(other["kb"][1]["status"], "auto");
    EXPECT_TRUE(other["verdict"].is_null());
}

TEST(AnnotationService, ResubmissionIsIdempotentButLogged) {
    const auto p = scratch("idem");
    Running s(p);
    const auto body = verdict_body("ann1", {{"an100:s0", false}}, {{1, 0}});
    s.post("/api/pairs/an100/verdicts", body);
    const auto before = s.get("/api/pairs/an100?annotator=ann1");
    const auto ack = s.post("/api/pairs/an100/verdicts", body);
    EXPECT_EQ(ack["seq"], 2);
    auto after = s.get("/api/pairs/an100?annotator=ann1");
    EXPECT_EQ(after["verdict"]["seq"], 2);
    after["verdict"]["seq"] = 1;
    EXPECT_EQ(after, before);
    EXPECT_EQ(line_count(p.log), 2u);
}

TEST(AnnotationService, InvalidVerdictLeavesLogUntouched) {
    const auto p = scratch("invalid");
    Running s(p);
    EXPECT_EQ(s.post("/api/pairs/an100/verdicts", verdict_body("ann1", {}, {{9, 9}}), 422)["code"], "validation_error");
    s.post("/api/pairs/an100/verdicts", verdict_body("ann1", {{"an101:s0", true}}, {}), 422);
    s.post("/api/pairs/an100/verdicts", verdict_body("", {}, {}), 422);
    s.post("/api/pairs/an100/verdicts", verdict_body("ann1", {{"an100:s0", true}, {"an100:s0", false}}, {}), 422);
    auto mismatched = verdict_body("ann1", {}, {});
    mismatched["pair_id"] = "an101";
    s.post("/api/pairs/an100/verdicts", mismatched, 422);
    auto r = s.cli().Post("/api/pairs/an100/verdicts", "{not json", "application/json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 400);
    EXPECT_EQ(json::parse(r->body)["code"], "bad_request");
    EXPECT_EQ(fs::file_size(p.log), 0u);
    EXPECT_EQ(s.svc().verdict_count(), 0u);
}

TEST(AnnotationService, ReadsDoNotMutate) {
    const auto p = scratch("reads");
    Running s(p);
    s.post("/api/pairs/an100/verdicts", verdict_body("ann1", {}, {}));
    const auto size = fs::file_size(p.log);
    s.get("/api/pairs");
    s.get("/api/pairs/an100?annotator=ann1");
    s.cli().Get("/api/export");
    s.get("/api/agreement?a=ann1&b=ann1");
    EXPECT_EQ(fs::file_size(p.log), size);
    EXPECT_EQ(s.svc().verdict_count(), 1u);
}

TEST(AnnotationService, AgreementIdenticalAndCounted) {
    const auto p = scratch("agree");
    Running s(p);
    const auto same = verdict_body("x", {{"an100:s0", false}}, {{1, 0}});
    auto same_b = same;
    same_b["annotator_id"] = "y";
    s.post("/api/pairs/an100/verdicts", same);
    s.post("/api/pairs/an100/verdicts", same_b);
    auto rep = s.get("/api/agreement?a=x&b=y");
    EXPECT_DOUBLE_EQ(rep["cell_agreement"], 1.0);
    EXPECT_DOUBLE_EQ(rep["kb_agreement"], 1.0);
    EXPECT_EQ(rep["common_pairs"], 1);

    // Three cells (header + two rows): the annotators differ on one. Three
    // sentences: they differ on one.
    s.post("/api/pairs/an101/verdicts", verdict_body("a", {{"an101:s0", false}}, {{1, 0}}));
    s.post("/api/pairs/an101/verdicts", verdict_body("b", {}, {}));
    rep = s.get("/api/agreement?a=a&b=b");
    EXPECT_DOUBLE_EQ(rep["cell_agreement"], 0.667);
    EXPECT_DOUBLE_EQ(rep["kb_agreement"], 0.667);
    EXPECT_EQ(rep["n_samples"], 1);
}

TEST(AnnotationService, AgreementNeedsCommonPairs) {
    const auto p = scratch("agree_err");
    Running s(p);
    s.post("/api/pairs/an100/verdicts", verdict_body("a", {}, {}));
    EXPECT_EQ(s.get("/api/agreement?a=a&b=b", 422)["code"], "validation_error");
    EXPECT_EQ(s.get("/api/agreement?a=a", 400)["code"], "bad_request");
}

TEST(AnnotationService, ExportMergesVerifiedPairs) {
    const auto p = scratch("export");
    Running s(p);
    s.post("/api/pairs/an100/verdicts", verdict_body("lead", {{"an100:s0", false}}, {{1, 0}}));
    s.post("/api/pairs/an100/verdicts", verdict_body("second", {{"an100:s2", false}}, {{2, 0}}));

    auto r = s.cli().Get("/api/export");
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 200);
    auto pairs = parse_pairs(r->body);
    ASSERT_EQ(pairs.size(), 3u);
    // Latest verdict wins by default.
    EXPECT_EQ(pairs[0].kb.sentences[0].status, KbStatus::accepted);
    EXPECT_EQ(pairs[0].kb.sentences[1].status, KbStatus::accepted);
    EXPECT_EQ(pairs[0].kb.sentences[2].status, KbStatus::rejected);
    EXPECT_TRUE(pairs[0].highlights.contains({2, 0}));
    EXPECT_EQ(pairs[1].kb.sentences[0].status, KbStatus::automatic);

    r = s.cli().Get("/api/export?adjudicator=lead&verified_only=1");
    ASSERT_TRUE(r);
    pairs = parse_pairs(r->body);
    ASSERT_EQ(pairs.size(), 1u);
    EXPECT_EQ(pairs[0].kb.sentences[0].status, KbStatus::rejected);
    EXPECT_EQ(pairs[0].kb.sentences[2].status, KbStatus::accepted);
    for (const auto& sent : pairs[0].kb.sentences) EXPECT_NE(sent.status, KbStatus::automatic);
}

TEST(AnnotationService, RestartReplaysToIdenticalState) {
    const auto p = scratch("restart");
    json view_before, list_before;
    std::string export_before;
    {
        Running s(p);
        s.post("/api/pairs/an100/verdicts", verdict_body("ann1", {{"an100:s1", false}}, {{2, 0}}));
        s.post("/api/pairs/an101/verdicts", verdict_body("ann2", {{"an101:s0", true}}, {}));
        s.post("/api/pairs/an100/verdicts", verdict_body("ann1", {{"an100:s2", false}}, {{1, 0}}));
        view_before = s.get("/api/pairs/an100?annotator=ann1");
        list_before = s.get("/api/pairs");
        export_before = s.cli().Get("/api/export")->body;
    }
    Running s(p);
    EXPECT_EQ(s.get("/api/pairs/an100?annotator=ann1"), view_before);
    EXPECT_EQ(s.get("/api/pairs"), list_before);
    EXPECT_EQ(s.cli().Get("/api/export")->body, export_before);
    EXPECT_EQ(s.post("/api/pairs/an102/verdicts", verdict_body("ann1", {}, {}))["seq"], 4);
}

TEST(AnnotationService, TornTailIsDroppedOnReplay) {
    const auto p = scratch("torn");
    {
        Running s(p);
        s.post("/api/pairs/an100/verdicts", verdict_body("ann1", {}, {}));
        s.post("/api/pairs/an101/verdicts", verdict_body("ann1", {}, {}));
    }
    const auto good_size = fs::file_size(p.log);
    {
        std::ofstream out(p.log, std::ios::app);
        out << R"({"seq":3,"verdict":{"pair_id":"an102","annot)";
    }
    {
        Running s(p);
        EXPECT_EQ(s.svc().verdict_count(), 2u);
        EXPECT_EQ(fs::file_size(p.log), good_size);
        EXPECT_EQ(s.get("/api/pairs")["verified"], 2);
        EXPECT_EQ(s.post("/api/pairs/an102/verdicts", verdict_body("ann1", {}, {}))["seq"], 3);
    }
    Running s(p);
    EXPECT_EQ(s.svc().verdict_count(), 3u);
}

TEST(AnnotationService, EveryLogPrefixReplays) {
    const auto p = scratch("prefix");
    {
        Running s(p);
        s.post("/api/pairs/an100/verdicts", verdict_body("ann1", {{"an100:s0", false}}, {{1, 0}}));
        s.post("/api/pairs/an101/verdicts", verdict_body("ann2", {}, {{2, 0}}));
    }
    const std::string full = util::read_file(p.log);
    for (std::size_t cut = 0; cut <= full.size(); cut += 7) {
        {
            std::ofstream out(p.log, std::ios::binary | std::ios::trunc);
            out << full.substr(0, cut);
        }
        VerdictLog log(p.log);
        const std::size_t complete = static_cast<std::size_t>(std::count(full.begin(), full.begin() + cut, '\n'));
        EXPECT_EQ(log.replayed().size(), complete) << cut;
    }
}

TEST(AnnotationService, CorruptionBeforeTailFailsStartup) {
    const auto p = scratch("corrupt");
    {
        std::ofstream out(p.log);
        out << "garbage\n" << R"({"seq":1,"verdict":{"pair_id":"an100","annotator_id":"a"}})" << "\n";
    }
    EXPECT_THROW(AnnotationService(ServiceOptions{p.data, p.log, ""}), ParseError);
    {
        std::ofstream out(p.log, std::ios::trunc);
        out << R"({"seq":2,"verdict":{"pair_id":"an100","annotator_id":"a"}})" << "\n"
            << R"({"seq":2,"verdict":{"pair_id":"an100","annotator_id":"a"}})" << "\n";
    }
    EXPECT_THROW(AnnotationService(ServiceOptions{p.data, p.log, ""}), ParseError);
}

TEST(AnnotationService, StartupErrors) {
    const auto p = scratch("startup");
    try {
        AnnotationService svc(ServiceOptions{(p.dir / "absent.jsonl").string(), p.log, ""});
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("absent.jsonl"), std::string::npos);
    }
    Running first(p);
    AnnotationService second(ServiceOptions{p.data, (p.dir / "other.jsonl").string(), ""});
    EXPECT_THROW(second.bind("127.0.0.1", first.port()), Error);
}

TEST(AnnotationService, ConcurrentWritesGetUniqueSequence) {
    const auto p = scratch("concurrent");
    Running s(p);
    std::vector<std::thread> workers;
    std::vector<std::vector<std::uint64_t>> seqs(4);
    for (int w = 0; w < 4; ++w) {
        workers.emplace_back([&, w] {
            httplib::Client cli("127.0.0.1", s.port());
            for (int k = 0; k < 10; ++k) {
                const auto body = verdict_body("ann" + std::to_string(w), {}, {{1, 0}});
                auto r = cli.Post("/api/pairs/an10" + std::to_string(k % 3) + "/verdicts", body.dump(),
                                  "application/json");
                if (r && r->status == 201) seqs[w].push_back(json::parse(r->body)["seq"].get<std::uint64_t>());
            }
        });
    }
    for (auto& t : workers) t.join();
    std::set<std::uint64_t> all;
    for (const auto& v : seqs) all.insert(v.begin(), v.end());
    EXPECT_EQ(all.size(), 40u);
    EXPECT_EQ(*all.begin(), 1u);
    EXPECT_EQ(*all.rbegin(), 40u);
    EXPECT_EQ(line_count(p.log), 40u);
    VerdictLog replay(p.log);
    EXPECT_EQ(replay.replayed().size(), 40u);
}

TEST(AnnotationService, ServesStaticFiles) {
    const auto p = scratch("static");
    fs::create_directories(p.dir / "www");
    {
        std::ofstream out(p.dir / "www" / "index.html");
        out << "<html>annotate</html>";
    }
    Running s(p, (p.dir / "www").string());
    auto r = s.cli().Get("/index.html");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    EXPECT_EQ(r->body, "<html>annotate</html>");
}
