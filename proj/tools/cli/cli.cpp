#include "cli/cli.hpp"

#include "cli/config_file.hpp"
#include "cli/manifest.hpp"
#include "ctrltab/core/generation_io.hpp"
#include "ctrltab/core/pairs_io.hpp"
#include "ctrltab/core/stats.hpp"
#include "ctrltab/corpus/builder.hpp"
#include "ctrltab/eval/external_scorer.hpp"
#include "ctrltab/eval/human_eval.hpp"
#include "ctrltab/eval/report.hpp"
#include "ctrltab/eval/sign_test.hpp"
#include "ctrltab/generator/decode.hpp"
#include "ctrltab/generator/llm.hpp"
#include "ctrltab/generator/model.hpp"
#include "ctrltab/generator/prompt.hpp"
#include "ctrltab/nn/gradcheck.hpp"
#include "ctrltab/retriever/corrupt.hpp"
#include "ctrltab/retriever/model.hpp"
#include "ctrltab/service/server.hpp"
#include "ctrltab/service/verdict_log.hpp"
#include "ctrltab/util/error.hpp"
#include "ctrltab/util/log.hpp"
#include "ctrltab/util/parallel.hpp"
#include "ctrltab/util/rng.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <csignal>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <ostream>

namespace ctrltab::cli {
namespace {

using ojson = nlohmann::ordered_json;

/// Options shared by every subcommand.
struct Common {
    std::uint64_t seed = 42;
    unsigned threads = 1;
    std::string config;
    std::string out;
    std::string log_level = "info";
};

struct Hyper {
    std::size_t epochs = 0;
    std::size_t batch_size = 0;
    double learning_rate = 0;
    std::size_t d_model = 0;
    std::size_t heads = 0;
    std::size_t layers = 0;
    std::size_t max_input_len = 0;
    std::size_t vocab_max = 8192;
    std::size_t vocab_min_freq = 1;
};

struct Options {
    Common common;
    Hyper hyper;
    std::string xml_dir, tables, pairs, retriever, model, gen, baseline, human_eval, log, static_dir;
    std::string split;
    std::string host = "127.0.0.1";
    std::string annotator_a, annotator_b;
    std::string external_metric;
    std::string which = "both";
    std::string prompt_template = "default";
    std::size_t n_kb = generator::kDefaultNKb;
    bool no_bkg = false;
    bool llm = false;
    bool check = false;
    std::size_t beam = 1;
    std::size_t max_len = 64;
    double length_penalty = 1.0;
    double theta_overlap = 0.15;
    double theta_dup = 0.8;
    std::size_t cap = 40;
    double noise_ratio = 0.6;
    std::size_t sample = 100;
    int port = 8080;
};

util::LogLevel log_level_from_string(const std::string& s) {
    if (s == "debug") return util::LogLevel::debug;
    if (s == "info") return util::LogLevel::info;
    if (s == "warning") return util::LogLevel::warning;
    if (s == "error") return util::LogLevel::error;
    throw ConfigError("unknown log level '" + s + "'");
}

void add_common(CLI::App* sub, Common& c, bool needs_out) {
    sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    sub->add_option("--threads", c.threads, "Worker threads (results do not depend on it)")
        ->capture_default_str()
        ->check(CLI::Range(1u, 256u));
    sub->add_option("--config", c.config, "key=value or JSON file; explicit flags win");
    auto* out = sub->add_option("--out", c.out, "Output path");
    if (needs_out) out->required();
    sub->add_option("--log-level", c.log_level, "debug, info, warning or error")->capture_default_str();
}

void add_hyper(CLI::App* sub, Hyper& h) {
    sub->add_option("--epochs", h.epochs, "Training epochs");
    sub->add_option("--batch-size", h.batch_size, "Examples per optimizer step");
    sub->add_option("--lr", h.learning_rate, "Adam learning rate");
    sub->add_option("--d-model", h.d_model, "Model width");
    sub->add_option("--heads", h.heads, "Attention heads");
    sub->add_option("--layers", h.layers, "Encoder and decoder layers");
    sub->add_option("--max-input-len", h.max_input_len, "Encoder input cap");
    sub->add_option("--vocab-max", h.vocab_max, "Vocabulary size cap")->capture_default_str();
    sub->add_option("--vocab-min-freq", h.vocab_min_freq, "Minimum token count")->capture_default_str();
}

void apply_hyper(const Hyper& h, nn::ModelConfig& mc, nn::TrainConfig& tc) {
    if (h.epochs) tc.epochs = h.epochs;
    if (h.batch_size) tc.batch_size = h.batch_size;
    if (h.learning_rate > 0) tc.learning_rate = h.learning_rate;
    if (h.d_model) mc.d_model = h.d_model;
    if (h.heads) mc.n_heads = h.heads;
    if (h.layers) mc.n_layers_enc = mc.n_layers_dec = h.layers;
    if (h.max_input_len) mc.max_input_len = h.max_input_len;
}

std::vector<PairRecord> filter_split(std::vector<PairRecord> pairs, const std::string& split) {
    if (split.empty() || split == "all") return pairs;
    const Split s = split_from_string(split);
    std::vector<PairRecord> out;
    for (auto& p : pairs)
        if (p.split == s) out.push_back(std::move(p));
    if (out.empty()) throw ValidationError("no pairs in split '" + split + "'");
    return out;
}

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string("--") + what + " is required");
    if (!std::filesystem::exists(path)) throw ConfigError(std::string(what) + " not found: " + path);
}

/// The effective options of a subcommand, minus the ones that must not
/// change results (threads, paths, logging).
ojson effective_config(const CLI::App* sub) {
    static const std::set<std::string> skip = {"--help", "--threads", "--config", "--out", "--log-level", "--seed",
                                               "--xml", "--tables", "--pairs", "--retriever", "--model", "--gen",
                                               "--baseline", "--human-eval", "--log", "--static", "--host", "--port"};
    ojson cfg = ojson::object();
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_name(false, true);
        if (skip.count(name)) continue;
        std::string value;
        if (opt->count() > 0) value = opt->as<std::string>();
        else value = opt->get_default_str();
        if (opt->get_type_size() == 0 && value.empty()) value = "false";
        if (opt->get_type_size() == 0 && value == "1") value = "true";
        cfg[name.substr(2)] = value;
    }
    return cfg;
}

struct Context {
    Options& o;
    CLI::App* sub;
    std::ostream& out;

    Manifest manifest() const {
        Manifest m;
        m.subcommand = sub->get_name();
        m.seed = o.common.seed;
        m.config = effective_config(sub);
        return m;
    }
};

generator::KnowledgeSelector make_selector(const Options& o, Manifest& m,
                                           std::unique_ptr<retriever::RetrieverModel>& holder) {
    if (!o.retriever.empty()) {
        require_file(o.retriever, "retriever");
        holder = std::make_unique<retriever::RetrieverModel>(
            retriever::RetrieverModel::from_checkpoint(nn::load_checkpoint(o.retriever, retriever::kModelKind)));
        m.add_input("retriever", o.retriever);
        m.config["selector"] = "neural";
        return generator::neural_selector(*holder);
    }
    m.config["selector"] = "tfidf";
    return generator::tfidf_selector();
}

int cmd_build_corpus(Context& c) {
    require_file(c.o.xml_dir, "xml");
    require_file(c.o.tables, "tables");
    corpus::BuildOptions bo;
    bo.align.theta_overlap = c.o.theta_overlap;
    bo.align.cap = c.o.cap;
    bo.theta_dup = c.o.theta_dup;
    bo.threads = c.o.common.threads;
    const auto articles = corpus::read_article_dir(c.o.xml_dir);
    const auto tables = corpus::read_source_tables(c.o.tables);
    const auto pairs = corpus::build_corpus(articles, tables, bo);
    Manifest m = c.manifest();
    m.add_input("xml", c.o.xml_dir);
    m.add_input("tables", c.o.tables);
    write_artifact(c.o.common.out, format_pairs(pairs), m);
    util::log_info("wrote " + std::to_string(pairs.size()) + " pairs to " + c.o.common.out);
    return kOk;
}

int cmd_stats(Context& c) {
    require_file(c.o.pairs, "pairs");
    const auto s = corpus_stats(filter_split(read_pairs(c.o.pairs), c.o.split));
    ojson j;
    j["n_pairs"] = s.n_pairs;
    j["avg_cells"] = s.avg_cells;
    j["avg_desc_tokens"] = s.avg_desc_tokens;
    j["highlight_ratio"] = s.highlight_ratio;
    j["avg_kb_sentences"] = s.avg_kb_sentences;
    int rc = kOk;
    if (c.o.check) {
        struct Band {
            const char* name;
            double value, target, tol;
        };
        const Band bands[] = {{"n_pairs", s.n_pairs, 8967, 0},
                              {"avg_cells", s.avg_cells, 52, 2},
                              {"avg_desc_tokens", s.avg_desc_tokens, 34, 2},
                              {"highlight_ratio", s.highlight_ratio, 0.20, 0.03},
                              {"avg_kb_sentences", s.avg_kb_sentences, 20, 2}};
        ojson checks = ojson::object();
        for (const auto& b : bands) {
            const bool ok = std::fabs(b.value - b.target) <= b.tol + 1e-12;
            checks[b.name] = ok;
            if (!ok) rc = kValidation;
        }
        j["checks"] = std::move(checks);
    }
    if (c.o.common.out.empty()) {
        c.out << j.dump(2) << "\n";
    } else {
        Manifest m = c.manifest();
        m.add_input("pairs", c.o.pairs);
        write_artifact(c.o.common.out, j.dump(2) + "\n", m);
    }
    return rc;
}

int cmd_train_retriever(Context& c) {
    require_file(c.o.pairs, "pairs");
    const auto pairs = filter_split(read_pairs(c.o.pairs), c.o.split);
    const auto vocab = retriever::build_vocabulary_for(pairs, c.o.hyper.vocab_min_freq, c.o.hyper.vocab_max);
    auto mc = retriever::default_retriever_config(vocab.size());
    nn::TrainConfig tc;
    tc.seed = c.o.common.seed;
    tc.noise_ratio = c.o.noise_ratio;
    apply_hyper(c.o.hyper, mc, tc);
    retriever::RetrieverTrainOptions opts;
    opts.threads = c.o.common.threads;
    opts.on_epoch = [](std::size_t e, double loss) {
        util::log_info("retriever epoch " + std::to_string(e) + " loss " + std::to_string(loss));
        return true;
    };
    const auto model = retriever::train_retriever(pairs, vocab, mc, tc, opts);
    Manifest m = c.manifest();
    m.add_input("pairs", c.o.pairs);
    write_artifact(c.o.common.out, nn::serialize_checkpoint(model.to_checkpoint()), m);
    return kOk;
}

int cmd_train_generator(Context& c) {
    require_file(c.o.pairs, "pairs");
    const auto pairs = filter_split(read_pairs(c.o.pairs), c.o.split.empty() ? "train" : c.o.split);
    const auto vocab = retriever::build_vocabulary_for(pairs, c.o.hyper.vocab_min_freq, c.o.hyper.vocab_max);
    auto mc = generator::default_generator_config(vocab.size());
    mc.max_output_len = c.o.max_len;
    nn::TrainConfig tc;
    tc.seed = c.o.common.seed;
    apply_hyper(c.o.hyper, mc, tc);
    Manifest m = c.manifest();
    m.add_input("pairs", c.o.pairs);
    std::unique_ptr<retriever::RetrieverModel> holder;
    generator::KnowledgeSelector selector;
    if (!c.o.no_bkg) selector = make_selector(c.o, m, holder);
    generator::GeneratorTrainOptions opts;
    opts.threads = c.o.common.threads;
    opts.on_epoch = [](std::size_t e, double loss) {
        util::log_info("generator epoch " + std::to_string(e) + " loss " + std::to_string(loss));
        return true;
    };
    const auto model = generator::train_generator(pairs, vocab, selector, c.o.n_kb, mc, tc, !c.o.no_bkg, opts);
    write_artifact(c.o.common.out, nn::serialize_checkpoint(model.to_checkpoint()), m);
    return kOk;
}

int cmd_retrieve(Context& c) {
    require_file(c.o.pairs, "pairs");
    if (c.o.n_kb == 0) throw ConfigError("--n-kb must be at least 1");
    const auto pairs = filter_split(read_pairs(c.o.pairs), c.o.split);
    Manifest m = c.manifest();
    m.add_input("pairs", c.o.pairs);
    std::unique_ptr<retriever::RetrieverModel> holder;
    const auto selector = make_selector(c.o, m, holder);
    std::vector<std::string> lines(pairs.size());
    util::parallel_for(pairs.size(), c.o.common.threads, [&](std::size_t i) {
        ojson j;
        j["pair_id"] = pairs[i].id;
        auto& arr = j["retrieved"] = ojson::array();
        for (const auto& r : selector(pairs[i], c.o.n_kb)) arr.push_back({{"sentence_id", r.sentence_id}, {"score", r.score}});
        lines[i] = j.dump() + "\n";
    });
    std::string text;
    for (const auto& l : lines) text += l;
    write_artifact(c.o.common.out, text, m);
    return kOk;
}

int cmd_generate(Context& c) {
    require_file(c.o.pairs, "pairs");
    const auto pairs = filter_split(read_pairs(c.o.pairs), c.o.split.empty() ? "test" : c.o.split);
    Manifest m = c.manifest();
    m.add_input("pairs", c.o.pairs);
    std::unique_ptr<retriever::RetrieverModel> holder;
    const auto selector = make_selector(c.o, m, holder);
    std::vector<GenerationRecord> records(pairs.size());

    if (c.o.llm) {
        auto cfg = generator::LlmClientConfig::from_env();
        cfg.template_id = c.o.prompt_template;
        generator::LlmClient client(cfg);
        const auto& tmpl = generator::prompt_template(cfg.template_id);
        m.config["llm_endpoint_set"] = true;
        util::parallel_for(pairs.size(), c.o.common.threads, [&](std::size_t i) {
            const auto retrieved = selector(pairs[i], c.o.n_kb);
            const auto kb = generator::select_sentences(pairs[i], retrieved);
            const auto reply = client.generate(generator::build_prompt(pairs[i], kb, tmpl));
            GenerationRecord r{pairs[i].id, reply.text, {}, "llm", 1};
            for (const auto& x : retrieved) r.retrieved.push_back(x.sentence_id);
            records[i] = std::move(r);
        });
    } else {
        require_file(c.o.model, "model");
        const auto model =
            generator::GeneratorModel::from_checkpoint(nn::load_checkpoint(c.o.model, generator::kModelKind));
        m.add_input("model", c.o.model);
        generator::GenerationConfig gc;
        gc.strategy = c.o.beam > 1 ? generator::DecodeStrategy::beam : generator::DecodeStrategy::greedy;
        gc.beam_width = c.o.beam;
        gc.max_output_len = c.o.max_len;
        gc.length_penalty = c.o.length_penalty;
        gc.validate();
        const auto results = generator::generate_all(model, selector, pairs, model.n_kb(), gc, c.o.common.threads);
        for (std::size_t i = 0; i < results.size(); ++i)
            records[i] = {results[i].pair_id, results[i].text, results[i].retrieved, generator::to_string(gc.strategy),
                          gc.strategy == generator::DecodeStrategy::beam ? gc.beam_width : 1};
    }
    write_artifact(c.o.common.out, format_generations(records), m);
    return kOk;
}

int cmd_evaluate(Context& c) {
    require_file(c.o.gen, "gen");
    require_file(c.o.pairs, "pairs");
    const auto outputs = read_generations(c.o.gen);
    const auto pairs = read_pairs(c.o.pairs);
    Manifest m = c.manifest();
    m.add_input("gen", c.o.gen);
    m.add_input("pairs", c.o.pairs);
    auto report = eval::score_outputs(outputs, pairs);
    if (!c.o.external_metric.empty()) {
        const auto cfg = eval::ExternalScorerConfig::from_env(c.o.external_metric);
        std::map<std::string, const PairRecord*> by_id;
        for (const auto& p : pairs) by_id[p.id] = &p;
        std::map<std::string, std::string> text;
        for (const auto& o : outputs) text[o.pair_id] = o.output;
        std::vector<std::string> cands, refs;
        for (const auto& s : report.per_pair) {
            cands.push_back(text[s.pair_id]);
            refs.push_back(by_id[s.pair_id]->description);
        }
        const auto scores = eval::external_scores(cfg, cands, refs);
        double sum = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            report.per_pair[i].external = scores[i];
            sum += scores[i];
        }
        report.external_metric = c.o.external_metric;
        report.external = scores.empty() ? 0.0 : sum / static_cast<double>(scores.size());
    }
    ojson j = eval::to_json(report);
    if (!c.o.baseline.empty()) {
        require_file(c.o.baseline, "baseline");
        m.add_input("baseline", c.o.baseline);
        const auto base = eval::score_outputs(read_generations(c.o.baseline), pairs);
        std::map<std::string, double> base_meteor;
        for (const auto& s : base.per_pair) base_meteor[s.pair_id] = s.meteor;
        std::vector<double> a, b;
        for (const auto& s : report.per_pair) {
            auto it = base_meteor.find(s.pair_id);
            if (it == base_meteor.end()) throw ValidationError("baseline has no output for pair " + s.pair_id);
            a.push_back(s.meteor);
            b.push_back(it->second);
        }
        const auto st = eval::sign_test(a, b);
        j["sign_test"] = {{"metric", "meteor"}, {"wins", st.wins}, {"losses", st.losses}, {"ties", st.ties},
                          {"p_value", st.p_value}};
    }
    if (!c.o.human_eval.empty()) eval::export_human_eval_sheet(outputs, pairs, c.o.human_eval, c.o.common.seed);
    const std::string text = j.dump(2) + "\n";
    if (c.o.common.out.empty()) c.out << text;
    else write_artifact(c.o.common.out, text, m);
    return kOk;
}

/// Fixed toy pair so gradcheck runs without any data.
PairRecord gradcheck_pair() {
    PairRecord p;
    p.id = "gradcheck";
    p.table.id = p.id;
    p.table.caption = "results on the test set";
    p.table.n_rows = 3;
    p.table.n_cols = 2;
    p.table.cells = {{0, 0, "model", "model", true},
                     {0, 1, "bleu", "bleu", true},
                     {1, 0, "model", "ours", false},
                     {1, 1, "bleu", "27.3", false},
                     {2, 0, "model", "base", false},
                     {2, 1, "bleu", "25.1", false}};
    p.highlights.refs = {{1, 0}, {1, 1}};
    p.kb.sentences = {{"gradcheck:s0", "ours uses a deeper encoder", KbStatus::automatic, std::nullopt},
                      {"gradcheck:s1", "bleu measures n-gram overlap", KbStatus::automatic, std::nullopt},
                      {"gradcheck:s2", "the base model is smaller", KbStatus::automatic, std::nullopt}};
    p.description = "ours reaches 27.3 bleu with a deeper encoder .";
    return p;
}

nn::ModelConfig gradcheck_config(std::size_t vocab, std::size_t layers) {
    nn::ModelConfig mc;
    mc.d_model = 8;
    mc.n_heads = 2;
    mc.n_layers_enc = layers;
    mc.n_layers_dec = layers;
    mc.max_input_len = 64;
    mc.max_output_len = 16;
    mc.vocab_size = vocab;
    return mc;
}

int cmd_gradcheck(Context& c) {
    if (c.o.which != "retriever" && c.o.which != "generator" && c.o.which != "both")
        throw ConfigError("--which must be retriever, generator or both");
    std::vector<PairRecord> pairs;
    if (!c.o.pairs.empty()) {
        require_file(c.o.pairs, "pairs");
        pairs = read_pairs(c.o.pairs);
        if (pairs.empty()) throw ValidationError("no pairs in " + c.o.pairs);
        pairs.resize(1);
    } else {
        pairs = {gradcheck_pair()};
    }
    const PairRecord& p = pairs[0];
    const auto vocab = retriever::build_vocabulary_for(pairs, 1, 1000);
    nn::GradCheckOptions go;
    go.seed = c.o.common.seed;
    ojson j = ojson::object();
    double worst = 0;
    if (c.o.which != "generator") {
        retriever::RetrieverModel m(vocab, gradcheck_config(vocab.size(), 1), c.o.common.seed);
        const auto& s = p.kb.sentences.empty() ? KnowledgeSentence{"x", p.description, KbStatus::automatic, std::nullopt}
                                               : p.kb.sentences[0];
        const auto seg = m.segments(s.text, p.table, p.highlights);
        util::CounterRng rng(util::derive_seed(c.o.common.seed, "gradcheck"));
        const auto corrupted = retriever::corrupt(seg.knowledge, c.o.noise_ratio, rng);
        const auto r = nn::gradient_check(
            [&](nn::Graph& g) { return m.reconstruction_loss(g, seg, corrupted.token_ids); }, m.params(), go);
        j["retriever"] = r.max_rel_error;
        worst = std::max(worst, r.max_rel_error);
    }
    if (c.o.which != "retriever") {
        generator::GeneratorModel m(vocab, gradcheck_config(vocab.size(), 2), c.o.common.seed, true);
        const auto input = m.input_for(p, p.kb.sentences).token_ids;
        const auto target = m.target_for(p.description.empty() ? "empty" : p.description);
        const auto r = nn::gradient_check([&](nn::Graph& g) { return m.teacher_forced_loss(g, input, target); },
                                          m.params(), go);
        j["generator"] = r.max_rel_error;
        worst = std::max(worst, r.max_rel_error);
    }
    j["max_rel_error"] = worst;
    j["pass"] = worst < 1e-4;
    c.out << j.dump(2) << "\n";
    return worst < 1e-4 ? kOk : kValidation;
}

int cmd_agreement(Context& c) {
    require_file(c.o.pairs, "pairs");
    require_file(c.o.log, "log");
    if (c.o.annotator_a.empty() || c.o.annotator_b.empty()) throw ConfigError("--a and --b are required");
    service::AnnotationState state(read_pairs(c.o.pairs));
    service::VerdictLog log(c.o.log);
    for (const auto& e : log.replayed()) {
        state.check(e.verdict);
        state.apply(e.verdict, e.seq);
    }
    corpus::AgreementOptions ao;
    ao.sample_size = c.o.sample;
    ao.seed = c.o.common.seed;
    const auto rep = state.agreement(c.o.annotator_a, c.o.annotator_b, ao);
    ojson j;
    j["a"] = c.o.annotator_a;
    j["b"] = c.o.annotator_b;
    j["common_pairs"] = state.common_pairs(c.o.annotator_a, c.o.annotator_b);
    j["n_samples"] = rep.n_samples;
    j["cell_agreement"] = rep.cell_agreement;
    j["kb_agreement"] = rep.kb_agreement;
    const std::string text = j.dump(2) + "\n";
    if (c.o.common.out.empty()) {
        c.out << text;
    } else {
        Manifest m = c.manifest();
        m.add_input("pairs", c.o.pairs);
        m.add_input("log", c.o.log);
        write_artifact(c.o.common.out, text, m);
    }
    return kOk;
}

service::AnnotationService* g_serving = nullptr;

void stop_serving(int) {
    if (g_serving) g_serving->stop();
}

int cmd_serve(Context& c) {
    require_file(c.o.pairs, "pairs");
    if (c.o.log.empty()) throw ConfigError("--log is required");
    service::AnnotationService svc(service::ServiceOptions{c.o.pairs, c.o.log, c.o.static_dir});
    const int port = svc.bind(c.o.host, c.o.port);
    c.out << "listening on http://" << c.o.host << ":" << port << std::endl;
    g_serving = &svc;
    std::signal(SIGINT, stop_serving);
    std::signal(SIGTERM, stop_serving);
    svc.run();
    g_serving = nullptr;
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Controlled table-to-text generation with domain knowledge", "ctrltab"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::map<std::string, std::function<int(Context&)>> handlers;

    auto* build = app.add_subcommand("build-corpus", "Align article sentences with tables into pairs JSONL");
    add_common(build, o.common, true);
    build->add_option("--xml", o.xml_dir, "Directory of article XML files")->required();
    build->add_option("--tables", o.tables, "Tables JSONL")->required();
    build->add_option("--theta-overlap", o.theta_overlap, "Minimum sentence/table overlap")->capture_default_str();
    build->add_option("--theta-dup", o.theta_dup, "Token F1 at which a sentence duplicates the description")
        ->capture_default_str();
    build->add_option("--cap", o.cap, "Knowledge sentences kept per table")->capture_default_str();
    handlers["build-corpus"] = cmd_build_corpus;

    auto* stats = app.add_subcommand("stats", "Corpus statistics");
    add_common(stats, o.common, false);
    stats->add_option("--pairs", o.pairs, "Pairs JSONL")->required();
    stats->add_option("--split", o.split, "train, dev, test or all");
    stats->add_flag("--check", o.check, "Compare against the published corpus statistics");
    handlers["stats"] = cmd_stats;

    auto* tr = app.add_subcommand("train-retriever", "Train the denoising retriever");
    add_common(tr, o.common, true);
    add_hyper(tr, o.hyper);
    tr->add_option("--pairs", o.pairs, "Pairs JSONL")->required();
    tr->add_option("--split", o.split, "train, dev, test or all (default all)");
    tr->add_option("--noise-ratio", o.noise_ratio, "Fraction of knowledge tokens deleted")->capture_default_str();
    handlers["train-retriever"] = cmd_train_retriever;

    auto* tg = app.add_subcommand("train-generator", "Train the description generator");
    add_common(tg, o.common, true);
    add_hyper(tg, o.hyper);
    tg->add_option("--pairs", o.pairs, "Pairs JSONL")->required();
    tg->add_option("--split", o.split, "train, dev, test or all (default train)");
    tg->add_option("--retriever", o.retriever, "Retriever checkpoint (TF-IDF when omitted)");
    tg->add_option("--n-kb", o.n_kb, "Retrieved sentences per pair")->capture_default_str();
    tg->add_flag("--no-bkg", o.no_bkg, "Train without the knowledge segment");
    tg->add_option("--max-len", o.max_len, "Target length cap in tokens")->capture_default_str();
    handlers["train-generator"] = cmd_train_generator;

    auto* rt = app.add_subcommand("retrieve", "Top-n knowledge sentences per pair");
    add_common(rt, o.common, true);
    rt->add_option("--pairs", o.pairs, "Pairs JSONL")->required();
    rt->add_option("--split", o.split, "train, dev, test or all (default all)");
    rt->add_option("--retriever", o.retriever, "Retriever checkpoint (TF-IDF when omitted)");
    rt->add_option("--n-kb", o.n_kb, "Sentences per pair")->capture_default_str();
    handlers["retrieve"] = cmd_retrieve;

    auto* gen = app.add_subcommand("generate", "Generate descriptions");
    add_common(gen, o.common, true);
    gen->add_option("--pairs", o.pairs, "Pairs JSONL")->required();
    gen->add_option("--split", o.split, "train, dev, test or all (default test)");
    gen->add_option("--model", o.model, "Generator checkpoint");
    gen->add_option("--retriever", o.retriever, "Retriever checkpoint (TF-IDF when omitted)");
    gen->add_option("--n-kb", o.n_kb, "Retrieved sentences for --llm prompts")->capture_default_str();
    gen->add_option("--beam", o.beam, "Beam width; 1 is greedy")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--max-len", o.max_len, "Output cap in tokens")->capture_default_str();
    gen->add_option("--length-penalty", o.length_penalty, "Beam length penalty exponent")->capture_default_str();
    gen->add_flag("--llm", o.llm, "Direct generation through the LLM endpoint (CTRLTAB_LLM_*)");
    gen->add_option("--template", o.prompt_template, "Prompt template for --llm")->capture_default_str();
    handlers["generate"] = cmd_generate;

    auto* ev = app.add_subcommand("evaluate", "Score generations against references");
    add_common(ev, o.common, false);
    ev->add_option("--gen", o.gen, "Generation JSONL")->required();
    ev->add_option("--pairs", o.pairs, "Pairs JSONL")->required();
    ev->add_option("--baseline", o.baseline, "Second generation JSONL for a paired sign test");
    ev->add_option("--human-eval", o.human_eval, "Also export a human-evaluation sheet here");
    ev->add_option("--external-metric", o.external_metric, "Metric name for CTRLTAB_SCORER_ENDPOINT");
    handlers["evaluate"] = cmd_evaluate;

    auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of both models");
    add_common(gc, o.common, false);
    gc->add_option("--pairs", o.pairs, "Use the first pair of this file instead of the built-in one");
    gc->add_option("--which", o.which, "retriever, generator or both")->capture_default_str();
    gc->add_option("--noise-ratio", o.noise_ratio, "Deletion ratio for the retriever input")->capture_default_str();
    handlers["gradcheck"] = cmd_gradcheck;

    auto* ag = app.add_subcommand("agreement", "Inter-annotator agreement from a verdict log");
    add_common(ag, o.common, false);
    ag->add_option("--pairs", o.pairs, "Pairs JSONL")->required();
    ag->add_option("--log", o.log, "Verdict log JSONL")->required();
    ag->add_option("--a", o.annotator_a, "First annotator")->required();
    ag->add_option("--b", o.annotator_b, "Second annotator")->required();
    ag->add_option("--sample", o.sample, "Pairs sampled when more are shared")->capture_default_str();
    handlers["agreement"] = cmd_agreement;

    auto* sv = app.add_subcommand("serve", "Run the annotation service");
    add_common(sv, o.common, false);
    sv->add_option("--pairs", o.pairs, "Pairs JSONL")->required();
    sv->add_option("--log", o.log, "Verdict log JSONL (created if missing)")->required();
    sv->add_option("--static", o.static_dir, "Directory served under /");
    sv->add_option("--host", o.host, "Bind address")->capture_default_str();
    sv->add_option("--port", o.port, "Port; 0 picks a free one")->capture_default_str();
    handlers["serve"] = cmd_serve;

    try {
        std::vector<std::string> args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kValidation;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        util::set_log_level(log_level_from_string(o.common.log_level));
        Context ctx{o, sub, out};
        return handlers.at(sub->get_name())(ctx);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const NotFoundError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntime;
    }
}

} // namespace ctrltab::cli
