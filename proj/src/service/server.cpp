#include "ctrltab/service/server.hpp"

#include "ctrltab/core/pairs_io.hpp"
#include "ctrltab/util/error.hpp"
#include "ctrltab/util/log.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <mutex>
#include <shared_mutex>

namespace ctrltab::service {
namespace {

using ojson = nlohmann::ordered_json;

void send_json(httplib::Response& res, int status, const ojson& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    ojson body;
    body["code"] = code;
    body["message"] = message;
    send_json(res, status, body);
}

ojson pair_json(const PairRecord& p) { return ojson::parse(format_pair(p)); }

std::vector<PairRecord> load_dataset(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw Error("cannot read dataset: " + path);
    try {
        return read_pairs(path);
    } catch (const ParseError& e) {
        throw Error("cannot load dataset " + path + ": " + e.what());
    }
}

} // namespace

struct AnnotationService::Impl {
    ServiceOptions opts;
    AnnotationState state;
    VerdictLog log;
    mutable std::shared_mutex mutex;
    std::size_t verdicts = 0;
    httplib::Server server;
    bool bound = false;

    explicit Impl(ServiceOptions o)
        : opts(std::move(o)), state(load_dataset(opts.dataset_path)), log(opts.log_path) {
        for (const auto& e : log.replayed()) {
            try {
                state.check(e.verdict);
            } catch (const Error& err) {
                throw Error("verdict log " + opts.log_path + " seq " + std::to_string(e.seq) +
                            " does not fit the dataset: " + err.what());
            }
            state.apply(e.verdict, e.seq);
            ++verdicts;
        }
        util::log_info("annotation service: " + std::to_string(state.pairs().size()) + " pairs, replayed " +
                       std::to_string(verdicts) + " verdicts");
        routes();
    }

    std::uint64_t submit(Verdict v) {
        std::unique_lock lock(mutex);
        state.check(v);
        if (v.timestamp.empty()) v.timestamp = utc_timestamp_now();
        const std::uint64_t seq = log.append(v);
        state.apply(v, seq);
        ++verdicts;
        return seq;
    }

    template <typename Fn>
    httplib::Server::Handler guarded(Fn fn) {
        return [fn](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const NotFoundError& e) {
                send_error(res, 404, "not_found", e.what());
            } catch (const ValidationError& e) {
                send_error(res, 422, "validation_error", e.what());
            } catch (const ConfigError& e) {
                send_error(res, 400, "bad_request", e.what());
            } catch (const nlohmann::json::exception& e) {
                send_error(res, 400, "bad_request", std::string("malformed JSON: ") + e.what());
            } catch (const std::exception& e) {
                util::log_error(std::string("annotation service: ") + e.what());
                send_error(res, 500, "internal", e.what());
            }
        };
    }

    void list_pairs(const httplib::Request& req, httplib::Response& res) {
        std::optional<Split> split;
        if (req.has_param("split")) {
            try {
                split = split_from_string(req.get_param_value("split"));
            } catch (const Error& e) {
                throw ConfigError(e.what());
            }
        }
        std::shared_lock lock(mutex);
        ojson rows = ojson::array();
        std::size_t verified = 0;
        for (const auto& p : state.pairs()) {
            if (split && p.split != *split) continue;
            const auto names = state.annotators(p.id);
            ojson r;
            r["id"] = p.id;
            r["split"] = std::string(to_string(p.split));
            r["n_kb"] = p.kb.size();
            r["annotators"] = names;
            r["verified"] = !names.empty();
            if (!names.empty()) ++verified;
            rows.push_back(std::move(r));
        }
        ojson body;
        body["total"] = rows.size();
        body["verified"] = verified;
        body["pairs"] = std::move(rows);
        send_json(res, 200, body);
    }

    void get_pair(const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.path_params.at("id");
        const std::string annotator = req.has_param("annotator") ? req.get_param_value("annotator") : "";
        std::shared_lock lock(mutex);
        const PairRecord& base = state.pair(id);
        ojson body = pair_json(annotator.empty() ? base : state.annotator_view(id, annotator));
        ojson autos = ojson::array();
        for (const auto& r : base.highlights.refs) autos.push_back({r.row, r.col});
        body["auto_highlights"] = std::move(autos);
        body["annotators"] = state.annotators(id);
        if (!annotator.empty()) {
            body["annotator"] = annotator;
            const ActiveVerdict* av = state.verdict(id, annotator);
            if (av) {
                ojson v = to_json(av->verdict);
                v["seq"] = av->seq;
                body["verdict"] = std::move(v);
            } else {
                body["verdict"] = nullptr;
            }
        }
        send_json(res, 200, body);
    }

    void post_verdict(const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.path_params.at("id");
        const auto j = nlohmann::json::parse(req.body);
        Verdict v = verdict_from_json(j);
        if (!v.pair_id.empty() && v.pair_id != id)
            throw ValidationError("body pair_id " + v.pair_id + " does not match path " + id);
        v.pair_id = id;
        const std::uint64_t seq = submit(std::move(v));
        ojson body;
        body["seq"] = seq;
        body["pair_id"] = id;
        body["annotator_id"] = j.at("annotator_id");
        send_json(res, 201, body);
    }

    void agreement(const httplib::Request& req, httplib::Response& res) {
        if (!req.has_param("a") || !req.has_param("b")) throw ConfigError("query parameters a and b are required");
        const std::string a = req.get_param_value("a"), b = req.get_param_value("b");
        corpus::AgreementOptions opts;
        if (req.has_param("sample")) opts.sample_size = std::stoul(req.get_param_value("sample"));
        if (req.has_param("seed")) opts.seed = std::stoull(req.get_param_value("seed"));
        std::shared_lock lock(mutex);
        const auto rep = state.agreement(a, b, opts);
        ojson body;
        body["a"] = a;
        body["b"] = b;
        body["common_pairs"] = state.common_pairs(a, b);
        body["n_samples"] = rep.n_samples;
        body["cell_agreement"] = rep.cell_agreement;
        body["kb_agreement"] = rep.kb_agreement;
        send_json(res, 200, body);
    }

    void export_pairs(const httplib::Request& req, httplib::Response& res) {
        std::optional<std::string> adjudicator;
        if (req.has_param("adjudicator")) adjudicator = req.get_param_value("adjudicator");
        const bool verified_only = req.has_param("verified_only") && req.get_param_value("verified_only") != "0" &&
                                   req.get_param_value("verified_only") != "false";
        std::shared_lock lock(mutex);
        res.status = 200;
        res.set_content(format_pairs(state.export_pairs(adjudicator, verified_only)),
                        "application/x-ndjson; charset=utf-8");
    }

    void routes() {
        // SO_REUSEADDR only: the library default of SO_REUSEPORT would let a
        // second instance bind the same port silently.
        server.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
        });
        server.Get("/api/pairs", guarded([this](const auto& req, auto& res) { list_pairs(req, res); }));
        server.Get("/api/pairs/:id", guarded([this](const auto& req, auto& res) { get_pair(req, res); }));
        server.Post("/api/pairs/:id/verdicts", guarded([this](const auto& req, auto& res) { post_verdict(req, res); }));
        server.Get("/api/agreement", guarded([this](const auto& req, auto& res) { agreement(req, res); }));
        server.Get("/api/export", guarded([this](const auto& req, auto& res) { export_pairs(req, res); }));
        if (!opts.static_dir.empty() && !server.set_mount_point("/", opts.static_dir))
            throw Error("cannot serve static files from " + opts.static_dir);
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty()) send_error(res, res.status, res.status == 404 ? "not_found" : "error", "no such resource");
        });
    }
};

AnnotationService::AnnotationService(ServiceOptions opts) : impl_(std::make_unique<Impl>(std::move(opts))) {}

AnnotationService::~AnnotationService() = default;

int AnnotationService::bind(const std::string& host, int port) {
    int bound = 0;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else {
        bound = impl_->server.bind_to_port(host, port) ? port : -1;
    }
    if (bound <= 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
    impl_->bound = true;
    return bound;
}

void AnnotationService::run() {
    if (!impl_->bound) throw Error("annotation service is not bound");
    impl_->server.listen_after_bind();
}

void AnnotationService::stop() { impl_->server.stop(); }

void AnnotationService::wait_until_ready() { impl_->server.wait_until_ready(); }

std::uint64_t AnnotationService::submit(Verdict v) { return impl_->submit(std::move(v)); }

std::size_t AnnotationService::verdict_count() const {
    std::shared_lock lock(impl_->mutex);
    return impl_->verdicts;
}

} // namespace ctrltab::service
