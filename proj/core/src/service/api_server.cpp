#include "designflow/domain_json.hpp"
#include "designflow/service.hpp"

#include <httplib.h>

namespace designflow {

using nlohmann::json;

namespace {

struct Reply {
    int status = 200;
    json body;
};

json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(Errc::bad_request, "request body must be a JSON object");
    return j;
}

template <class T>
T field_or(const json& body, const char* name, T fallback) {
    if (!body.contains(name) || body[name].is_null()) return fallback;
    try {
        return body[name].get<T>();
    } catch (const json::exception&) {
        throw Error(Errc::bad_request, std::string("field \"") + name + "\" has the wrong type");
    }
}

std::string required_string(const json& body, const char* name) {
    if (!body.contains(name) || !body[name].is_string()) {
        throw Error(Errc::bad_request, std::string("field \"") + name + "\" must be a string");
    }
    return body[name].get<std::string>();
}

RequirementField field_param(const std::string& s) {
    auto f = requirement_field_from_key(s);
    if (!f) throw Error(Errc::invalid_argument, "unknown requirement field: " + s, {{"field", s}});
    return *f;
}

ElementType type_param(const std::string& s) {
    auto t = element_type_from_key(s);
    if (!t) throw Error(Errc::invalid_argument, "unknown element type: " + s, {{"type", s}});
    return *t;
}

std::size_t count_param(const json& body, std::size_t fallback) {
    const auto n = field_or<long long>(body, "n", static_cast<long long>(fallback));
    if (n < 1 || n > 32) throw Error(Errc::invalid_argument, "n must be between 1 and 32");
    return static_cast<std::size_t>(n);
}

std::optional<Orientation> orientation_param(const json& body, std::optional<Orientation> fallback) {
    if (!body.contains("orientation") || body["orientation"].is_null()) return fallback;
    const auto s = field_or<std::string>(body, "orientation", "");
    auto o = orientation_from_string(s);
    if (!o) throw Error(Errc::invalid_argument, "orientation must be portrait, landscape or square");
    return o;
}

}  // namespace

struct ApiServer::Impl {
    Pipeline& pipeline;
    JobRegistry& jobs;
    httplib::Server server;
    std::thread thread;

    Impl(Pipeline& p, JobRegistry& j) : pipeline(p), jobs(j) { routes(); }

    using Handler = std::function<Reply(const httplib::Request&)>;

    void handle(const httplib::Request& req, httplib::Response& res, const Handler& h) {
        Reply r;
        try {
            r = h(req);
        } catch (const Error& e) {
            r = {http_status(e.code()), error_body(e)};
        } catch (const json::exception& e) {
            r = {400, error_body(Error(Errc::bad_request, e.what()))};
        } catch (const std::exception& e) {
            r = {500, error_body(Error(Errc::storage_error, e.what()))};
        }
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    }

    void get(const std::string& pattern, Handler h) {
        server.Get(pattern, [this, h](const httplib::Request& q, httplib::Response& s) { handle(q, s, h); });
    }
    void post(const std::string& pattern, Handler h) {
        server.Post(pattern, [this, h](const httplib::Request& q, httplib::Response& s) { handle(q, s, h); });
    }
    void put(const std::string& pattern, Handler h) {
        server.Put(pattern, [this, h](const httplib::Request& q, httplib::Response& s) { handle(q, s, h); });
    }
    void patch(const std::string& pattern, Handler h) {
        server.Patch(pattern, [this, h](const httplib::Request& q, httplib::Response& s) { handle(q, s, h); });
    }
    void del(const std::string& pattern, Handler h) {
        server.Delete(pattern, [this, h](const httplib::Request& q, httplib::Response& s) { handle(q, s, h); });
    }

    Reply job(JobKind kind, const SessionId& sid, std::function<json()> work) {
        return {202, jobs.submit(kind, sid, std::move(work))};
    }

    Session existing(const std::string& id) { return pipeline.session(SessionId(id)); }

    const ElementCard& existing_card(const Session& s, const std::string& card) {
        const ElementCard* c = s.find_card(CardId(card));
        if (!c) throw Error(Errc::unknown_card, "unknown element card: " + card, {{"card_id", card}});
        return *c;
    }

    void routes() {
        Pipeline& p = pipeline;

        // Sessions
        post("/sessions", [&p](const httplib::Request& req) -> Reply {
            const json body = body_of(req);
            SessionOptions opt;
            if (body.contains("output_language") && !body["output_language"].is_null()) {
                opt.output_language = field_or<std::string>(body, "output_language", "");
            }
            opt.deliverable_context.deliverable_format = field_or<std::string>(body, "deliverable_format", "");
            opt.deliverable_context.orientation = orientation_param(body, Orientation::portrait);
            return {201, p.create_session(field_or<std::string>(body, "brief_text", ""), opt)};
        });
        get("/sessions", [&p](const httplib::Request&) -> Reply {
            return {200, {{"sessions", p.store().list_sessions()}}};
        });
        get(R"(/sessions/([^/]+))", [this](const httplib::Request& req) -> Reply {
            return {200, existing(req.matches[1])};
        });
        get(R"(/sessions/([^/]+)/history)", [this](const httplib::Request& req) -> Reply {
            const Session s = existing(req.matches[1]);
            json items = json::array();
            for (const auto& a : s.history) {
                const IntegratedPrompt* ip = s.find_prompt(a.integrated_prompt_id);
                items.push_back({{"artifact", a}, {"integrated_prompt", ip ? json(*ip) : json(nullptr)}});
            }
            return {200, {{"history", items}}};
        });
        get(R"(/sessions/([^/]+)/events)", [&p](const httplib::Request& req) -> Reply {
            return {200, {{"events", p.events(SessionId(req.matches[1]))}}};
        });
        get(R"(/sessions/([^/]+)/metrics)", [&p](const httplib::Request& req) -> Reply {
            return {200, p.metrics(SessionId(req.matches[1]))};
        });
        post(R"(/sessions/([^/]+)/close)", [&p](const httplib::Request& req) -> Reply {
            p.close_session(SessionId(req.matches[1]));
            return {200, {{"ok", true}}};
        });

        // Requirements
        post(R"(/sessions/([^/]+)/requirements/extract)", [this, &p](const httplib::Request& req) -> Reply {
            const json body = body_of(req);
            const SessionId sid = existing(req.matches[1]).id;
            std::optional<std::string> brief;
            if (body.contains("brief_text") && !body["brief_text"].is_null()) {
                brief = field_or<std::string>(body, "brief_text", "");
            }
            return job(JobKind::extract, sid, [&p, sid, brief] { return json(p.extract_requirements(sid, brief)); });
        });
        post(R"(/sessions/([^/]+)/requirements/([a-z_]+)/recommend)", [this, &p](const httplib::Request& req) -> Reply {
            const json body = body_of(req);
            const auto field = field_param(req.matches[2]);
            const auto n = count_param(body, p.config().requirement_candidates);
            const SessionId sid = existing(req.matches[1]).id;
            return job(JobKind::recommend_requirements, sid, [&p, sid, field, n] {
                return json{{"candidates", p.recommend_requirements(sid, field, n)}};
            });
        });
        post(R"(/sessions/([^/]+)/requirements/entries)", [&p](const httplib::Request& req) -> Reply {
            const json body = body_of(req);
            const auto field = field_param(required_string(body, "field"));
            const auto origin = entry_origin_from_string(field_or<std::string>(body, "origin", "manual"));
            const SessionId sid(req.matches[1]);
            const auto entry = p.add_entry(sid, field, required_string(body, "text"), origin);
            return {201, {{"entry", entry}, {"requirement_cards", p.session(sid).requirement_cards}}};
        });
        patch(R"(/sessions/([^/]+)/requirements/entries/([^/]+))", [&p](const httplib::Request& req) -> Reply {
            const json body = body_of(req);
            const SessionId sid(req.matches[1]);
            const auto entry = p.edit_entry(sid, EntryId(req.matches[2]), required_string(body, "text"));
            return {200, {{"entry", entry}, {"requirement_cards", p.session(sid).requirement_cards}}};
        });
        del(R"(/sessions/([^/]+)/requirements/entries/([^/]+))", [&p](const httplib::Request& req) -> Reply {
            const SessionId sid(req.matches[1]);
            p.delete_entry(sid, EntryId(req.matches[2]));
            return {200, {{"requirement_cards", p.session(sid).requirement_cards}}};
        });

        // Elements
        post(R"(/sessions/([^/]+)/elements/([a-z]+)/recommend)", [this, &p](const httplib::Request& req) -> Reply {
            const json body = body_of(req);
            const auto type = type_param(req.matches[2]);
            const auto n = count_param(body, p.config().element_candidates);
            const SessionId sid = existing(req.matches[1]).id;
            return job(JobKind::recommend_elements, sid, [&p, sid, type, n] {
                return json{{"cards", p.recommend_and_preview(sid, type, n)}};
            });
        });
        post(R"(/sessions/([^/]+)/elements/([a-z]+)/manual)", [&p](const httplib::Request& req) -> Reply {
            const json body = body_of(req);
            const auto type = type_param(req.matches[2]);
            return {201, p.add_manual_element(SessionId(req.matches[1]), type, required_string(body, "rough_prompt"))};
        });
        post(R"(/sessions/([^/]+)/elements/([^/]+)/edit)", [this, &p](const httplib::Request& req) -> Reply {
            const json body = body_of(req);
            const Session s = existing(req.matches[1]);
            const CardId cid(req.matches[2]);
            const std::string rough = required_string(body, "rough_prompt");
            validate_rough_prompt(existing_card(s, cid.str()).type, rough);
            const SessionId sid = s.id;
            return job(JobKind::enhance_preview, sid, [&p, sid, cid, rough] { return json(p.edit_rough(sid, cid, rough)); });
        });
        post(R"(/sessions/([^/]+)/elements/([^/]+)/regenerate)", [this, &p](const httplib::Request& req) -> Reply {
            const Session s = existing(req.matches[1]);
            const CardId cid(req.matches[2]);
            const auto& card = existing_card(s, cid.str());
            if (!is_visual(card.type)) {
                throw Error(Errc::unsupported_for_text, "Text cards have no preview to regenerate",
                            {{"card_id", cid.str()}});
            }
            const SessionId sid = s.id;
            return job(JobKind::enhance_preview, sid, [&p, sid, cid] { return json(p.regenerate_preview(sid, cid)); });
        });
        post(R"(/sessions/([^/]+)/elements/([^/]+)/enhance)", [this, &p](const httplib::Request& req) -> Reply {
            const Session s = existing(req.matches[1]);
            const CardId cid(req.matches[2]);
            existing_card(s, cid.str());
            const SessionId sid = s.id;
            return job(JobKind::enhance_preview, sid, [&p, sid, cid] { return json(p.enhance_and_preview(sid, cid)); });
        });
        post(R"(/sessions/([^/]+)/elements/([^/]+)/select)", [&p](const httplib::Request& req) -> Reply {
            const json body = body_of(req);
            const bool selected = field_or<bool>(body, "selected", true);
            return {200, {{"selection", p.set_selected(SessionId(req.matches[1]), CardId(req.matches[2]), selected)}}};
        });
        del(R"(/sessions/([^/]+)/elements/([^/]+))", [&p](const httplib::Request& req) -> Reply {
            p.delete_card(SessionId(req.matches[1]), CardId(req.matches[2]));
            return {200, {{"ok", true}}};
        });

        // Selection and integration
        put(R"(/sessions/([^/]+)/selection)", [&p](const httplib::Request& req) -> Reply {
            const json body = body_of(req);
            SelectionSet sel;
            try {
                sel = body.get<SelectionSet>();
            } catch (const json::exception& e) {
                throw Error(Errc::bad_request, std::string("malformed selection: ") + e.what());
            }
            const SessionId sid(req.matches[1]);
            json out = {{"selection", p.set_selection(sid, sel)}, {"complete", true}, {"problem", nullptr}};
            try {
                p.check_selection(sid);
            } catch (const Error& e) {
                out["complete"] = false;
                out["problem"] = error_body(e)["error"];
            }
            return {200, out};
        });
        post(R"(/sessions/([^/]+)/integrate)", [this, &p](const httplib::Request& req) -> Reply {
            const SessionId sid(req.matches[1]);
            p.check_selection(sid);
            return job(JobKind::integrate, sid, [&p, sid] { return json(p.integrate_and_generate(sid)); });
        });
        post(R"(/sessions/([^/]+)/regenerate-design)", [this, &p](const httplib::Request& req) -> Reply {
            const Session s = existing(req.matches[1]);
            if (s.history.empty()) throw Error(Errc::no_prior_design, "there is no earlier design to regenerate");
            p.check_selection(s.id);
            const SessionId sid = s.id;
            return job(JobKind::regenerate_design, sid, [&p, sid] { return json(p.regenerate_design(sid)); });
        });

        // Jobs and images
        get(R"(/jobs/([^/]+))", [this](const httplib::Request& req) -> Reply {
            const Job j = jobs.get(req.matches[1]);
            const int status = j.state == JobState::failed && j.error ? http_status(j.error->code) : 200;
            return {status, j};
        });
        server.Get(R"(/images/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                const std::string bytes = pipeline.store().get_blob(req.matches[1].str());
                res.set_content(bytes, sniff_media_type(bytes));
            } catch (const Error& e) {
                res.status = http_status(e.code());
                res.set_content(error_body(e).dump(), "application/json");
            }
        });
    }
};

ApiServer::ApiServer(Pipeline& pipeline, JobRegistry& jobs) : impl_(std::make_unique<Impl>(pipeline, jobs)) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) throw Error(Errc::storage_error, "cannot bind " + host);
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) {
        throw Error(Errc::storage_error, "cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void ApiServer::listen() { impl_->server.listen_after_bind(); }

void ApiServer::start() {
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void ApiServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace designflow
