#include "kad/service.hpp"

#include "kad/error.hpp"
#include "kad/storage.hpp"
#include "kad/text.hpp"

#include <httplib.h>
#include <json.hpp>

#include <istream>
#include <ostream>

namespace kad {

using nlohmann::json;

namespace {

json node_json(const Engine &engine, const Node &n) { return engine.display(n); }

json triple_json(const Engine &engine, const Triple &t) {
    return {{"s", engine.display(t.subject)},
            {"r", t.relation},
            {"o", node_json(engine, t.object)},
            {"status", to_string(t.status)},
            {"provenance", t.provenance}};
}

json effect_json(const LearnedEffect &e) {
    return {{"s", e.subject}, {"r", e.relation}, {"o", e.object}, {"status", e.status ? to_string(*e.status) : "deleted"}};
}

json queue_json(const Engine &engine, const QueueItem &q) {
    json j{{"id", q.id},
           {"kind", to_string(q.kind)},
           {"subject", engine.display(q.subject)},
           {"relation", q.relation},
           {"object", q.object ? json(engine.display(*q.object)) : json(nullptr)},
           {"excluded", json(std::vector<std::string>(q.excluded.begin(), q.excluded.end()))},
           {"target", q.target ? json(*q.target) : json(nullptr)},
           {"priority", q.priority},
           {"created_turn", q.created_turn},
           {"outstanding", q.outstanding ? json(*q.outstanding) : json(nullptr)}};
    try {
        j["question"] = engine.describe(q);
    } catch (const Error &) {
        j["question"] = nullptr;
    }
    return j;
}

void send(httplib::Response &res, int status, const json &body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response &res, int status, const std::string &message) { send(res, status, {{"error", message}}); }

} // namespace

struct Service::Impl {
    Impl(Engine &e, std::filesystem::path p) : engine(e), kb_path(std::move(p)) { routes(); }

    void routes() {
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                    {"Access-Control-Allow-Headers", "Content-Type"},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
        server.Options(R"(/.*)", [](const httplib::Request &, httplib::Response &res) { res.status = 204; });

        server.Post("/session", [this](const httplib::Request &req, httplib::Response &res) {
            std::optional<std::string> wanted;
            if (!text::trim(req.body).empty()) {
                auto body = json::parse(req.body, nullptr, false);
                if (body.is_discarded() || !body.is_object()) return fail(res, 400, "body must be a JSON object");
                if (body.contains("session")) {
                    if (!body["session"].is_string() || body["session"].get<std::string>().empty())
                        return fail(res, 400, "'session' must be a non-empty string");
                    wanted = body["session"].get<std::string>();
                }
            }
            SessionId id;
            if (wanted) {
                engine.open_session(*wanted);
                id = *wanted;
            } else {
                id = engine.open_session();
            }
            send(res, 200, {{"session", id}});
        });

        server.Post("/chat", [this](const httplib::Request &req, httplib::Response &res) {
            auto body = json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object()) return fail(res, 400, "body must be a JSON object");
            if (!body.contains("session") || !body["session"].is_string() || !body.contains("text") ||
                !body["text"].is_string())
                return fail(res, 400, "expected {\"session\": string, \"text\": string}");
            try {
                auto outcome = engine.handle_turn(body["session"].get<std::string>(), body["text"].get<std::string>());
                json learned = json::array();
                for (const auto &e : outcome.learned) learned.push_back(effect_json(e));
                send(res, 200,
                     {{"reply", outcome.reply},
                      {"question", outcome.asked ? json(outcome.asked->text) : json(nullptr)},
                      {"learned", learned},
                      {"answer_consumed", outcome.answer_consumed}});
            } catch (const UnknownSession &e) {
                fail(res, 404, e.what());
            }
        });

        server.Get("/kb", [this](const httplib::Request &req, httplib::Response &res) {
            std::optional<Status> status;
            if (req.has_param("status")) {
                auto s = req.get_param_value("status");
                if (s != "all") {
                    try {
                        status = status_from_string(s);
                    } catch (const Error &e) {
                        return fail(res, 400, e.what());
                    }
                }
            }
            json out = json::array();
            for (const auto &t : engine.triples(status)) out.push_back(triple_json(engine, t));
            send(res, 200, out);
        });

        server.Get("/queue", [this](const httplib::Request &, httplib::Response &res) {
            json out = json::array();
            for (const auto &q : engine.queue()) out.push_back(queue_json(engine, q));
            send(res, 200, out);
        });

        server.Post("/save", [this](const httplib::Request &, httplib::Response &res) {
            if (kb_path.empty()) return fail(res, 400, "the service was started without a KB path");
            write_file(kb_path, engine.save());
            send(res, 200, {{"saved", kb_path.string()}});
        });

        server.set_exception_handler([](const httplib::Request &, httplib::Response &res, std::exception_ptr ep) {
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception &e) {
                fail(res, 500, e.what());
            } catch (...) {
                fail(res, 500, "internal error");
            }
        });
    }

    Engine &engine;
    std::filesystem::path kb_path;
    httplib::Server server;
};

Service::Service(Engine &engine, std::filesystem::path kb_path) : impl_(std::make_unique<Impl>(engine, std::move(kb_path))) {}

Service::~Service() = default;

bool Service::listen(const std::string &host, int port) { return impl_->server.listen(host, port); }

int Service::bind_any_port(const std::string &host) { return impl_->server.bind_to_any_port(host); }

bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

// ---- REPL -----------------------------------------------------------------------

int run_repl(Engine &engine, const std::filesystem::path &kb_path, std::istream &in, std::ostream &out) {
    auto session = engine.open_session();
    auto save = [&] {
        if (!kb_path.empty()) write_file(kb_path, engine.save());
    };
    for (std::string line; std::getline(in, line);) {
        auto input = text::trim(line);
        if (input.empty()) continue;
        if (input == ":quit") {
            save();
            return 0;
        }
        if (input == ":save") {
            if (kb_path.empty()) {
                out << "no KB path given\n";
            } else {
                save();
                out << "saved " << kb_path.string() << "\n";
            }
            continue;
        }
        if (input == ":kb") {
            out << engine.entity_count() << " entities, " << engine.triples().size() << " triples\n";
            for (const auto &t : engine.triples())
                out << "  (" << engine.display(t.subject) << ", " << t.relation << ", " << engine.display(t.object)
                    << ") " << to_string(t.status) << "\n";
            continue;
        }
        if (input == ":queue") {
            auto items = engine.queue();
            out << items.size() << " queued\n";
            for (const auto &q : items) out << "  [" << to_string(q.kind) << "] " << engine.describe(q) << "\n";
            continue;
        }
        auto outcome = engine.handle_turn(session, input);
        out << outcome.reply << "\n";
        if (outcome.asked) out << outcome.asked->text << "\n";
    }
    save();
    return 0;
}

} // namespace kad
