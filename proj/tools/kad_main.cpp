#include "kad/error.hpp"
#include "kad/service.hpp"
#include "kad/simulation.hpp"
#include "kad/storage.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string bundle, rules, relations, schemas, gazetteer, infer, lexicon, kb;
    int k = 1;
    int rate_limit = 3;
};

void add_common(CLI::App *app, Common &c) {
    app->add_option("--bundle", c.bundle, "Directory holding rules.kad, relations.txt, schemas.txt, ...");
    app->add_option("--rules", c.rules, "Rule DSL file");
    app->add_option("--relations", c.relations, "Relation registry file");
    app->add_option("--schemas", c.schemas, "Type schema file");
    app->add_option("--gazetteer", c.gazetteer, "Gazetteer (TSV)");
    app->add_option("--infer", c.infer, "Inference rule file");
    app->add_option("--lexicon", c.lexicon, "Answer lexicon file");
    app->add_option("--kb", c.kb, "KB file (loaded when present, written on save)");
    app->add_option("--k", c.k, "Affirmations needed to verify a triple")->check(CLI::PositiveNumber);
    app->add_option("--rate-limit", c.rate_limit, "Turns between two questions to one user")->check(CLI::NonNegativeNumber);
}

kad::EngineConfig load(const Common &c) {
    kad::ConfigPaths paths;
    if (!c.bundle.empty()) paths = kad::bundle_paths(c.bundle);
    auto pick = [](fs::path &slot, const std::string &given) {
        if (!given.empty()) slot = given;
    };
    pick(paths.rules, c.rules);
    pick(paths.relations, c.relations);
    pick(paths.schemas, c.schemas);
    pick(paths.gazetteer, c.gazetteer);
    pick(paths.inference, c.infer);
    pick(paths.lexicon, c.lexicon);
    for (const auto *p : {&paths.rules, &paths.relations, &paths.schemas, &paths.gazetteer, &paths.inference, &paths.lexicon})
        if (!p->empty() && !fs::exists(*p)) throw kad::ConfigError("no such file: " + p->string());
    return kad::load_config(paths);
}

kad::EngineOptions options_of(const Common &c) {
    kad::EngineOptions o;
    o.affirmations_required = c.k;
    o.rate_limit = c.rate_limit;
    return o;
}

void load_kb_if_present(kad::Engine &engine, const std::string &path) {
    if (!path.empty() && fs::exists(path)) engine.load(kad::read_file(path));
}

kad::Service *g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"kad: a rule-based dialogue system that learns knowledge triples"};
    app.require_subcommand(1);

    Common chat_opts, serve_opts, sim_opts;
    auto *chat = app.add_subcommand("chat", "Interactive chat on stdin/stdout");
    add_common(chat, chat_opts);

    auto *serve = app.add_subcommand("serve", "HTTP+JSON service");
    add_common(serve, serve_opts);
    std::string host = "127.0.0.1";
    int port = 8080;
    serve->add_option("--host", host, "Address to bind");
    serve->add_option("--port", port, "Port to listen on")->check(CLI::Range(0, 65535));

    auto *simulate = app.add_subcommand("simulate", "Replay a multi-user script and report metrics");
    add_common(simulate, sim_opts);
    std::string script_path;
    bool transcript = false;
    simulate->add_option("--script", script_path, "Simulation script (JSON)")->required();
    simulate->add_flag("--transcript", transcript, "Print every turn to stderr");

    CLI11_PARSE(app, argc, argv);

    try {
        if (chat->parsed()) {
            kad::Engine engine(load(chat_opts), options_of(chat_opts));
            load_kb_if_present(engine, chat_opts.kb);
            return kad::run_repl(engine, chat_opts.kb, std::cin, std::cout);
        }
        if (serve->parsed()) {
            kad::Engine engine(load(serve_opts), options_of(serve_opts));
            load_kb_if_present(engine, serve_opts.kb);
            kad::Service service(engine, serve_opts.kb);
            g_service = &service;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "listening on " << host << ":" << port << "\n";
            if (!service.listen(host, port)) {
                std::cerr << "kad: cannot listen on " << host << ":" << port << "\n";
                return 1;
            }
            return 0;
        }
        auto config = load(sim_opts);
        auto script = kad::parse_script(kad::read_file(script_path));
        auto result = kad::run_simulation(config, script, options_of(sim_opts));
        if (transcript) {
            for (const auto &line : result.transcript) {
                std::cerr << line.user << ": " << line.said << "\n  kad: " << line.outcome.reply << "\n";
                if (line.outcome.asked) std::cerr << "  kad: " << line.outcome.asked->text << "\n";
            }
        }
        if (!sim_opts.kb.empty()) kad::write_file(sim_opts.kb, result.kb_text);
        const auto &m = result.metrics;
        nlohmann::json out{{"precision", m.precision},       {"recall", m.recall},
                           {"verified", m.verified},         {"gold", m.gold},
                           {"correct", m.correct},           {"questions_asked", m.questions_asked},
                           {"questions_answered", m.questions_answered},
                           {"unanswered", m.unanswered},     {"deleted", m.deleted}};
        std::cout << out.dump(2) << "\n";
        return 0;
    } catch (const kad::Error &e) {
        std::cerr << "kad: " << e.what() << "\n";
        return 1;
    }
}
