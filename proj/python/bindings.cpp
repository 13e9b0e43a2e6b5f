#include "kad/error.hpp"
#include "kad/simulation.hpp"
#include "kad/storage.hpp"
#include "kad/verification.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;

namespace {

py::dict effect_dict(const kad::LearnedEffect &e) {
    py::dict d;
    d["s"] = e.subject;
    d["r"] = e.relation;
    d["o"] = e.object;
    d["status"] = e.status ? kad::to_string(*e.status) : std::string("deleted");
    return d;
}

py::dict triple_dict(const kad::Engine &engine, const kad::Triple &t) {
    py::dict d;
    d["s"] = engine.display(t.subject);
    d["r"] = t.relation;
    d["o"] = engine.display(t.object);
    d["status"] = kad::to_string(t.status);
    return d;
}

std::optional<kad::Status> status_arg(const std::optional<std::string> &s) {
    if (!s || *s == "all") return std::nullopt;
    return kad::status_from_string(*s);
}

} // namespace

PYBIND11_MODULE(_kad, m) {
    m.doc() = "Rule-based dialogue engine that learns knowledge triples";

    py::register_exception<kad::Error>(m, "KadError");
    py::register_exception<kad::UnknownSession>(m, "UnknownSession", PyExc_KeyError);

    py::class_<kad::EngineConfig>(m, "Config")
        .def_property_readonly("rule_count", [](const kad::EngineConfig &c) { return c.rules.size(); })
        .def_property_readonly("relations", [](const kad::EngineConfig &c) {
            std::vector<std::string> names;
            for (const auto &r : c.relations.all()) names.push_back(r.name);
            return names;
        });

    m.def("load_bundle", [](const std::filesystem::path &dir) { return kad::load_config(kad::bundle_paths(dir)); },
          py::arg("directory"), "Loads rules.kad, relations.txt, schemas.txt and the optional files from a directory.");
    m.def(
        "load_config",
        [](std::string rules, std::string relations, std::string schemas, std::string gazetteer, std::string inference,
           std::string lexicon) {
            return kad::load_config(kad::ConfigSources{std::move(rules), std::move(relations), std::move(schemas),
                                                       std::move(gazetteer), std::move(inference), std::move(lexicon)});
        },
        py::arg("rules"), py::arg("relations"), py::arg("schemas") = "", py::arg("gazetteer") = "",
        py::arg("inference") = "", py::arg("lexicon") = "");

    py::class_<kad::Engine>(m, "Engine")
        .def(py::init([](const kad::EngineConfig &config, int k, int rate_limit) {
                 kad::EngineOptions o;
                 o.affirmations_required = k;
                 o.rate_limit = rate_limit;
                 return std::make_unique<kad::Engine>(config, o);
             }),
             py::arg("config"), py::arg("k") = 1, py::arg("rate_limit") = 3)
        .def("open_session", py::overload_cast<>(&kad::Engine::open_session))
        .def(
            "chat",
            [](kad::Engine &e, const std::string &session, const std::string &text) {
                kad::TurnOutcome out;
                {
                    py::gil_scoped_release release;
                    out = e.handle_turn(session, text);
                }
                py::dict d;
                d["reply"] = out.reply;
                d["question"] = out.asked ? py::object(py::str(out.asked->text)) : py::object(py::none());
                py::list learned;
                for (const auto &eff : out.learned) learned.append(effect_dict(eff));
                d["learned"] = learned;
                d["answer_consumed"] = out.answer_consumed;
                return d;
            },
            py::arg("session"), py::arg("text"))
        .def(
            "triples",
            [](const kad::Engine &e, std::optional<std::string> status) {
                py::list out;
                for (const auto &t : e.triples(status_arg(status))) out.append(triple_dict(e, t));
                return out;
            },
            py::arg("status") = py::none())
        .def("queue_size", [](const kad::Engine &e) { return e.queue().size(); })
        .def("entity_count", &kad::Engine::entity_count)
        .def("save", &kad::Engine::save)
        .def("load", [](kad::Engine &e, const std::string &text) { e.load(text); });

    m.def(
        "interpret_answer", [](const std::string &text) { return kad::to_string(kad::interpret_answer(text)); },
        py::arg("text"));
    m.def("levenshtein", [](const std::string &a, const std::string &b) { return kad::levenshtein(a, b); });
    m.def("name_similarity", [](const std::string &a, const std::string &b) {
        switch (kad::name_similarity(a, b)) {
        case kad::NameVerdict::identical: return "identical";
        case kad::NameVerdict::candidate_alias: return "candidate-alias";
        case kad::NameVerdict::distinct: break;
        }
        return "distinct";
    });

    m.def(
        "simulate",
        [](const kad::EngineConfig &config, const std::string &script_json, int k, int rate_limit) {
            kad::EngineOptions o;
            o.affirmations_required = k;
            o.rate_limit = rate_limit;
            auto result = kad::run_simulation(config, kad::parse_script(script_json), o);
            const auto &mt = result.metrics;
            py::dict d;
            d["precision"] = mt.precision;
            d["recall"] = mt.recall;
            d["verified"] = mt.verified;
            d["gold"] = mt.gold;
            d["correct"] = mt.correct;
            d["questions_asked"] = mt.questions_asked;
            d["questions_answered"] = mt.questions_answered;
            d["unanswered"] = mt.unanswered;
            d["deleted"] = mt.deleted;
            d["kb"] = result.kb_text;
            return d;
        },
        py::arg("config"), py::arg("script"), py::arg("k") = 1, py::arg("rate_limit") = 3);
}
