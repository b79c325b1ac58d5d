#include "hopi/term_json.hpp"

#include "hopi/errors.hpp"

namespace hopi {

namespace {

using json = nlohmann::json;
using K = Term::Kind;

json name_json(const Name& n) {
    return {{"id", n.id}, {"variable", n.is_variable()}};
}

Name name_from(const json& j) {
    std::string id = j.at("id").get<std::string>();
    return j.value("variable", false) ? Name::variable(id) : Name::constant(id);
}

const char* kind_name(ParamKind k) { return k == ParamKind::Process ? "process" : "name"; }

ParamKind kind_from(const json& j, const char* key) {
    std::string s = j.value(key, std::string("process"));
    if (s == "process") return ParamKind::Process;
    if (s == "name") return ParamKind::Name;
    throw HopiError("term json: unknown parameter kind '" + s + "'");
}

}  // namespace

json term_to_json(const Term& t) {
    switch (t.kind()) {
        case K::Nil:
            return {{"kind", "nil"}};
        case K::Var:
            return {{"kind", "var"}, {"id", t.as<node::Var>().id}};
        case K::Input: {
            const auto& n = t.as<node::Input>();
            return {{"kind", "input"},
                    {"subject", name_json(n.subject)},
                    {"binder", n.binder},
                    {"binder_kind", kind_name(n.binder_kind)},
                    {"body", term_to_json(n.body)}};
        }
        case K::Output: {
            const auto& n = t.as<node::Output>();
            return {{"kind", "output"},
                    {"subject", name_json(n.subject)},
                    {"payload", term_to_json(n.payload)},
                    {"cont", term_to_json(n.cont)}};
        }
        case K::Par: {
            const auto& n = t.as<node::Par>();
            return {{"kind", "par"}, {"left", term_to_json(n.left)}, {"right", term_to_json(n.right)}};
        }
        case K::Res: {
            const auto& n = t.as<node::Res>();
            return {{"kind", "res"}, {"binder", n.binder}, {"body", term_to_json(n.body)}};
        }
        case K::Abs: {
            const auto& n = t.as<node::Abs>();
            return {{"kind", "abs"},
                    {"params", n.params},
                    {"param_kind", kind_name(n.kind)},
                    {"body", term_to_json(n.body)}};
        }
        case K::App: {
            const auto& n = t.as<node::App>();
            json args = json::array();
            for (const auto& a : n.args) {
                if (const auto* tm = std::get_if<Term>(&a))
                    args.push_back({{"term", term_to_json(*tm)}});
                else
                    args.push_back({{"name", name_json(std::get<Name>(a))}});
            }
            return {{"kind", "app"}, {"op", term_to_json(n.op)}, {"args", args}};
        }
    }
    return {};
}

Term term_from_json(const json& j) {
    try {
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "nil") return nil();
        if (kind == "var") return var(j.at("id").get<std::string>());
        if (kind == "input")
            return input(name_from(j.at("subject")), j.at("binder").get<std::string>(),
                         term_from_json(j.at("body")), kind_from(j, "binder_kind"));
        if (kind == "output")
            return output(name_from(j.at("subject")), term_from_json(j.at("payload")),
                          term_from_json(j.at("cont")));
        if (kind == "par") return par(term_from_json(j.at("left")), term_from_json(j.at("right")));
        if (kind == "res") return res(j.at("binder").get<std::string>(), term_from_json(j.at("body")));
        if (kind == "abs")
            return abs(j.at("params").get<std::vector<std::string>>(), term_from_json(j.at("body")),
                       kind_from(j, "param_kind"));
        if (kind == "app") {
            std::vector<Arg> args;
            for (const auto& a : j.at("args")) {
                if (a.contains("term"))
                    args.emplace_back(term_from_json(a.at("term")));
                else
                    args.emplace_back(name_from(a.at("name")));
            }
            return app(term_from_json(j.at("op")), std::move(args));
        }
        throw HopiError("term json: unknown kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw HopiError(std::string("term json: ") + e.what());
    }
}

}  // namespace hopi
