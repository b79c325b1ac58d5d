#include "hopi/term.hpp"

#include <cctype>
#include <functional>
#include <optional>
#include <stdexcept>

namespace hopi {

namespace {

Term make(auto&& alt) {
    return Term(std::make_shared<const Term::Node>(Term::Node{std::forward<decltype(alt)>(alt)}));
}

const Term& nil_singleton() {
    static const Term t = make(node::Nil{});
    return t;
}

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

}  // namespace

Term::Term() : node_(nil_singleton().node_) {}

Term::Kind Term::kind() const { return static_cast<Kind>(node_->v.index()); }

Term nil() { return nil_singleton(); }
Term var(std::string id) { return make(node::Var{std::move(id)}); }
Term input(Name subject, std::string binder, Term body, ParamKind binder_kind) {
    return make(node::Input{std::move(subject), std::move(binder), binder_kind, std::move(body)});
}
Term output(Name subject, Term payload, Term cont) {
    return make(node::Output{std::move(subject), std::move(payload), std::move(cont)});
}
Term par(Term left, Term right) { return make(node::Par{std::move(left), std::move(right)}); }
Term par_all(const std::vector<Term>& components) {
    if (components.empty()) return nil();
    Term acc = components.front();
    for (std::size_t i = 1; i < components.size(); ++i) acc = par(acc, components[i]);
    return acc;
}
Term res(std::string binder, Term body) { return make(node::Res{std::move(binder), std::move(body)}); }
Term res_all(const std::vector<std::string>& binders, Term body) {
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) body = res(*it, std::move(body));
    return body;
}
Term abs(std::vector<std::string> params, Term body, ParamKind kind) {
    return make(node::Abs{std::move(params), kind, std::move(body)});
}
Term app(Term op, std::vector<Arg> args) { return make(node::App{std::move(op), std::move(args)}); }

bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    using K = Term::Kind;
    switch (a.kind()) {
        case K::Nil:
            return true;
        case K::Var:
            return a.as<node::Var>().id == b.as<node::Var>().id;
        case K::Input: {
            const auto& x = a.as<node::Input>();
            const auto& y = b.as<node::Input>();
            return x.subject == y.subject && x.binder == y.binder &&
                   x.binder_kind == y.binder_kind && x.body == y.body;
        }
        case K::Output: {
            const auto& x = a.as<node::Output>();
            const auto& y = b.as<node::Output>();
            return x.subject == y.subject && x.payload == y.payload && x.cont == y.cont;
        }
        case K::Par: {
            const auto& x = a.as<node::Par>();
            const auto& y = b.as<node::Par>();
            return x.left == y.left && x.right == y.right;
        }
        case K::Res: {
            const auto& x = a.as<node::Res>();
            const auto& y = b.as<node::Res>();
            return x.binder == y.binder && x.body == y.body;
        }
        case K::Abs: {
            const auto& x = a.as<node::Abs>();
            const auto& y = b.as<node::Abs>();
            return x.kind == y.kind && x.params == y.params && x.body == y.body;
        }
        case K::App: {
            const auto& x = a.as<node::App>();
            const auto& y = b.as<node::App>();
            return x.op == y.op && x.args == y.args;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Free names / variables

namespace {

void free_names_rec(const Term& t, std::set<std::string>& bound, std::set<std::string>& out) {
    auto note = [&](const Name& n) {
        if (n.kind == NameKind::Constant && !bound.contains(n.id)) out.insert(n.id);
    };
    std::visit(overloaded{
                   [](const node::Nil&) {},
                   [](const node::Var&) {},
                   [&](const node::Input& n) {
                       note(n.subject);
                       free_names_rec(n.body, bound, out);
                   },
                   [&](const node::Output& n) {
                       note(n.subject);
                       free_names_rec(n.payload, bound, out);
                       free_names_rec(n.cont, bound, out);
                   },
                   [&](const node::Par& n) {
                       free_names_rec(n.left, bound, out);
                       free_names_rec(n.right, bound, out);
                   },
                   [&](const node::Res& n) {
                       bool fresh = bound.insert(n.binder).second;
                       free_names_rec(n.body, bound, out);
                       if (fresh) bound.erase(n.binder);
                   },
                   [&](const node::Abs& n) { free_names_rec(n.body, bound, out); },
                   [&](const node::App& n) {
                       free_names_rec(n.op, bound, out);
                       for (const auto& a : n.args) {
                           if (const auto* tm = std::get_if<Term>(&a))
                               free_names_rec(*tm, bound, out);
                           else
                               note(std::get<Name>(a));
                       }
                   },
               },
               t.node().v);
}

struct VarScope {
    std::multiset<std::string> process;
    std::multiset<std::string> names;
};

void free_vars_rec(const Term& t, VarScope& scope, FreeVars& out) {
    auto note = [&](const Name& n) {
        if (n.kind == NameKind::Variable && !scope.names.contains(n.id)) out.names.insert(n.id);
    };
    auto bind = [&](ParamKind k, const std::string& id) {
        (k == ParamKind::Process ? scope.process : scope.names).insert(id);
    };
    auto unbind = [&](ParamKind k, const std::string& id) {
        auto& s = (k == ParamKind::Process ? scope.process : scope.names);
        s.erase(s.find(id));
    };
    std::visit(overloaded{
                   [](const node::Nil&) {},
                   [&](const node::Var& n) {
                       if (!scope.process.contains(n.id)) out.process.insert(n.id);
                   },
                   [&](const node::Input& n) {
                       note(n.subject);
                       bind(n.binder_kind, n.binder);
                       free_vars_rec(n.body, scope, out);
                       unbind(n.binder_kind, n.binder);
                   },
                   [&](const node::Output& n) {
                       note(n.subject);
                       free_vars_rec(n.payload, scope, out);
                       free_vars_rec(n.cont, scope, out);
                   },
                   [&](const node::Par& n) {
                       free_vars_rec(n.left, scope, out);
                       free_vars_rec(n.right, scope, out);
                   },
                   [&](const node::Res& n) { free_vars_rec(n.body, scope, out); },
                   [&](const node::Abs& n) {
                       for (const auto& p : n.params) bind(n.kind, p);
                       free_vars_rec(n.body, scope, out);
                       for (const auto& p : n.params) unbind(n.kind, p);
                   },
                   [&](const node::App& n) {
                       free_vars_rec(n.op, scope, out);
                       for (const auto& a : n.args) {
                           if (const auto* tm = std::get_if<Term>(&a))
                               free_vars_rec(*tm, scope, out);
                           else
                               note(std::get<Name>(a));
                       }
                   },
               },
               t.node().v);
}

}  // namespace

std::set<std::string> free_names(const Term& t) {
    std::set<std::string> bound, out;
    free_names_rec(t, bound, out);
    return out;
}

FreeVars free_vars(const Term& t) {
    VarScope scope;
    FreeVars out;
    free_vars_rec(t, scope, out);
    return out;
}

bool occurs_free_name(const Term& t, const std::string& id) { return free_names(t).contains(id); }

void collect_ids(const Term& t, std::set<std::string>& out) {
    std::visit(overloaded{
                   [](const node::Nil&) {},
                   [&](const node::Var& n) { out.insert(n.id); },
                   [&](const node::Input& n) {
                       out.insert(n.subject.id);
                       out.insert(n.binder);
                       collect_ids(n.body, out);
                   },
                   [&](const node::Output& n) {
                       out.insert(n.subject.id);
                       collect_ids(n.payload, out);
                       collect_ids(n.cont, out);
                   },
                   [&](const node::Par& n) {
                       collect_ids(n.left, out);
                       collect_ids(n.right, out);
                   },
                   [&](const node::Res& n) {
                       out.insert(n.binder);
                       collect_ids(n.body, out);
                   },
                   [&](const node::Abs& n) {
                       out.insert(n.params.begin(), n.params.end());
                       collect_ids(n.body, out);
                   },
                   [&](const node::App& n) {
                       collect_ids(n.op, out);
                       for (const auto& a : n.args) {
                           if (const auto* tm = std::get_if<Term>(&a))
                               collect_ids(*tm, out);
                           else
                               out.insert(std::get<Name>(a).id);
                       }
                   },
               },
               t.node().v);
}

std::set<std::string> all_ids(const Term& t) {
    std::set<std::string> out;
    collect_ids(t, out);
    return out;
}

std::string fresh_id(const std::string& base, const std::set<std::string>& avoid) {
    for (std::size_t k = 0;; ++k) {
        std::string candidate = "#" + base + std::to_string(k);
        if (!avoid.contains(candidate)) return candidate;
    }
}

std::size_t node_count(const Term& t) {
    return std::visit(overloaded{
                          [](const node::Nil&) -> std::size_t { return 1; },
                          [](const node::Var&) -> std::size_t { return 1; },
                          [](const node::Input& n) { return 1 + node_count(n.body); },
                          [](const node::Output& n) {
                              return 1 + node_count(n.payload) + node_count(n.cont);
                          },
                          [](const node::Par& n) { return 1 + node_count(n.left) + node_count(n.right); },
                          [](const node::Res& n) { return 1 + node_count(n.body); },
                          [](const node::Abs& n) { return 1 + node_count(n.body); },
                          [](const node::App& n) {
                              std::size_t c = 1 + node_count(n.op);
                              for (const auto& a : n.args)
                                  if (const auto* tm = std::get_if<Term>(&a)) c += node_count(*tm);
                              return c;
                          },
                      },
                      t.node().v);
}

std::vector<Term> par_components(const Term& t) {
    std::vector<Term> out;
    std::function<void(const Term&)> walk = [&](const Term& u) {
        if (u.is(Term::Kind::Par)) {
            walk(u.as<node::Par>().left);
            walk(u.as<node::Par>().right);
        } else if (!u.is(Term::Kind::Nil)) {
            out.push_back(u);
        }
    };
    walk(t);
    return out;
}

// ---------------------------------------------------------------------------
// Substitution
//
// Names and process variables are substituted simultaneously. When a binder
// would capture a free identifier of some image, the binder is renamed by
// adding an entry to the (simultaneous) map for the body.

namespace {

struct Image {
    Term term;
    std::set<std::string> fn;
    FreeVars fv;
};

class Substitution {
public:
    Substitution(std::set<std::string> avoid) : avoid_(std::move(avoid)) {}

    struct Maps {
        NameMap names;
        std::map<std::string, std::shared_ptr<const Image>> terms;
        bool empty() const { return names.empty() && terms.empty(); }
    };

    static std::shared_ptr<const Image> image(const Term& t) {
        return std::make_shared<const Image>(Image{t, free_names(t), free_vars(t)});
    }

    Term run(const Term& t, const Maps& m) {
        if (m.empty()) return t;
        return std::visit(
            overloaded{
                [&](const node::Nil&) { return t; },
                [&](const node::Var& n) {
                    auto it = m.terms.find(n.id);
                    return it == m.terms.end() ? t : it->second->term;
                },
                [&](const node::Input& n) {
                    Name subj = look(m, n.subject);
                    Maps inner = m;
                    std::string b = enter(inner, n.binder_kind, n.binder);
                    return input(subj, b, run(n.body, inner), n.binder_kind);
                },
                [&](const node::Output& n) {
                    return output(look(m, n.subject), run(n.payload, m), run(n.cont, m));
                },
                [&](const node::Par& n) { return par(run(n.left, m), run(n.right, m)); },
                [&](const node::Res& n) {
                    Maps inner = m;
                    std::string b = enter_restriction(inner, n.binder);
                    return res(b, run(n.body, inner));
                },
                [&](const node::Abs& n) {
                    Maps inner = m;
                    std::vector<std::string> params;
                    for (const auto& p : n.params) params.push_back(enter(inner, n.kind, p));
                    return abs(std::move(params), run(n.body, inner), n.kind);
                },
                [&](const node::App& n) {
                    std::vector<Arg> args;
                    args.reserve(n.args.size());
                    for (const auto& a : n.args) {
                        if (const auto* tm = std::get_if<Term>(&a))
                            args.emplace_back(run(*tm, m));
                        else
                            args.emplace_back(look(m, std::get<Name>(a)));
                    }
                    return app(run(n.op, m), std::move(args));
                },
            },
            t.node().v);
    }

private:
    static Name look(const Maps& m, const Name& n) {
        auto it = m.names.find(n);
        return it == m.names.end() ? n : it->second;
    }

    std::string fresh(const std::string& base) {
        std::string base_id = base;
        if (!base_id.empty() && base_id.front() == '#') base_id.erase(0, 1);
        while (!base_id.empty() && std::isdigit(static_cast<unsigned char>(base_id.back())))
            base_id.pop_back();
        std::string f = fresh_id(base_id, avoid_);
        avoid_.insert(f);
        return f;
    }

    std::string enter_restriction(Maps& m, const std::string& c) {
        Name bound = Name::constant(c);
        m.names.erase(bound);
        bool clash = false;
        for (const auto& [k, v] : m.names)
            if (v == bound) clash = true;
        for (const auto& [k, img] : m.terms)
            if (img->fn.contains(c)) clash = true;
        if (!clash) return c;
        std::string f = fresh(c);
        m.names[bound] = Name::constant(f);
        return f;
    }

    std::string enter(Maps& m, ParamKind kind, const std::string& b) {
        if (kind == ParamKind::Process) {
            m.terms.erase(b);
            bool clash = false;
            for (const auto& [k, img] : m.terms)
                if (img->fv.process.contains(b)) clash = true;
            if (!clash) return b;
            std::string f = fresh(b);
            m.terms[b] = image(var(f));
            return f;
        }
        Name bound = Name::variable(b);
        m.names.erase(bound);
        bool clash = false;
        for (const auto& [k, v] : m.names)
            if (v == bound) clash = true;
        for (const auto& [k, img] : m.terms)
            if (img->fv.names.contains(b)) clash = true;
        if (!clash) return b;
        std::string f = fresh(b);
        m.names[bound] = Name::variable(f);
        return f;
    }

    std::set<std::string> avoid_;
};

}  // namespace

Term subst_names(const Term& t, const NameMap& map) {
    if (map.empty()) return t;
    std::set<std::string> avoid = all_ids(t);
    for (const auto& [k, v] : map) {
        avoid.insert(k.id);
        avoid.insert(v.id);
    }
    Substitution s(std::move(avoid));
    Substitution::Maps m;
    m.names = map;
    return s.run(t, m);
}

Term subst_terms(const Term& t, const TermMap& map) {
    if (map.empty()) return t;
    std::set<std::string> avoid = all_ids(t);
    Substitution::Maps m;
    for (const auto& [k, v] : map) {
        avoid.insert(k);
        collect_ids(v, avoid);
        m.terms[k] = Substitution::image(v);
    }
    Substitution s(std::move(avoid));
    return s.run(t, m);
}

// ---------------------------------------------------------------------------
// Binder renaming

namespace {

enum class BinderKind { Restriction, NameVar, ProcessVar };

using Chooser = std::function<std::string(BinderKind, const std::string&)>;

struct Env {
    std::map<std::string, std::string> constants;
    std::map<std::string, std::string> name_vars;
    std::map<std::string, std::string> process_vars;
};

Name rename_name(const Env& env, const Name& n) {
    const auto& m = n.kind == NameKind::Constant ? env.constants : env.name_vars;
    auto it = m.find(n.id);
    return it == m.end() ? n : Name{n.kind, it->second};
}

std::string bind(Env& env, const Chooser& choose, BinderKind kind, const std::string& old) {
    std::string fresh = choose(kind, old);
    switch (kind) {
        case BinderKind::Restriction:
            env.constants[old] = fresh;
            break;
        case BinderKind::NameVar:
            env.name_vars[old] = fresh;
            break;
        case BinderKind::ProcessVar:
            env.process_vars[old] = fresh;
            break;
    }
    return fresh;
}

BinderKind binder_kind_of(ParamKind k) {
    return k == ParamKind::Process ? BinderKind::ProcessVar : BinderKind::NameVar;
}

// Rewrites every binder through `choose`. The chooser must return identifiers
// that are unique and distinct from every free identifier.
Term rename_binders(const Term& t, const Env& env, const Chooser& choose) {
    return std::visit(
        overloaded{
            [&](const node::Nil&) { return t; },
            [&](const node::Var& n) {
                auto it = env.process_vars.find(n.id);
                return it == env.process_vars.end() ? t : var(it->second);
            },
            [&](const node::Input& n) {
                Env inner = env;
                std::string b = bind(inner, choose, binder_kind_of(n.binder_kind), n.binder);
                return input(rename_name(env, n.subject), b, rename_binders(n.body, inner, choose),
                             n.binder_kind);
            },
            [&](const node::Output& n) {
                Term payload = rename_binders(n.payload, env, choose);
                Term cont = rename_binders(n.cont, env, choose);
                return output(rename_name(env, n.subject), payload, cont);
            },
            [&](const node::Par& n) {
                Term l = rename_binders(n.left, env, choose);
                Term r = rename_binders(n.right, env, choose);
                return par(l, r);
            },
            [&](const node::Res& n) {
                Env inner = env;
                std::string b = bind(inner, choose, BinderKind::Restriction, n.binder);
                return res(b, rename_binders(n.body, inner, choose));
            },
            [&](const node::Abs& n) {
                Env inner = env;
                std::vector<std::string> params;
                for (const auto& p : n.params)
                    params.push_back(bind(inner, choose, binder_kind_of(n.kind), p));
                return abs(std::move(params), rename_binders(n.body, inner, choose), n.kind);
            },
            [&](const node::App& n) {
                Term op = rename_binders(n.op, env, choose);
                std::vector<Arg> args;
                for (const auto& a : n.args) {
                    if (const auto* tm = std::get_if<Term>(&a))
                        args.emplace_back(rename_binders(*tm, env, choose));
                    else
                        args.emplace_back(rename_name(env, std::get<Name>(a)));
                }
                return app(op, std::move(args));
            },
        },
        t.node().v);
}

std::set<std::string> free_ids(const Term& t) {
    std::set<std::string> out = free_names(t);
    FreeVars fv = free_vars(t);
    out.insert(fv.process.begin(), fv.process.end());
    out.insert(fv.names.begin(), fv.names.end());
    return out;
}

// X, Y, Z, W, X1, Y1, ... skipping anything in `avoid`.
class NameSequence {
public:
    NameSequence(std::vector<std::string> letters, const std::set<std::string>& avoid)
        : letters_(std::move(letters)), avoid_(avoid) {}

    std::string next() {
        for (;;) {
            std::string candidate = letters_[pos_ % letters_.size()];
            std::size_t round = pos_ / letters_.size();
            if (round > 0) candidate += std::to_string(round);
            ++pos_;
            if (!avoid_.contains(candidate)) return candidate;
        }
    }

private:
    std::vector<std::string> letters_;
    const std::set<std::string>& avoid_;
    std::size_t pos_ = 0;
};

}  // namespace

Term alpha_canonical(const Term& t) {
    const std::set<std::string> avoid = free_ids(t);
    NameSequence restrictions({"c", "d", "e", "f"}, avoid);
    NameSequence name_vars({"x", "y", "z", "w"}, avoid);
    NameSequence process_vars({"X", "Y", "Z", "W"}, avoid);
    Chooser choose = [&](BinderKind kind, const std::string&) {
        switch (kind) {
            case BinderKind::Restriction:
                return restrictions.next();
            case BinderKind::NameVar:
                return name_vars.next();
            case BinderKind::ProcessVar:
                return process_vars.next();
        }
        return std::string();
    };
    return rename_binders(t, Env{}, choose);
}

bool alpha_equal(const Term& a, const Term& b) { return alpha_canonical(a) == alpha_canonical(b); }

Term freshen_binders(const Term& t, const std::set<std::string>& avoid) {
    std::set<std::string> used = all_ids(t);
    used.insert(avoid.begin(), avoid.end());
    Chooser choose = [&](BinderKind, const std::string& old) {
        if (!avoid.contains(old)) return old;
        std::string base = old;
        if (!base.empty() && base.front() == '#') base.erase(0, 1);
        std::string f = fresh_id(base, used);
        used.insert(f);
        return f;
    };
    return rename_binders(t, Env{}, choose);
}

// ---------------------------------------------------------------------------
// Hashing

namespace {
inline void mix(std::size_t& seed, std::size_t v) {
    seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}
std::size_t name_hash(const Name& n) {
    std::size_t h = std::hash<std::string>{}(n.id);
    mix(h, static_cast<std::size_t>(n.kind));
    return h;
}
}  // namespace

std::size_t hash_value(const Term& t) {
    std::size_t h = static_cast<std::size_t>(t.kind()) * 1315423911u;
    std::visit(overloaded{
                   [](const node::Nil&) {},
                   [&](const node::Var& n) { mix(h, std::hash<std::string>{}(n.id)); },
                   [&](const node::Input& n) {
                       mix(h, name_hash(n.subject));
                       mix(h, std::hash<std::string>{}(n.binder));
                       mix(h, hash_value(n.body));
                   },
                   [&](const node::Output& n) {
                       mix(h, name_hash(n.subject));
                       mix(h, hash_value(n.payload));
                       mix(h, hash_value(n.cont));
                   },
                   [&](const node::Par& n) {
                       mix(h, hash_value(n.left));
                       mix(h, hash_value(n.right));
                   },
                   [&](const node::Res& n) {
                       mix(h, std::hash<std::string>{}(n.binder));
                       mix(h, hash_value(n.body));
                   },
                   [&](const node::Abs& n) {
                       for (const auto& p : n.params) mix(h, std::hash<std::string>{}(p));
                       mix(h, static_cast<std::size_t>(n.kind));
                       mix(h, hash_value(n.body));
                   },
                   [&](const node::App& n) {
                       mix(h, hash_value(n.op));
                       for (const auto& a : n.args) {
                           if (const auto* tm = std::get_if<Term>(&a))
                               mix(h, hash_value(*tm));
                           else
                               mix(h, name_hash(std::get<Name>(a)));
                       }
                   },
               },
               t.node().v);
    return h;
}

}  // namespace hopi
