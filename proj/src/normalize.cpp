#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "hopi/errors.hpp"
#include "hopi/printer.hpp"
#include "hopi/semantics.hpp"

namespace hopi {

namespace {

using K = Term::Kind;

// Beta steps allowed per reduction scope. A scope whose reduction does not
// finish within its budget is left as written.
constexpr int kActiveFuel = 2000;
constexpr int kGuardedFuel = 200;
constexpr std::size_t kMaxPermutedBinders = 6;

// Binder names by nesting level: independent of how siblings are ordered.
struct Levels {
    std::map<std::string, std::string> constants, name_vars, process_vars;
    int depth = 0;

    std::string bind(std::map<std::string, std::string> Levels::*m, const std::string& old,
                     const char* tag) {
        std::string fresh = std::string("%") + tag + std::to_string(depth++);
        (this->*m)[old] = fresh;
        return fresh;
    }
    Name rename(const Name& n) const {
        const auto& m = n.is_variable() ? name_vars : constants;
        auto it = m.find(n.id);
        return it == m.end() ? n : Name{n.kind, it->second};
    }
};

void collect_par(const Term& t, std::vector<Term>& out) {
    if (t.is(K::Par)) {
        collect_par(t.as<node::Par>().left, out);
        collect_par(t.as<node::Par>().right, out);
    } else {
        out.push_back(t);
    }
}

Term level_sorted(const Term& t, const Levels& env) {
    auto var_map = [](ParamKind k) {
        return k == ParamKind::Process ? &Levels::process_vars : &Levels::name_vars;
    };
    switch (t.kind()) {
        case K::Nil:
            return t;
        case K::Var: {
            auto it = env.process_vars.find(t.as<node::Var>().id);
            return it == env.process_vars.end() ? t : var(it->second);
        }
        case K::Input: {
            const auto& n = t.as<node::Input>();
            Levels inner = env;
            std::string b = inner.bind(var_map(n.binder_kind), n.binder, "v");
            return input(env.rename(n.subject), b, level_sorted(n.body, inner), n.binder_kind);
        }
        case K::Output: {
            const auto& n = t.as<node::Output>();
            return output(env.rename(n.subject), level_sorted(n.payload, env), level_sorted(n.cont, env));
        }
        case K::Par: {
            std::vector<Term> parts;
            collect_par(t, parts);
            std::vector<std::pair<std::string, Term>> keyed;
            for (const auto& p : parts) {
                Term q = level_sorted(p, env);
                keyed.emplace_back(print_term(q, PrintOptions{.resugar = false}), q);
            }
            std::stable_sort(keyed.begin(), keyed.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            std::vector<Term> sorted;
            for (auto& [_, q] : keyed) sorted.push_back(std::move(q));
            return par_all(sorted);
        }
        case K::Res: {
            const auto& n = t.as<node::Res>();
            Levels inner = env;
            std::string b = inner.bind(&Levels::constants, n.binder, "r");
            return res(b, level_sorted(n.body, inner));
        }
        case K::Abs: {
            const auto& n = t.as<node::Abs>();
            Levels inner = env;
            std::vector<std::string> params;
            for (const auto& p : n.params) params.push_back(inner.bind(var_map(n.kind), p, "v"));
            return abs(std::move(params), level_sorted(n.body, inner), n.kind);
        }
        case K::App: {
            const auto& n = t.as<node::App>();
            std::vector<Arg> args;
            for (const auto& a : n.args) {
                if (const auto* tm = std::get_if<Term>(&a))
                    args.emplace_back(level_sorted(*tm, env));
                else
                    args.emplace_back(env.rename(std::get<Name>(a)));
            }
            return app(level_sorted(n.op, env), std::move(args));
        }
    }
    return t;
}

// Parallel components everywhere in a canonical order, binders canonical.
Term order_components(const Term& t) { return alpha_canonical(level_sorted(t, Levels{})); }

std::string canon_key(const Term& t) {
    return print_term(order_components(t), PrintOptions{.resugar = false});
}

// Union-find over atom indices.
struct Groups {
    explicit Groups(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void join(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
    std::vector<std::size_t> parent;
};

struct OutOfFuel {};

enum class Scope : std::uint8_t { None, Active, Guarded };

class Normalizer {
public:
    explicit Normalizer(const Term& root) : used_(all_ids(root)) {}

    bool complete() const { return complete_; }

    // Reduces t in a scope of its own unless already inside one. Guarded
    // positions (under a prefix or an abstraction) always open a fresh scope
    // when reached from an active one, so a recursive continuation cannot
    // starve the active part.
    Term scoped(const Term& t, Scope kind) {
        if (scope_ == Scope::Guarded || (scope_ == Scope::Active && kind == Scope::Active))
            return norm(t);
        Scope saved_scope = scope_;
        int saved_fuel = fuel_;
        scope_ = kind;
        fuel_ = kind == Scope::Active ? kActiveFuel : kGuardedFuel;
        Term r;
        try {
            r = norm(t);
        } catch (const OutOfFuel&) {
            r = t;
            complete_ = false;
        }
        scope_ = saved_scope;
        fuel_ = saved_fuel;
        return r;
    }

    Term norm(const Term& t) {
        switch (t.kind()) {
            case K::Nil:
            case K::Var:
                return t;
            case K::Input: {
                const auto& n = t.as<node::Input>();
                return input(n.subject, n.binder, scoped(n.body, Scope::Guarded), n.binder_kind);
            }
            case K::Output: {
                const auto& n = t.as<node::Output>();
                return output(n.subject, scoped(n.payload, Scope::Guarded),
                              scoped(n.cont, Scope::Guarded));
            }
            case K::Abs: {
                const auto& n = t.as<node::Abs>();
                return abs(n.params, scoped(n.body, Scope::Guarded), n.kind);
            }
            case K::App:
                if (scope_ == Scope::None) return scoped(t, Scope::Active);
                return norm_app(t.as<node::App>());
            case K::Par:
            case K::Res: {
                std::vector<std::string> bound;
                std::vector<Term> atoms;
                flatten(t, false, bound, atoms);
                return rebuild(bound, atoms);
            }
        }
        return t;
    }

private:
    Term norm_app(const node::App& n) {
        Term op = norm(n.op);
        std::vector<Arg> args;
        args.reserve(n.args.size());
        for (const auto& a : n.args) {
            if (const auto* tm = std::get_if<Term>(&a))
                args.emplace_back(scoped(*tm, Scope::Guarded));
            else
                args.push_back(a);
        }
        if (!op.is(K::Abs)) return app(op, std::move(args));
        const auto& f = op.as<node::Abs>();
        if (f.params.size() != args.size()) return app(op, std::move(args));
        if (--fuel_ < 0) throw OutOfFuel{};
        NameMap names;
        TermMap terms;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (f.kind == ParamKind::Name) {
                const auto* nm = std::get_if<Name>(&args[i]);
                if (!nm) return app(op, std::move(args));
                names[Name::variable(f.params[i])] = *nm;
            } else {
                const auto* tm = std::get_if<Term>(&args[i]);
                if (!tm) return app(op, std::move(args));
                terms[f.params[i]] = *tm;
            }
        }
        Term body = names.empty() ? subst_terms(f.body, terms) : subst_names(f.body, names);
        for (const auto& [_, image] : terms) collect_ids(image, used_);
        collect_ids(body, used_);
        return norm(body);
    }

    std::string fresh_bound() {
        std::string id = fresh_id("r", used_);
        used_.insert(id);
        return id;
    }

    // Splits t into restricted names (renamed apart) and non-Par/Res/Nil atoms.
    void flatten(const Term& t, bool normal, std::vector<std::string>& bound,
                 std::vector<Term>& atoms) {
        switch (t.kind()) {
            case K::Nil:
                return;
            case K::Par: {
                const auto& n = t.as<node::Par>();
                flatten(n.left, normal, bound, atoms);
                flatten(n.right, normal, bound, atoms);
                return;
            }
            case K::Res: {
                const auto& n = t.as<node::Res>();
                std::string c = fresh_bound();
                bound.push_back(c);
                Term body =
                    subst_names(n.body, {{Name::constant(n.binder), Name::constant(c)}});
                flatten(body, normal, bound, atoms);
                return;
            }
            default:
                break;
        }
        if (normal) {
            atoms.push_back(t);
            return;
        }
        Term x = scoped(t, Scope::Active);
        if (x.is(K::Par) || x.is(K::Res) || x.is(K::Nil))
            flatten(x, true, bound, atoms);
        else
            atoms.push_back(x);
    }

    // Every atom is a prefix on one of the block's own names and no sender
    // meets a receiver: nothing in the block can ever fire.
    static bool dead_block(const std::vector<Term>& atoms, const std::set<std::string>& names) {
        std::set<std::string> senders, receivers;
        for (const auto& atom : atoms) {
            const Name* subject = nullptr;
            if (atom.is(K::Input)) subject = &atom.as<node::Input>().subject;
            if (atom.is(K::Output)) subject = &atom.as<node::Output>().subject;
            if (!subject || subject->is_variable() || !names.count(subject->id)) return false;
            (atom.is(K::Output) ? senders : receivers).insert(subject->id);
        }
        for (const auto& c : senders)
            if (receivers.count(c)) return false;
        return true;
    }

    Term rebuild(const std::vector<std::string>& bound, const std::vector<Term>& atoms) {
        std::set<std::string> bset(bound.begin(), bound.end());
        std::vector<std::set<std::string>> uses(atoms.size());
        std::map<std::string, std::size_t> first_user;
        Groups groups(atoms.size());
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            for (const auto& n : free_names(atoms[i])) {
                if (!bset.count(n)) continue;
                uses[i].insert(n);
                auto [it, inserted] = first_user.emplace(n, i);
                if (!inserted) groups.join(i, it->second);
            }
        }
        std::map<std::size_t, std::vector<std::size_t>> members;
        for (std::size_t i = 0; i < atoms.size(); ++i) members[groups.find(i)].push_back(i);

        std::vector<std::pair<std::string, Term>> components;
        for (const auto& [_, idx] : members) {
            std::set<std::string> names;
            for (auto i : idx) names.insert(uses[i].begin(), uses[i].end());
            if (names.empty()) {
                for (auto i : idx) components.emplace_back(canon_key(atoms[i]), atoms[i]);
                continue;
            }
            std::vector<Term> block_atoms;
            for (auto i : idx) block_atoms.push_back(atoms[i]);
            if (dead_block(block_atoms, names)) continue;
            Term block = canonical_block({names.begin(), names.end()}, block_atoms);
            components.emplace_back(canon_key(block), block);
        }
        std::stable_sort(components.begin(), components.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<Term> parts;
        for (auto& [_, c] : components) parts.push_back(std::move(c));
        return par_all(parts);
    }

    // Orders binders and atoms so that alpha-equivalent blocks come out
    // identical: exhaustive over binder orders when small, otherwise by first
    // occurrence in the placeholder-sorted atoms.
    static Term canonical_block(std::vector<std::string> names, const std::vector<Term>& atoms) {
        auto keyed = [&](const std::vector<std::string>& order) {
            NameMap placeholders;
            for (std::size_t i = 0; i < order.size(); ++i)
                placeholders[Name::constant(order[i])] = Name::constant("%" + std::to_string(i));
            std::vector<std::pair<std::string, std::size_t>> keys;
            for (std::size_t i = 0; i < atoms.size(); ++i)
                keys.emplace_back(canon_key(subst_names(atoms[i], placeholders)), i);
            std::sort(keys.begin(), keys.end());
            return keys;
        };
        auto joined = [](const std::vector<std::pair<std::string, std::size_t>>& keys) {
            std::string s;
            for (const auto& [k, _] : keys) s += k + "\n";
            return s;
        };

        std::vector<std::string> best_order;
        std::vector<std::pair<std::string, std::size_t>> best_keys;
        if (names.size() <= kMaxPermutedBinders) {
            std::sort(names.begin(), names.end());
            std::string best;
            bool first = true;
            do {
                auto keys = keyed(names);
                std::string s = joined(keys);
                if (first || s < best) {
                    best = std::move(s);
                    best_order = names;
                    best_keys = std::move(keys);
                    first = false;
                }
            } while (std::next_permutation(names.begin(), names.end()));
        } else {
            NameMap blank;
            for (const auto& n : names) blank[Name::constant(n)] = Name::constant("%");
            std::vector<std::pair<std::string, std::size_t>> keys;
            for (std::size_t i = 0; i < atoms.size(); ++i)
                keys.emplace_back(canon_key(subst_names(atoms[i], blank)), i);
            std::sort(keys.begin(), keys.end());
            std::set<std::string> pending(names.begin(), names.end());
            for (const auto& [_, i] : keys)
                for (const auto& n : free_names_ordered(atoms[i]))
                    if (pending.erase(n)) best_order.push_back(n);
            best_keys = keyed(best_order);
        }
        NameMap placeholders;
        std::vector<std::string> binders;
        for (std::size_t i = 0; i < best_order.size(); ++i) {
            binders.push_back("%" + std::to_string(i));
            placeholders[Name::constant(best_order[i])] = Name::constant(binders.back());
        }
        std::vector<Term> ordered;
        for (const auto& [_, i] : best_keys) ordered.push_back(subst_names(atoms[i], placeholders));
        return res_all(binders, par_all(ordered));
    }

    std::set<std::string> used_;
    Scope scope_ = Scope::None;
    int fuel_ = 0;
    bool complete_ = true;
};

void ordered_names(const Term& t, std::set<std::string>& bound, std::set<std::string>& seen,
                   std::vector<std::string>& out) {
    auto note = [&](const Name& n) {
        if (n.is_variable() || bound.count(n.id)) return;
        if (seen.insert(n.id).second) out.push_back(n.id);
    };
    switch (t.kind()) {
        case K::Nil:
        case K::Var:
            return;
        case K::Input: {
            const auto& n = t.as<node::Input>();
            note(n.subject);
            ordered_names(n.body, bound, seen, out);
            return;
        }
        case K::Output: {
            const auto& n = t.as<node::Output>();
            note(n.subject);
            ordered_names(n.payload, bound, seen, out);
            ordered_names(n.cont, bound, seen, out);
            return;
        }
        case K::Par: {
            const auto& n = t.as<node::Par>();
            ordered_names(n.left, bound, seen, out);
            ordered_names(n.right, bound, seen, out);
            return;
        }
        case K::Res: {
            const auto& n = t.as<node::Res>();
            bool fresh = bound.insert(n.binder).second;
            ordered_names(n.body, bound, seen, out);
            if (fresh) bound.erase(n.binder);
            return;
        }
        case K::Abs:
            ordered_names(t.as<node::Abs>().body, bound, seen, out);
            return;
        case K::App: {
            const auto& n = t.as<node::App>();
            ordered_names(n.op, bound, seen, out);
            for (const auto& a : n.args) {
                if (const auto* tm = std::get_if<Term>(&a))
                    ordered_names(*tm, bound, seen, out);
                else
                    note(std::get<Name>(a));
            }
            return;
        }
    }
}

}  // namespace

std::vector<std::string> free_names_ordered(const Term& t) {
    std::set<std::string> bound, seen;
    std::vector<std::string> out;
    ordered_names(t, bound, seen, out);
    return out;
}

NormalizeReport normalize_report(const Term& t) {
    Normalizer n(t);
    Term r = n.norm(t);
    return {order_components(r), n.complete()};
}

Term normalize(const Term& t) { return normalize_report(t).term; }

std::string term_key(const Term& normalized) {
    return print_term(normalized, PrintOptions{.resugar = false});
}

}  // namespace hopi
