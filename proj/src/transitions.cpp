#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "hopi/errors.hpp"
#include "hopi/printer.hpp"
#include "hopi/semantics.hpp"
#include "hopi/sugar.hpp"

namespace hopi {

namespace {

using K = Term::Kind;

std::string plain(const Term& t) { return print_term(t, PrintOptions{.resugar = false}); }

// A normalized process opened into its restricted names and parallel atoms.
struct Soup {
    std::vector<std::string> bound;
    std::vector<Term> atoms;
};

Soup open(const Term& normalized, const std::set<std::string>& avoid) {
    Soup s;
    std::set<std::string> used = avoid;
    collect_ids(normalized, used);
    std::vector<Term> work{normalized};
    while (!work.empty()) {
        Term t = work.back();
        work.pop_back();
        if (t.is(K::Nil)) continue;
        if (t.is(K::Par)) {
            const auto& n = t.as<node::Par>();
            work.push_back(n.right);
            work.push_back(n.left);
        } else if (t.is(K::Res)) {
            const auto& n = t.as<node::Res>();
            std::string c = fresh_id("b", used);
            used.insert(c);
            s.bound.push_back(c);
            work.push_back(subst_names(n.body, {{Name::constant(n.binder), Name::constant(c)}}));
        } else {
            s.atoms.push_back(t);
        }
    }
    return s;
}

std::vector<Term> others(const Soup& s, std::size_t skip1, std::size_t skip2 = SIZE_MAX) {
    std::vector<Term> out;
    for (std::size_t i = 0; i < s.atoms.size(); ++i)
        if (i != skip1 && i != skip2) out.push_back(s.atoms[i]);
    return out;
}

bool visible_subject(const Name& n, const Soup& s) {
    return !n.is_variable() &&
           std::find(s.bound.begin(), s.bound.end(), n.id) == s.bound.end();
}

Term normalized_process(const Term& t) {
    Term n = normalize(t);
    if (n.is(K::Abs)) throw NotAProcess("expected a process, got an abstraction");
    return n;
}

void tau_moves(const Soup& s, std::vector<Transition>& out) {
    for (std::size_t i = 0; i < s.atoms.size(); ++i) {
        if (!s.atoms[i].is(K::Output)) continue;
        const auto& o = s.atoms[i].as<node::Output>();
        for (std::size_t j = 0; j < s.atoms.size(); ++j) {
            if (j == i || !s.atoms[j].is(K::Input)) continue;
            const auto& in = s.atoms[j].as<node::Input>();
            if (in.subject != o.subject) continue;
            auto rest = others(s, i, j);
            rest.push_back(o.cont);
            rest.push_back(subst_terms(in.body, {{in.binder, o.payload}}));
            out.push_back({Action::tau(), normalize(res_all(s.bound, par_all(rest)))});
        }
    }
}

void dedupe(std::vector<Transition>& ts) {
    std::map<std::string, Transition> unique;
    for (auto& t : ts) unique.emplace(transition_key(t, true), std::move(t));
    ts.clear();
    for (auto& [_, t] : unique) ts.push_back(std::move(t));
}

std::string escape_dot(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string print_action(const Action& a) {
    switch (a.kind) {
        case Action::Kind::Tau:
            return "tau";
        case Action::Kind::In:
            return a.subject.id + "?<" + print_term(a.payload) + ">";
        case Action::Kind::Out: {
            std::string prefix;
            if (!a.extruded.empty()) {
                prefix = "new ";
                for (std::size_t i = 0; i < a.extruded.size(); ++i)
                    prefix += (i ? ", " : "") + a.extruded[i];
                prefix += ". ";
            }
            return prefix + a.subject.id + "!<" + print_term(a.payload) + ">";
        }
    }
    return "?";
}

std::string transition_key(const Transition& t, bool normalized) {
    const Action& a = t.action;
    Term target = normalized ? t.target : normalize(t.target);
    switch (a.kind) {
        case Action::Kind::Tau:
            return "tau|" + term_key(target);
        case Action::Kind::In:
            return "in|" + a.subject.id + "|" +
                   term_key(normalized ? alpha_canonical(a.payload) : normalize(a.payload)) + "|" +
                   term_key(target);
        case Action::Kind::Out: {
            // Binder order of the extruded names must not matter.
            Term payload = normalized ? a.payload : normalize(a.payload);
            std::vector<std::string> order;
            for (const auto& n : free_names_ordered(payload))
                if (std::find(a.extruded.begin(), a.extruded.end(), n) != a.extruded.end())
                    order.push_back(n);
            Term carrier = res_all(order, output(a.subject, payload, target));
            return "out|" + plain(alpha_canonical(carrier));
        }
    }
    return "";
}

std::vector<Transition> transitions(const Term& t, const ExploreBudget& budget) {
    Term n = normalized_process(t);
    std::vector<Term> offers = budget.input_instantiations;
    std::set<std::string> avoid;
    for (const auto& o : offers) collect_ids(o, avoid);
    if (budget.fresh_trigger) {
        std::set<std::string> ids = avoid;
        collect_ids(n, ids);
        Term tr = trigger(fresh_id("m", ids));
        collect_ids(tr, avoid);
        offers.push_back(tr);
    }
    Soup s = open(n, avoid);

    std::vector<Transition> out;
    for (std::size_t i = 0; i < s.atoms.size(); ++i) {
        const Term& atom = s.atoms[i];
        if (atom.is(K::Output)) {
            const auto& o = atom.as<node::Output>();
            if (!visible_subject(o.subject, s)) continue;
            std::vector<std::string> extruded, kept;
            auto carried = free_names_ordered(o.payload);
            for (const auto& c : carried)
                if (std::find(s.bound.begin(), s.bound.end(), c) != s.bound.end())
                    extruded.push_back(c);
            for (const auto& b : s.bound)
                if (std::find(extruded.begin(), extruded.end(), b) == extruded.end())
                    kept.push_back(b);
            auto rest = others(s, i);
            rest.push_back(o.cont);
            out.push_back({Action::out(extruded, o.subject, o.payload),
                           normalize(res_all(kept, par_all(rest)))});
        } else if (atom.is(K::Input)) {
            const auto& in = atom.as<node::Input>();
            if (!visible_subject(in.subject, s)) continue;
            for (const auto& offer : offers) {
                auto rest = others(s, i);
                rest.push_back(subst_terms(in.body, {{in.binder, offer}}));
                out.push_back({Action::in(in.subject, offer),
                               normalize(res_all(s.bound, par_all(rest)))});
            }
        }
    }
    tau_moves(s, out);
    dedupe(out);
    return out;
}

std::vector<Term> tau_successors(const Term& t) {
    Term n = normalized_process(t);
    Soup s = open(n, {});
    std::vector<Transition> out;
    tau_moves(s, out);
    dedupe(out);
    std::vector<Term> targets;
    for (auto& tr : out) targets.push_back(std::move(tr.target));
    return targets;
}

std::optional<Term> private_tau_step(const Term& t) {
    Soup s = open(normalized_process(t), {});
    for (const auto& c : s.bound) {
        std::size_t sender = SIZE_MAX, receiver = SIZE_MAX;
        int senders = 0, receivers = 0;
        for (std::size_t i = 0; i < s.atoms.size(); ++i) {
            const Term& a = s.atoms[i];
            if (a.is(K::Output) && a.as<node::Output>().subject == Name::constant(c)) {
                ++senders;
                sender = i;
            } else if (a.is(K::Input) && a.as<node::Input>().subject == Name::constant(c)) {
                ++receivers;
                receiver = i;
            }
        }
        if (senders != 1 || receivers != 1) continue;
        const auto& o = s.atoms[sender].as<node::Output>();
        const auto& in = s.atoms[receiver].as<node::Input>();
        auto rest = others(s, sender, receiver);
        rest.push_back(o.cont);
        rest.push_back(subst_terms(in.body, {{in.binder, o.payload}}));
        return normalize(res_all(s.bound, par_all(rest)));
    }
    return std::nullopt;
}

WeakClosure weak_closure(const Term& t, const ExploreBudget& budget) {
    WeakClosure wc;
    std::set<std::string> seen;
    std::deque<std::pair<Term, int>> queue;
    Term start = normalized_process(t);
    seen.insert(term_key(start));
    queue.emplace_back(start, 0);
    while (!queue.empty()) {
        auto [state, depth] = queue.front();
        queue.pop_front();
        wc.states.push_back(state);
        for (const auto& next : tau_successors(state)) {
            std::string key = term_key(next);
            if (seen.count(key)) continue;
            if (depth >= budget.max_tau_chain) {
                wc.capped = true;
                continue;
            }
            seen.insert(key);
            queue.emplace_back(next, depth + 1);
        }
    }
    return wc;
}

Lts build_lts(const Term& t, const ExploreBudget& budget) {
    Lts lts;
    lts.budget = budget;
    Term start = normalized_process(t);
    lts.states.push_back(start);
    lts.index.emplace(term_key(start), 0);
    std::vector<int> depth{0};
    for (std::size_t cur = 0; cur < lts.states.size(); ++cur) {
        auto moves = transitions(lts.states[cur], budget);
        if (depth[cur] >= budget.max_depth) {
            if (!moves.empty()) lts.truncated = true;
            continue;
        }
        for (auto& m : moves) {
            std::string key = term_key(m.target);
            int target;
            if (auto it = lts.index.find(key); it != lts.index.end()) {
                target = it->second;
            } else if (static_cast<int>(lts.states.size()) >= budget.max_states) {
                lts.truncated = true;
                continue;
            } else {
                target = static_cast<int>(lts.states.size());
                lts.states.push_back(m.target);
                lts.index.emplace(key, target);
                depth.push_back(depth[cur] + 1);
            }
            lts.edges.push_back({static_cast<int>(cur), std::move(m.action), target});
        }
    }
    return lts;
}

std::string lts_to_dot(const Lts& lts) {
    std::string out = "digraph lts {\n";
    if (lts.truncated) out += "  // truncated: the state budget was reached\n";
    out += "  node [shape=box];\n";
    for (std::size_t i = 0; i < lts.states.size(); ++i) {
        out += "  s" + std::to_string(i) + " [label=\"" + escape_dot(print_term(lts.states[i])) +
               "\"";
        if (static_cast<int>(i) == lts.root) out += ", style=bold";
        out += "];\n";
    }
    for (const auto& e : lts.edges)
        out += "  s" + std::to_string(e.source) + " -> s" + std::to_string(e.target) +
               " [label=\"" + escape_dot(print_action(e.action)) + "\"];\n";
    out += "}\n";
    return out;
}

nlohmann::json lts_to_json(const Lts& lts) {
    nlohmann::json j;
    j["root"] = lts.root;
    j["truncated"] = lts.truncated;
    j["budget"] = {{"max_states", lts.budget.max_states},
                   {"max_tau_chain", lts.budget.max_tau_chain},
                   {"max_depth", lts.budget.max_depth}};
    auto& states = j["states"] = nlohmann::json::array();
    for (std::size_t i = 0; i < lts.states.size(); ++i)
        states.push_back({{"id", i}, {"term", print_term(lts.states[i])}});
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const auto& e : lts.edges) {
        static const char* kinds[] = {"tau", "in", "out"};
        edges.push_back({{"source", e.source},
                         {"target", e.target},
                         {"kind", kinds[static_cast<int>(e.action.kind)]},
                         {"action", print_action(e.action)}});
    }
    return j;
}

}  // namespace hopi
