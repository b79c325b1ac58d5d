#include "hopi/equivalence.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

#include "hopi/errors.hpp"
#include "hopi/printer.hpp"
#include "hopi/sugar.hpp"

namespace hopi {

namespace {

using K = Term::Kind;

const char* const kObserver = "#o";
constexpr int kSettleSteps = 32;

std::vector<std::string> numbered(const std::string& base, int n) {
    if (n == 1) return {base};
    std::vector<std::string> out;
    for (int i = 1; i <= n; ++i) out.push_back(base + std::to_string(i));
    return out;
}

// \(Z1..Zn). m!<Z1>: the trigger generalized to n parameters.
Term trigger_for(const CalcId& calc, const std::string& m) {
    if (calc.arity == 1) return trigger(m);
    auto ps = numbered("Z", calc.arity);
    return abs(ps, output(Name::constant(m), var(ps[0])));
}

// X<first, dummy, .., dummy>
Term apply_hole(const std::string& hole, const Term& first, const CalcId& calc) {
    std::vector<Arg> args{first};
    for (int i = 1; i < calc.arity; ++i) args.emplace_back(dummy_payload(calc));
    return app(var(hole), std::move(args));
}

Term apply_names(const std::string& hole, const std::string& first, const CalcId& calc) {
    std::vector<Arg> args(calc.arity, Name::constant(first));
    return app(var(hole), std::move(args));
}

bool same_label(const Action& challenge, const Action& reply) {
    if (challenge.kind != reply.kind) return false;
    switch (challenge.kind) {
        case Action::Kind::Tau:
            return true;
        case Action::Kind::In:
            return challenge.subject == reply.subject &&
                   term_key(challenge.payload) == term_key(reply.payload);
        case Action::Kind::Out:
            return challenge.subject == reply.subject;
    }
    return false;
}

ExploreBudget offering(const ExploreBudget& base, std::vector<Term> offers) {
    ExploreBudget b = base;
    b.input_instantiations = std::move(offers);
    b.fresh_trigger = false;
    return b;
}

std::string offers_key(const std::vector<Term>& offers) {
    std::string k;
    for (const auto& o : offers) k += term_key(o) + "\x1f";
    return k;
}

// Successor pair(s) of one challenge/reply combination, as (left, right).
std::vector<std::pair<Term, Term>> clause_successors(const Game& g, int side, const Term& l,
                                                     const Term& r, const Transition& move,
                                                     const Action& reply_action,
                                                     const Term& reply_state) {
    auto ordered = [&](Term mine, Term theirs) {
        return side == 0 ? std::make_pair(std::move(mine), std::move(theirs))
                         : std::make_pair(std::move(theirs), std::move(mine));
    };
    std::vector<std::pair<Term, Term>> out;
    if (move.action.kind != Action::Kind::Out) {
        out.push_back(ordered(move.target, reply_state));
        return out;
    }
    if (g.relation == Game::Relation::Normal) {
        std::string m = fresh_trigger_name(l, r);
        out.push_back(ordered(
            wrap_with_server(move.action.extruded, move.target, move.action.payload, m, g.calc),
            wrap_with_server(reply_action.extruded, reply_state, reply_action.payload, m, g.calc)));
        return out;
    }
    for (const auto& e : g.family.contexts)
        out.push_back(ordered(
            plug_context(e, g.family.hole, move.action.extruded, move.target, move.action.payload),
            plug_context(e, g.family.hole, reply_action.extruded, reply_state, reply_action.payload)));
    return out;
}

class Engine {
public:
    explicit Engine(Game g) : g_(std::move(g)) {}

    Verdict run(const Term& p, const Term& q) {
        Term l = normalize(p), r = normalize(q);
        if (l.is(K::Abs) || r.is(K::Abs)) throw NotAProcess("checkers compare processes; use check_abstraction");
        l = settle(l);
        r = settle(r);
        intern(l, r, 0);
        std::deque<int> frontier{0};
        Verdict v;
        v.budget = g_.budget;
        std::vector<int> death;
        for (;;) {
            std::deque<int> next;
            while (!frontier.empty()) {
                int id = frontier.front();
                frontier.pop_front();
                visit(id, frontier, next);
            }
            death = fixpoint(true);
            if (death[0] != 0) break;
            // A pair set aside in favour of its reduced pair is played in
            // full once the reduced pair turns out unrelated.
            for (std::size_t i = 0; i < pairs_.size(); ++i) {
                Pair& p = pairs_[i];
                if (p.state == Pair::State::Deferred && death[p.reduced] != 0) {
                    p.state = Pair::State::Pending;
                    next.push_back(static_cast<int>(i));
                }
            }
            open_refuted(death, next);
            if (next.empty()) break;
            frontier = std::move(next);
        }
        v.states_explored = static_cast<int>(pairs_.size());
        v.depth_bounded = depth_bounded_;
        if (death[0] != 0) {
            v.kind = Verdict::Kind::Distinguished;
            v.witness = witness(death);
            return v;
        }
        if (fixpoint(false)[0] == 0) {
            v.kind = Verdict::Kind::BisimilarUpToBound;
            return v;
        }
        v.kind = Verdict::Kind::Inconclusive;
        v.reason = tau_capped_ ? "tau-cap-hit" : "budget-exhausted";
        return v;
    }

private:
    struct Reply {
        Action action;
        Term state;
        bool direct = false;  // no tau steps around the move
    };

    struct Challenge {
        int side = 0;
        Transition move;
        std::string move_key;
        std::vector<Reply> replies;
        std::vector<std::vector<int>> alternatives;  // per played reply; -1 = pair not admitted
        bool incomplete = false;                     // replies cut by the tau-chain cap

        // Weak games play the direct replies first and the rest only when
        // those all fail.
        bool open() const { return alternatives.size() < replies.size(); }
    };

    struct Pair {
        // Fresh: not visited yet. Deferred: stands for its reduced pair.
        // Pending: to be expanded. Capped: left unexpanded at max_depth.
        enum class State : std::uint8_t { Fresh, Deferred, Pending, Capped, Expanded };

        Term l, r;
        int depth = 0;
        bool identical = false;
        State state = State::Fresh;
        int reduced = -1;  // the pair without the components both sides share
        std::vector<Challenge> challenges;
    };

    // Drops the parallel components l and r have in common. Relating what is
    // left relates the pair, since weak and strong bisimilarity are preserved
    // by parallel composition; a pair is only ever refuted by its own moves.
    std::optional<std::pair<Term, Term>> reduce(const Term& l, const Term& r) const {
        auto keyed = [](const Term& t) {
            std::vector<std::pair<std::string, Term>> out;
            for (auto& c : par_components(t)) out.emplace_back(term_key(alpha_canonical(c)), c);
            return out;
        };
        auto lc = keyed(l), rc = keyed(r);
        std::multiset<std::string> lkeys, rkeys;
        for (const auto& [k, _] : lc) lkeys.insert(k);
        for (const auto& [k, _] : rc) rkeys.insert(k);
        auto rest = [](const auto& mine, std::multiset<std::string> theirs) {
            std::vector<Term> out;
            for (const auto& [k, c] : mine) {
                auto it = theirs.find(k);
                if (it == theirs.end())
                    out.push_back(c);
                else
                    theirs.erase(it);
            }
            return out;
        };
        auto lrest = rest(lc, rkeys), rrest = rest(rc, lkeys);
        if (lrest.size() == lc.size()) return std::nullopt;
        return std::make_pair(normalize(par_all(lrest)), normalize(par_all(rrest)));
    }

    void visit(int id, std::deque<int>& now, std::deque<int>& next) {
        Pair& p = pairs_[id];
        if (p.identical) return;
        if (p.state == Pair::State::Fresh) {
            if (auto red = reduce(p.l, p.r)) {
                std::size_t before = pairs_.size();
                int rid = intern(red->first, red->second, pairs_[id].depth);
                if (rid >= 0) {
                    pairs_[id].reduced = rid;
                    pairs_[id].state = Pair::State::Deferred;
                    if (pairs_.size() > before) now.push_back(rid);
                    return;
                }
            }
        }
        if (pairs_[id].state == Pair::State::Expanded || pairs_[id].state == Pair::State::Deferred) return;
        if (pairs_[id].depth >= g_.budget.max_depth) {
            pairs_[id].state = Pair::State::Capped;
            depth_bounded_ = true;
            return;
        }
        expand(id, next);
    }

    int intern(const Term& l, const Term& r, int depth) {
        std::string lk = term_key(l), rk = term_key(r);
        std::string key = lk + "\x1e" + rk;
        if (auto it = index_.find(key); it != index_.end()) return it->second;
        if (static_cast<int>(pairs_.size()) >= g_.budget.max_states) {
            exhausted_ = true;
            return -1;
        }
        int id = static_cast<int>(pairs_.size());
        Pair p;
        p.l = l;
        p.r = r;
        p.depth = depth;
        p.identical = lk == rk;
        pairs_.push_back(std::move(p));
        index_.emplace(std::move(key), id);
        return id;
    }

    const std::vector<Transition>& moves(const Term& t, const std::vector<Term>& offers,
                                         const std::string& okey) {
        std::string key = term_key(t) + "\x1d" + okey;
        auto it = moves_.find(key);
        if (it == moves_.end())
        {
            auto ts = transitions(t, offering(g_.budget, offers));
            for (auto& tr : ts) tr.target = settle(tr.target);
            it = moves_.emplace(key, std::move(ts)).first;
        }
        return it->second;
    }

    // Weak mode: follow private_tau_step as far as it goes (bounded), so the
    // bookkeeping steps of encoded operators do not multiply states.
    Term settle(const Term& t) {
        if (g_.mode == Mode::Strong) return t;
        std::string key = term_key(t);
        if (auto it = settled_.find(key); it != settled_.end()) return it->second;
        Term cur = t;
        for (int i = 0; i < kSettleSteps; ++i) {
            auto next = private_tau_step(cur);
            if (!next) break;
            cur = *next;
        }
        settled_.emplace(key, cur);
        return cur;
    }

    const std::vector<Term>& taus(const Term& t) {
        std::string key = term_key(t);
        auto it = taus_.find(key);
        if (it == taus_.end()) {
            std::vector<Term> out;
            std::set<std::string> seen;
            for (const auto& n : tau_successors(t)) {
                Term s = settle(n);
                if (seen.insert(term_key(s)).second) out.push_back(s);
            }
            it = taus_.emplace(key, std::move(out)).first;
        }
        return it->second;
    }

    struct Closure {
        std::vector<Term> states;
        bool capped = false;
    };

    const Closure& closure(const Term& t) {
        std::string key = term_key(t);
        if (auto it = closures_.find(key); it != closures_.end()) return it->second;
        Closure c;
        std::set<std::string> seen{key};
        std::deque<std::pair<Term, int>> queue{{t, 0}};
        while (!queue.empty()) {
            auto [s, d] = queue.front();
            queue.pop_front();
            c.states.push_back(s);
            for (const auto& n : taus(s)) {
                std::string k = term_key(n);
                if (seen.count(k)) continue;
                if (d >= g_.budget.max_tau_chain) {
                    c.capped = true;
                    continue;
                }
                seen.insert(k);
                queue.emplace_back(n, d + 1);
            }
        }
        return closures_.emplace(key, std::move(c)).first->second;
    }

    std::vector<Reply> replies(const Term& y, const Action& challenge,
                               const std::vector<Term>& offers, const std::string& okey,
                               bool& incomplete) {
        std::vector<Reply> out;
        std::set<std::string> seen;
        auto add = [&](const Action& a, const Term& s, bool direct = false) {
            if (seen.insert(transition_key({a, s}, true)).second) out.push_back({a, s, direct});
        };
        if (g_.mode == Mode::Strong) {
            for (const auto& t : moves(y, offers, okey))
                if (same_label(challenge, t.action)) add(t.action, t.target);
            return out;
        }
        const Closure& before = closure(y);
        incomplete |= before.capped;
        if (challenge.kind == Action::Kind::Tau) {
            for (std::size_t i = 0; i < before.states.size(); ++i)
                add(Action::tau(), before.states[i], i == 0);
            return out;
        }
        for (std::size_t i = 0; i < before.states.size(); ++i) {
            for (const auto& t : moves(before.states[i], offers, okey)) {
                if (!same_label(challenge, t.action)) continue;
                const Closure& after = closure(t.target);
                incomplete |= after.capped;
                for (std::size_t j = 0; j < after.states.size(); ++j)
                    add(t.action, after.states[j], i == 0 && j == 0);
            }
        }
        std::stable_partition(out.begin(), out.end(), [](const Reply& r) { return r.direct; });
        return out;
    }

    // Interns the successor pairs of the replies not played yet; with
    // `direct_only` it stops at the first reply that is not direct.
    void play(const Term& l, const Term& r, int depth, Challenge& ch, std::deque<int>& next,
              bool direct_only) {
        while (ch.open()) {
            const Reply& rep = ch.replies[ch.alternatives.size()];
            if (direct_only && !rep.direct && !ch.alternatives.empty()) return;
            std::vector<int> alt;
            for (auto& [nl, nr] : clause_successors(g_, ch.side, l, r, ch.move, rep.action, rep.state)) {
                std::size_t before = pairs_.size();
                int pid = intern(settle(nl), settle(nr), depth + 1);
                if (pid >= 0 && pairs_.size() > before) next.push_back(pid);
                alt.push_back(pid);
            }
            ch.alternatives.push_back(std::move(alt));
        }
    }

    // Plays the remaining replies of every challenge whose direct replies
    // have all been refuted.
    void open_refuted(const std::vector<int>& death, std::deque<int>& next) {
        auto alive = [&](int pid) { return pid < 0 || death[pid] == 0; };
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            for (auto& ch : pairs_[i].challenges) {
                if (!ch.open()) continue;
                bool matched = std::any_of(ch.alternatives.begin(), ch.alternatives.end(), [&](const auto& alt) {
                    return std::all_of(alt.begin(), alt.end(), alive);
                });
                if (!matched) play(pairs_[i].l, pairs_[i].r, pairs_[i].depth, ch, next, false);
            }
        }
    }

    void expand(int id, std::deque<int>& next) {
        Term l = pairs_[id].l, r = pairs_[id].r;
        int depth = pairs_[id].depth;
        auto offers = game_offers(g_, l, r);
        std::string okey = offers_key(offers);
        std::vector<Challenge> challenges;
        for (int side = 0; side < 2; ++side) {
            const Term& x = side == 0 ? l : r;
            const Term& y = side == 0 ? r : l;
            for (const auto& mv : moves(x, offers, okey)) {
                Challenge ch;
                ch.side = side;
                ch.move = mv;
                ch.move_key = transition_key(mv, true);
                ch.replies = replies(y, mv.action, offers, okey, ch.incomplete);
                play(l, r, depth, ch, next, g_.mode == Mode::Weak);
                tau_capped_ |= ch.incomplete;
                challenges.push_back(std::move(ch));
            }
        }
        std::stable_sort(challenges.begin(), challenges.end(), [](const auto& a, const auto& b) {
            return std::tie(a.side, a.move_key) < std::tie(b.side, b.move_key);
        });
        pairs_[id].challenges = std::move(challenges);
        pairs_[id].state = Pair::State::Expanded;
    }

    // Jacobi rounds of removal. death[i] is 0 for surviving pairs and the
    // round of removal otherwise. The optimistic variant counts pairs that did
    // not fit in the table, and replies cut by the tau cap, as matching.
    std::vector<int> fixpoint(bool optimistic) const {
        std::vector<int> death(pairs_.size(), 0);
        auto alive = [&](int pid) { return pid < 0 ? optimistic : death[pid] == 0; };
        for (int round = 1;; ++round) {
            std::vector<int> removed;
            for (std::size_t i = 0; i < pairs_.size(); ++i) {
                const Pair& p = pairs_[i];
                if (death[i] != 0 || p.identical) continue;
                if (p.reduced >= 0 && death[p.reduced] == 0) continue;
                if (p.state == Pair::State::Capped) continue;
                if (p.state != Pair::State::Expanded) {
                    // Not played yet: related only optimistically.
                    if (!optimistic) removed.push_back(static_cast<int>(i));
                    continue;
                }
                for (const auto& ch : p.challenges) {
                    if (optimistic && ch.incomplete) continue;
                    bool matched = std::any_of(
                        ch.alternatives.begin(), ch.alternatives.end(),
                        [&](const auto& alt) { return std::all_of(alt.begin(), alt.end(), alive); });
                    // Replies not played yet may still match.
                    if (!matched && optimistic && ch.open()) continue;
                    if (!matched) {
                        removed.push_back(static_cast<int>(i));
                        break;
                    }
                }
            }
            if (removed.empty()) return death;
            for (int i : removed) death[i] = round;
        }
    }

    Witness witness(const std::vector<int>& death) const {
        Witness w;
        w.game = g_;
        w.left = pairs_[0].l;
        w.right = pairs_[0].r;
        auto earlier = [&](int pid, int round) {
            return pid >= 0 && death[pid] != 0 && death[pid] < round;
        };
        int id = 0;
        for (;;) {
            const Pair& p = pairs_[id];
            int round = death[id];
            const Challenge* chosen = nullptr;
            for (const auto& ch : p.challenges) {
                if (ch.incomplete || ch.open()) continue;
                bool refuted = std::all_of(ch.alternatives.begin(), ch.alternatives.end(),
                                           [&](const auto& alt) {
                                               return std::any_of(alt.begin(), alt.end(), [&](int pid) {
                                                   return earlier(pid, round);
                                               });
                                           });
                if (!refuted) continue;
                if (!chosen || (ch.alternatives.empty() && !chosen->alternatives.empty()))
                    chosen = &ch;
            }
            WitnessStep step;
            step.side = chosen->side;
            step.action = chosen->move.action;
            step.before = chosen->side == 0 ? p.l : p.r;
            step.other = chosen->side == 0 ? p.r : p.l;
            step.after = chosen->move.target;
            if (chosen->alternatives.empty()) {
                step.final = true;
                w.steps.push_back(std::move(step));
                return w;
            }
            std::size_t best_alt = 0, best_pos = 0;
            int best_round = round;
            for (std::size_t a = 0; a < chosen->alternatives.size(); ++a) {
                const auto& alt = chosen->alternatives[a];
                for (std::size_t j = 0; j < alt.size(); ++j) {
                    if (earlier(alt[j], round) && death[alt[j]] < best_round) {
                        best_round = death[alt[j]];
                        best_alt = a;
                        best_pos = j;
                    }
                }
            }
            int next = chosen->alternatives[best_alt][best_pos];
            step.defender_action = chosen->replies[best_alt].action;
            step.defender_after = chosen->replies[best_alt].state;
            if (g_.relation == Game::Relation::Context && step.action.kind == Action::Kind::Out)
                step.context_index = static_cast<int>(best_pos);
            step.next_left = pairs_[next].l;
            step.next_right = pairs_[next].r;
            w.steps.push_back(std::move(step));
            id = next;
        }
    }

    Game g_;
    std::deque<Pair> pairs_;
    std::unordered_map<std::string, int> index_;
    std::unordered_map<std::string, std::vector<Transition>> moves_;
    std::unordered_map<std::string, std::vector<Term>> taus_;
    std::unordered_map<std::string, Closure> closures_;
    std::unordered_map<std::string, Term> settled_;
    bool exhausted_ = false;
    bool tau_capped_ = false;
    bool depth_bounded_ = false;
};

void require_process(const Term& t, const CalcId& calc, const char* which) {
    Sort s = sort_check(t, calc);
    if (!s.is_proc())
        throw SortError("", std::string(which) + " has sort " + s.to_string() + ", expected a process");
    auto fv = free_vars(t);
    if (!fv.empty()) throw SortError("", std::string(which) + " is not closed");
}

}  // namespace

std::string to_string(Verdict::Kind k) {
    switch (k) {
        case Verdict::Kind::Distinguished:
            return "Distinguished";
        case Verdict::Kind::BisimilarUpToBound:
            return "BisimilarUpToBound";
        case Verdict::Kind::Inconclusive:
            return "Inconclusive";
    }
    return "?";
}

std::string fresh_trigger_name(const Term& l, const Term& r) {
    std::set<std::string> ids = all_ids(l);
    collect_ids(r, ids);
    return fresh_id("m", ids);
}

std::vector<Term> game_offers(const Game& g, const Term& l, const Term& r) {
    if (g.relation == Game::Relation::Normal) return {trigger_for(g.calc, fresh_trigger_name(l, r))};
    std::vector<Term> offers = g.family.payloads;
    for (const auto& extra : g.budget.input_instantiations) offers.push_back(extra);
    if (g.family.fresh_trigger) offers.push_back(trigger_for(g.calc, fresh_trigger_name(l, r)));
    return offers;
}

Term wrap_with_server(const std::vector<std::string>& extruded, const Term& residual,
                      const Term& payload, const std::string& m, const CalcId& calc) {
    Term server = encode_replication(Prefix::in(Name::constant(m), "Z"),
                                     app(payload, {Arg{var("Z")}}), calc);
    return normalize(res_all(extruded, par(residual, server)));
}

Term plug_context(const Term& context, const std::string& hole,
                  const std::vector<std::string>& extruded, const Term& residual,
                  const Term& payload) {
    std::set<std::string> fe = free_names(context);
    std::vector<std::string> names = extruded;
    Term res_term = residual, pay = payload;
    std::set<std::string> used = all_ids(context);
    collect_ids(residual, used);
    collect_ids(payload, used);
    NameMap rename;
    for (auto& n : names) {
        if (!fe.count(n)) continue;
        std::string fresh = fresh_id("b", used);
        used.insert(fresh);
        rename[Name::constant(n)] = Name::constant(fresh);
        n = fresh;
    }
    if (!rename.empty()) {
        res_term = subst_names(res_term, rename);
        pay = subst_names(pay, rename);
    }
    return normalize(res_all(names, par(subst_terms(context, {{hole, pay}}), res_term)));
}

ContextFamily default_context_family(const CalcId& calc, const Sort& sort,
                                     const std::vector<std::string>& hints) {
    if (!(sort == payload_sort(calc)))
        throw SortError("", "context hole of sort " + sort.to_string() + " but " + calc.to_string() +
                                " transmits " + payload_sort(calc).to_string());
    ContextFamily f;
    f.hole_sort = sort;
    const Name o = Name::constant(kObserver);
    const Term d = dummy_payload(calc);
    switch (calc.family) {
        case CalcId::Family::Pi:
            f.contexts = {nil(), var("X"), par(var("X"), var("X"))};
            f.payloads = {nil(), output(o, nil())};
            break;
        case CalcId::Family::PiD: {
            auto zs = numbered("Z", calc.arity);
            Term bark = abs(zs, output(o, d));
            f.contexts = {
                nil(),
                apply_hole("X", bark, calc),
                apply_hole("X", trigger_for(calc, kObserver), calc),
                par(apply_hole("X", d, calc), apply_hole("X", bark, calc)),
                res("#k", par(apply_hole("X", trigger_for(calc, "#k"), calc),
                              input(Name::constant("#k"), "Y", output(o, d)))),
                encode_replication(Prefix::in(o, "Z"), apply_hole("X", var("Z"), calc), calc),
            };
            std::vector<Arg> dummies(calc.arity, d);
            f.payloads = {d, abs(zs, output(o, d, app(var(zs[0]), dummies)))};
            f.fresh_trigger = true;
            break;
        }
        case CalcId::Family::Pid: {
            auto zs = numbered("z", calc.arity);
            f.contexts = {
                nil(),
                apply_names("X", kObserver, calc),
                par(apply_names("X", kObserver, calc), apply_names("X", kObserver, calc)),
                res("#k", par(apply_names("X", "#k", calc),
                              input(Name::constant("#k"), "Y", output(o, d)))),
            };
            std::set<std::string> seen;
            for (const auto& h : hints)
                if (seen.insert(h).second && seen.size() <= 4)
                    f.contexts.push_back(apply_names("X", h, calc));
            f.payloads = {d, abs(zs, output(Name::variable(zs[0]), d), ParamKind::Name),
                          abs(zs, output(o, d), ParamKind::Name)};
            break;
        }
    }
    return f;
}

Verdict check_normal(const Term& p, const Term& q, Mode mode, const ExploreBudget& budget,
                     const CalcId& calc) {
    if (calc.family != CalcId::Family::PiD)
        throw SortError("", "normal bisimilarity needs triggers, which only PiD has (got " +
                                calc.to_string() + ")");
    if (calc.arity != 1)
        throw UnsupportedCalculus("normal bisimilarity is implemented for PiD 1 only");
    require_process(p, calc, "left term");
    require_process(q, calc, "right term");
    Game g;
    g.relation = Game::Relation::Normal;
    g.mode = mode;
    g.calc = calc;
    g.budget = budget;
    return Engine(g).run(p, q);
}

Verdict check_context(const Term& p, const Term& q, Mode mode, const ContextFamily& family,
                      const ExploreBudget& budget, const CalcId& calc) {
    require_process(p, calc, "left term");
    require_process(q, calc, "right term");
    if (!(family.hole_sort == payload_sort(calc)))
        throw SortError("", "context hole has sort " + family.hole_sort.to_string() + ", expected " +
                                payload_sort(calc).to_string());
    for (const auto& e : family.contexts) {
        Sort s = sort_check(e, calc);
        if (!s.is_proc()) throw SortError("", "context is not a process");
    }
    for (const auto& a : family.payloads) {
        Sort s = sort_check(a, calc);
        if (!(s == payload_sort(calc))) throw SortError("", "payload of sort " + s.to_string());
    }
    Game g;
    g.relation = Game::Relation::Context;
    g.mode = mode;
    g.calc = calc;
    g.family = family;
    g.budget = budget;
    return Engine(g).run(p, q);
}

Verdict check_abstraction(const Term& f, const Term& g, Mode mode, const ExploreBudget& budget,
                          const CalcId& calc) {
    Sort sf = sort_check(f, calc), sg = sort_check(g, calc);
    if (!(sf == sg)) throw SortError("", "abstractions of different sorts " + sf.to_string() +
                                             " and " + sg.to_string());
    if (sf.is_proc()) throw SortError("", "expected abstractions, got processes");
    std::set<std::string> ids = all_ids(f);
    collect_ids(g, ids);

    if (calc.family == CalcId::Family::PiD) {
        Term fi = f, gi = g;
        for (int layer = 0; layer < sf.depth; ++layer) {
            std::vector<Arg> args;
            for (int i = 0; i < calc.arity; ++i) {
                std::string m = fresh_id("m", ids);
                ids.insert(m);
                args.emplace_back(trigger_for(calc, m));
            }
            fi = app(fi, args);
            gi = app(gi, args);
        }
        if (calc.arity == 1) return check_normal(fi, gi, mode, budget, calc);
        return check_context(fi, gi, mode, default_context_family(calc, payload_sort(calc)), budget,
                             calc);
    }

    std::set<std::string> pool = free_names(f);
    auto fg = free_names(g);
    pool.insert(fg.begin(), fg.end());
    for (int i = 0; i < 2; ++i) {
        std::string n = fresh_id("n", ids);
        ids.insert(n);
        pool.insert(n);
    }
    std::vector<std::string> names(pool.begin(), pool.end());
    std::vector<std::size_t> digits(calc.arity, 0);
    Verdict overall;
    overall.kind = Verdict::Kind::BisimilarUpToBound;
    overall.budget = budget;
    std::optional<Verdict> inconclusive;
    for (;;) {
        std::vector<Arg> args;
        for (auto d : digits) args.emplace_back(Name::constant(names[d]));
        Term fi = f, gi = g;
        for (int layer = 0; layer < sf.depth; ++layer) {
            fi = app(fi, args);
            gi = app(gi, args);
        }
        Verdict v = check_context(fi, gi, mode, default_context_family(calc, payload_sort(calc), names),
                                  budget, calc);
        overall.states_explored += v.states_explored;
        overall.depth_bounded |= v.depth_bounded;
        if (v.kind == Verdict::Kind::Distinguished) {
            v.states_explored = overall.states_explored;
            return v;
        }
        if (v.kind == Verdict::Kind::Inconclusive && !inconclusive) inconclusive = v;
        std::size_t i = 0;
        while (i < digits.size() && ++digits[i] == names.size()) digits[i++] = 0;
        if (i == digits.size()) break;
    }
    if (inconclusive) {
        inconclusive->states_explored = overall.states_explored;
        return *inconclusive;
    }
    return overall;
}

namespace {

// Does from --tau--> to commute with every other move of `from`? Checked on
// the transitions alone: each other move u must be matched by a move of `to`
// with the same label whose target u.target reaches in one internal step.
bool confluent_step(const Term& from, const Term& to, const ExploreBudget& offers) {
    std::string to_key = term_key(to);
    auto after = transitions(to, offers);
    for (const auto& u : transitions(from, offers)) {
        if (u.action.kind == Action::Kind::Tau && term_key(u.target) == to_key) continue;
        std::set<std::string> joins;
        for (const auto& s : tau_successors(u.target)) joins.insert(term_key(s));
        if (u.action.kind == Action::Kind::Tau) joins.insert(term_key(u.target));
        bool ok = std::any_of(after.begin(), after.end(), [&](const Transition& v) {
            return same_label(u.action, v.action) && u.action.extruded.size() == v.action.extruded.size() &&
                   joins.count(term_key(v.target));
        });
        if (!ok) return false;
    }
    return true;
}

// `to` is reached from `from` by internal steps, each of them confluent when
// `confluent` is set (so that from and to are weakly bisimilar).
bool reaches(const Term& from, const Term& to, bool confluent, const ExploreBudget& offers) {
    constexpr std::size_t kMaxVisited = 4096;
    std::string goal = term_key(normalize(to));
    std::set<std::string> seen{term_key(from)};
    std::deque<Term> queue{from};
    while (!queue.empty() && seen.size() < kMaxVisited) {
        Term s = queue.front();
        queue.pop_front();
        if (term_key(s) == goal) return true;
        for (const auto& n : tau_successors(s)) {
            if (seen.count(term_key(n))) continue;
            if (confluent && !confluent_step(s, n, offers)) continue;
            seen.insert(term_key(n));
            queue.push_back(n);
        }
    }
    return false;
}

}  // namespace

bool replay_witness(const Witness& w, std::string* why) {
    auto fail = [&](std::size_t i, const std::string& msg) {
        if (why) *why = "step " + std::to_string(i) + ": " + msg;
        return false;
    };
    const Game& g = w.game;
    const bool weak = g.mode == Mode::Weak;
    // In weak games the checker may have advanced states along confluent
    // internal steps; `same` accepts exactly that and nothing else.
    auto same = [&](const Term& actual, const Term& claimed, const ExploreBudget& offers) {
        if (term_key(normalize(actual)) == term_key(normalize(claimed))) return true;
        return weak && reaches(normalize(actual), claimed, true, offers);
    };
    Term l = normalize(w.left), r = normalize(w.right);
    for (std::size_t i = 0; i < w.steps.size(); ++i) {
        const WitnessStep& st = w.steps[i];
        const Term& x0 = st.side == 0 ? l : r;
        const Term& y0 = st.side == 0 ? r : l;
        Term cl = normalize(st.side == 0 ? st.before : st.other);
        Term cr = normalize(st.side == 0 ? st.other : st.before);
        ExploreBudget raw_offers = offering(g.budget, game_offers(g, l, r));
        if (!same(x0, st.before, raw_offers)) return fail(i, "the moving state is not the current one");
        if (!same(y0, st.other, raw_offers)) return fail(i, "the defending state is not the current one");
        // From here on the game is played on the claimed pair.
        l = cl;
        r = cr;
        const Term& x = st.side == 0 ? l : r;
        const Term& y = st.side == 0 ? r : l;
        ExploreBudget offers = offering(g.budget, game_offers(g, l, r));

        auto xs = transitions(x, offers);
        bool moved = std::any_of(xs.begin(), xs.end(), [&](const Transition& t) {
            if (!same_label(st.action, t.action) || t.action.extruded != st.action.extruded) return false;
            if (t.action.kind == Action::Kind::Out &&
                term_key(alpha_canonical(t.action.payload)) != term_key(alpha_canonical(st.action.payload)))
                return false;
            return same(t.target, st.after, offers);
        });
        if (!moved) return fail(i, "claimed move " + print_action(st.action) + " is not a transition");

        std::vector<Term> starts{y};
        if (weak) {
            auto wc = weak_closure(y, g.budget);
            if (st.final && wc.capped) return fail(i, "tau closure of the defender was capped");
            starts = wc.states;
        }

        if (st.final) {
            if (i + 1 != w.steps.size()) return fail(i, "final step is not the last one");
            if (st.action.kind == Action::Kind::Tau && weak)
                return fail(i, "a weak internal move can always be answered by staying put");
            for (const auto& y1 : starts)
                for (const auto& t : transitions(y1, offers))
                    if (same_label(st.action, t.action))
                        return fail(i, "the other side can answer with " + print_action(t.action));
            return true;
        }

        bool found = false;
        if (st.action.kind == Action::Kind::Tau) {
            if (weak) {
                found = reaches(y, st.defender_after, false, offers);
            } else {
                for (const auto& t : transitions(y, offers))
                    if (t.action.kind == Action::Kind::Tau &&
                        term_key(t.target) == term_key(normalize(st.defender_after)))
                        found = true;
            }
        } else {
            std::string reply = transition_key({st.defender_action, st.defender_after});
            for (const auto& y1 : starts) {
                for (const auto& t : transitions(y1, offers)) {
                    if (found || !same_label(st.action, t.action)) continue;
                    if (!weak) {
                        found = transition_key(t) == reply;
                        continue;
                    }
                    Transition claimed{t.action, st.defender_after};
                    found = transition_key(claimed) == reply &&
                            reaches(t.target, st.defender_after, false, offers);
                }
            }
        }
        if (!found) return fail(i, "defender reply is not a real move");

        Transition mv{st.action, st.after};
        auto succ = clause_successors(g, st.side, l, r, mv, st.defender_action, st.defender_after);
        std::size_t which = st.context_index >= 0 ? static_cast<std::size_t>(st.context_index) : 0;
        if (which >= succ.size()) return fail(i, "context index out of range");
        if (!same(succ[which].first, st.next_left, offers) || !same(succ[which].second, st.next_right, offers))
            return fail(i, "next pair is not the successor prescribed by the clause");
        l = normalize(st.next_left);
        r = normalize(st.next_right);
    }
    return fail(w.steps.size(), "witness ends without an unanswerable move");
}

nlohmann::json witness_to_json(const Witness& w) {
    nlohmann::json j;
    j["relation"] = w.game.relation == Game::Relation::Normal ? "normal" : "context";
    j["mode"] = w.game.mode == Mode::Weak ? "weak" : "strong";
    j["left"] = print_term(w.left);
    j["right"] = print_term(w.right);
    auto& steps = j["steps"] = nlohmann::json::array();
    for (const auto& s : w.steps) {
        nlohmann::json js{{"side", s.side == 0 ? "left" : "right"},
                          {"action", print_action(s.action)},
                          {"state_before", print_term(s.before)},
                          {"state_after", print_term(s.after)},
                          {"defender_state", print_term(s.other)},
                          {"final", s.final}};
        if (!s.final) {
            js["reply"] = print_action(s.defender_action);
            js["reply_state"] = print_term(s.defender_after);
            if (s.context_index >= 0) js["context"] = print_term(w.game.family.contexts[s.context_index]);
            js["next_left"] = print_term(s.next_left);
            js["next_right"] = print_term(s.next_right);
        }
        steps.push_back(std::move(js));
    }
    return j;
}

nlohmann::json verdict_to_json(const Verdict& v) {
    nlohmann::json j;
    j["verdict"] = to_string(v.kind);
    if (!v.reason.empty()) j["reason"] = v.reason;
    j["states_explored"] = v.states_explored;
    j["depth_bounded"] = v.depth_bounded;
    j["budget"] = {{"max_states", v.budget.max_states},
                   {"max_tau_chain", v.budget.max_tau_chain},
                   {"max_depth", v.budget.max_depth}};
    if (v.witness) j["witness"] = witness_to_json(*v.witness);
    return j;
}

}  // namespace hopi
