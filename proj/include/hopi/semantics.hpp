#pragma once

// Structural-congruence normal forms, the labelled transition relation and
// budget-bounded state-space construction.

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "hopi/term.hpp"

namespace hopi {

struct Action {
    enum class Kind : std::uint8_t { Tau, In, Out };

    Kind kind = Kind::Tau;
    /// Out only: restricted names carried out of their scope, in order of first
    /// occurrence in the payload.
    std::vector<std::string> extruded;
    Name subject;
    Term payload;

    static Action tau() { return {}; }
    static Action in(Name subject, Term payload) {
        return {Kind::In, {}, std::move(subject), std::move(payload)};
    }
    static Action out(std::vector<std::string> extruded, Name subject, Term payload) {
        return {Kind::Out, std::move(extruded), std::move(subject), std::move(payload)};
    }

    bool visible() const { return kind != Kind::Tau; }
};

/// "tau", "a?<A>", "a!<A>" or "new c, d. a!<A>".
std::string print_action(const Action& a);

struct Transition {
    Action action;
    Term target;
};

/// Alpha-invariant identity of a transition: bound extruded names are
/// canonicalized together with the payload and residual. Pass
/// `normalized = true` when the residual is already a normal form (as
/// everything transitions() returns is) to skip re-normalizing it.
std::string transition_key(const Transition& t, bool normalized = false);

struct ExploreBudget {
    int max_states = 10000;
    int max_tau_chain = 16;
    int max_depth = 12;
    /// Closed payloads offered to every input prefix.
    std::vector<Term> input_instantiations;
    /// Also offer \(Z). m!<Z>.0 for a name m fresh for the term.
    bool fresh_trigger = true;
};

/// Rewrites to the structural-congruence normal form: beta-reduces
/// applications, flattens parallel composition, drops unused restrictions and
/// restricted prefixes, minimizes restriction scopes, orders components
/// canonically and finishes with alpha_canonical.
///
/// Self-application makes some well-sorted terms reduce forever. Reduction is
/// therefore budgeted per subterm: a parallel component, or a subterm under a
/// prefix or abstraction, that has no beta normal form within its budget is
/// kept unreduced. Such a component at top level is inert. The result is
/// still idempotent and alpha-invariant.
Term normalize(const Term& t);

struct NormalizeReport {
    Term term;
    bool complete = true;  // false if some subterm was left unreduced
};

NormalizeReport normalize_report(const Term& t);

/// Printed form of an already-normalized term; the state identity used by
/// LTS construction and the checkers.
std::string term_key(const Term& normalized);

/// All single-step transitions of a closed process; residuals are normalized.
/// Throws NotAProcess for abstractions.
std::vector<Transition> transitions(const Term& t, const ExploreBudget& budget);

/// Only the internal transitions (no input instantiation needed).
std::vector<Term> tau_successors(const Term& t);

/// The internal step on a restricted channel with exactly one active sender
/// and one active receiver, if t has one (the first such channel in normal
/// form order). No other transition can involve those two prefixes, so the
/// step commutes with every other move and t is weakly bisimilar to its result.
std::optional<Term> private_tau_step(const Term& t);

struct WeakClosure {
    std::vector<Term> states;  // normalized, BFS order, starting with t itself
    bool capped = false;       // some state at the tau-chain limit could still move
};

WeakClosure weak_closure(const Term& t, const ExploreBudget& budget);

struct Lts {
    struct Edge {
        int source;
        Action action;
        int target;
    };

    std::vector<Term> states;
    std::unordered_map<std::string, int> index;
    std::vector<Edge> edges;
    int root = 0;
    ExploreBudget budget;
    bool truncated = false;
};

/// Breadth-first exploration from t within the budget.
Lts build_lts(const Term& t, const ExploreBudget& budget);

std::string lts_to_dot(const Lts& lts);
nlohmann::json lts_to_json(const Lts& lts);

/// Free names of t in order of first (depth-first, left-to-right) occurrence.
std::vector<std::string> free_names_ordered(const Term& t);

}  // namespace hopi
