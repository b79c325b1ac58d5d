#pragma once

// Bounded on-the-fly checkers for normal bisimilarity (trigger-based input and
// output clauses) and for context bisimilarity over a finite family of
// receiving environments, with distinguishing witnesses that can be replayed
// against the transition relation.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hopi/semantics.hpp"
#include "hopi/sort.hpp"

namespace hopi {

enum class Mode : std::uint8_t { Strong, Weak };

/// Receiving environments E[X] (one hole variable) and the payloads offered
/// to inputs.
struct ContextFamily {
    std::string hole = "X";
    Sort hole_sort;
    std::vector<Term> contexts;
    std::vector<Term> payloads;
    /// Also offer a trigger on a name fresh for the pair under comparison.
    bool fresh_trigger = false;
};

/// Probe contexts and payloads for `sort` in `calc`. `hints` are names worth
/// passing to name abstractions (typically the free names of the terms being
/// compared); only Pid uses them.
ContextFamily default_context_family(const CalcId& calc, const Sort& sort,
                                     const std::vector<std::string>& hints = {});

/// Everything needed to re-run one step of the bisimulation game.
struct Game {
    enum class Relation : std::uint8_t { Normal, Context };

    Relation relation = Relation::Normal;
    Mode mode = Mode::Weak;
    CalcId calc = CalcId::pi_D(1);
    ContextFamily family;  // Context only
    ExploreBudget budget;
};

/// Payloads offered to inputs while comparing l and r.
std::vector<Term> game_offers(const Game& g, const Term& l, const Term& r);

/// Name for the trigger offered to inputs, and for the server installed by
/// the output clause, when comparing l and r: fresh for both.
std::string fresh_trigger_name(const Term& l, const Term& r);

/// (extruded)(residual | !m(Z).payload<Z>), normalized.
Term wrap_with_server(const std::vector<std::string>& extruded, const Term& residual,
                      const Term& payload, const std::string& m, const CalcId& calc);

/// (extruded)(E[payload] | residual), normalized; extruded names clashing with
/// fn(E) are renamed first.
Term plug_context(const Term& context, const std::string& hole,
                  const std::vector<std::string>& extruded, const Term& residual,
                  const Term& payload);

struct WitnessStep {
    int side = 0;  // 0: the left process moves, 1: the right one
    Action action;
    Term before;
    Term after;
    Term other;  // the defender's state when the challenge is made
    bool final = false;  // the other side has no move with this label
    // Non-final steps: the defender's matching move and the pair reached.
    Action defender_action;
    Term defender_after;
    int context_index = -1;  // Context relation, output steps: which E
    Term next_left;
    Term next_right;
};

struct Witness {
    Game game;
    Term left;
    Term right;
    std::vector<WitnessStep> steps;
};

struct Verdict {
    enum class Kind : std::uint8_t { Distinguished, BisimilarUpToBound, Inconclusive };

    Kind kind = Kind::Inconclusive;
    /// Inconclusive: "budget-exhausted" or "tau-cap-hit".
    std::string reason;
    std::optional<Witness> witness;
    int states_explored = 0;
    /// Some pair was left unexplored at max_depth and assumed related.
    bool depth_bounded = false;
    ExploreBudget budget;
};

std::string to_string(Verdict::Kind k);

Verdict check_normal(const Term& p, const Term& q, Mode mode, const ExploreBudget& budget,
                     const CalcId& calc = CalcId::pi_D(1));

Verdict check_context(const Term& p, const Term& q, Mode mode, const ContextFamily& family,
                      const ExploreBudget& budget, const CalcId& calc = CalcId::pi_D(1));

/// Compares two abstractions of equal sort by instantiating them: distinct
/// fresh triggers and check_normal in PiD, every tuple over their free names
/// plus two fresh names and check_context in Pid.
Verdict check_abstraction(const Term& f, const Term& g, Mode mode, const ExploreBudget& budget,
                          const CalcId& calc = CalcId::pi_D(1));

/// Re-checks a witness using only transitions() and weak_closure(): every
/// claimed move exists, every defender reply is a real (weak) move, every next
/// pair is the clause's successor, and the last challenge has no reply with
/// the same label. On failure `why` explains the first broken step.
bool replay_witness(const Witness& w, std::string* why = nullptr);

nlohmann::json witness_to_json(const Witness& w);
nlohmann::json verdict_to_json(const Verdict& v);

}  // namespace hopi
