#pragma once

#include <string>

#include "hopi/term.hpp"

namespace hopi {

/// Which calculus a term lives in: plain Pi, Pi with process
/// parameterization of arity n, or Pi with name parameterization of arity n.
struct CalcId {
    enum class Family : std::uint8_t { Pi, PiD, Pid };

    Family family = Family::PiD;
    int arity = 1;

    static CalcId pi() { return {Family::Pi, 0}; }
    static CalcId pi_D(int n) { return {Family::PiD, n}; }
    static CalcId pi_d(int n) { return {Family::Pid, n}; }

    bool parameterized() const { return family != Family::Pi; }

    /// "Pi", "PiD 1", "Pid 1".
    std::string to_string() const;
    /// Accepts "pi", "piD1", "PiD 1", "pid1", "Pid(1)" and similar spellings.
    static CalcId parse(const std::string& text);

    friend bool operator==(const CalcId&, const CalcId&) = default;
};

struct Sort {
    enum class Kind : std::uint8_t { Proc, AbsD, Absd };

    Kind kind = Kind::Proc;
    int arity = 0;
    /// Number of curried abstraction layers; 1 for ordinary abstractions.
    int depth = 0;

    static Sort proc() { return {Kind::Proc, 0, 0}; }
    static Sort abs_D(int n, int depth = 1) { return {Kind::AbsD, n, depth}; }
    static Sort abs_d(int n, int depth = 1) { return {Kind::Absd, n, depth}; }

    bool is_proc() const { return kind == Kind::Proc; }
    std::string to_string() const;

    friend bool operator==(const Sort&, const Sort&) = default;
};

/// The sort every transmitted object (and every process variable) has in `calc`.
Sort payload_sort(const CalcId& calc);

/// Infers the sort of `t` in `calc`, or throws SortError. Free process
/// variables are assumed to carry payload_sort(calc).
Sort sort_check(const Term& t, const CalcId& calc);

/// The inert abstraction used where the calculus demands a payload but the
/// content does not matter: 0 in Pi, \(Z).0 in PiD, \(z).0 in Pid.
Term dummy_payload(const CalcId& calc);
bool is_dummy_payload(const Term& t);

/// subst_terms after checking each image has the payload sort of `calc`.
Term subst_terms_checked(const Term& t, const TermMap& map, const CalcId& calc);

}  // namespace hopi
