#pragma once

// Triggers, trigger servers and the factorization transformation of PiD 1,
// plus fixture corpora exercising them.

#include <string>
#include <vector>

#include "hopi/sort.hpp"
#include "hopi/term.hpp"

namespace hopi {

/// \(Z). m!<Z>.0 in PiD 1. Throws UnsupportedCalculus elsewhere: in Pid a
/// trigger would have to send the received name, and name-passing is not
/// part of the calculus.
Term make_trigger(const std::string& m, const CalcId& calc = CalcId::pi_D(1));

/// !m(Z). A<Z>, the server a trigger on m points to.
Term trigger_server(const std::string& m, const Term& a, const CalcId& calc = CalcId::pi_D(1));

/// Puts t next to the server for A under new m. Leading abstractions of t
/// stay outside: \(Y1)..\(Yk).E' becomes \(Y1)..\(Yk).new m.(E' | !m(Z).A<Z>).
Term relocate(const Term& t, const std::string& m, const Term& a,
              const CalcId& calc = CalcId::pi_D(1));

struct FactorizationResult {
    enum class Case : std::uint8_t { NonParameterized, Parameterized };

    Term original;  // E[A]
    Term factored;
    std::string trigger_name;
    Case kind = Case::NonParameterized;
    int k = 0;  // abstraction layers kept outside (Parameterized only)
};

/// Factors A out of E[A] through a trigger on a fresh name m. If E[Tr_m] is
/// not an abstraction (after normalizing, when it is not one syntactically)
/// the result is new m.(E[Tr_m] | !m(Z).A<Z>); otherwise its k leading
/// abstractions are kept outside. Throws SortError when e or a do not fit
/// (e may only have `hole` free, a must be a closed abstraction) and
/// UnsupportedCalculus outside PiD 1.
FactorizationResult factorize(const Term& e, const std::string& hole, const Term& a,
                              const CalcId& calc = CalcId::pi_D(1));

/// One context per structural form of E (nil, the hole, hole application,
/// abstraction, output, input, parallel, restriction, application), each with
/// the abstraction to factor out.
struct FactorFixture {
    std::string id;
    std::string shape;
    Term context;  // hole X
    Term payload;
};

std::vector<FactorFixture> factorization_fixtures();

/// Instances of the distributive laws of a trigger server over prefixes,
/// output payloads, parallel composition and application arguments.
struct LawFixture {
    std::string id;
    std::string law;  // prefix-commute, output-payload, parallel-split, application-argument
    Term left;
    Term right;
};

std::vector<LawFixture> lemma_fixtures();

}  // namespace hopi
