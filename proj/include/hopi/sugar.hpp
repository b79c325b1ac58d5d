#pragma once

// Derived operators: tau-prefix and replication are encoded in the core
// syntax, and the printer recognizes the encodings to show them as sugar.

#include <optional>

#include "hopi/sort.hpp"
#include "hopi/term.hpp"

namespace hopi {

/// An input `a(X)` or output `a!<A>` prefix without its continuation.
struct Prefix {
    enum class Kind : std::uint8_t { In, Out };

    Kind kind = Kind::In;
    Name subject;
    std::string binder;  // In only
    ParamKind binder_kind = ParamKind::Process;
    Term payload;  // Out only

    static Prefix in(Name subject, std::string binder, ParamKind k = ParamKind::Process) {
        return {Kind::In, std::move(subject), std::move(binder), k, nil()};
    }
    static Prefix out(Name subject, Term payload) {
        return {Kind::Out, std::move(subject), {}, ParamKind::Process, std::move(payload)};
    }

    Term then(Term cont) const;
};

/// tau.P as new c.(c(X).P | c!<dummy>.0) with c, X fresh.
Term encode_tau(const Term& body, const CalcId& calc);

/// !phi.P as new c.(Q | c!<W>.0) with Q = c(X).(phi.(X' | P) | c!<X>.0), where
/// X' re-instantiates the transmitted copy: X in Pi, X<dummy,..> in PiD,
/// X<c,..> in Pid; W is Q itself (Pi) or Q wrapped in an inert abstraction.
Term encode_replication(const Prefix& prefix, const Term& body, const CalcId& calc);

struct ReplicationView {
    Prefix prefix;
    Term body;
};

std::optional<Term> match_tau(const Term& t);
std::optional<ReplicationView> match_replication(const Term& t);

}  // namespace hopi

namespace hopi {

/// \(Z). m!<Z>.0 -- forwards its argument on m.
Term trigger(const std::string& m);

}  // namespace hopi
