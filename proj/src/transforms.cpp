#include "hopi/transforms.hpp"

#include "hopi/errors.hpp"
#include "hopi/parser.hpp"
#include "hopi/semantics.hpp"
#include "hopi/sugar.hpp"

namespace hopi {

namespace {

using K = Term::Kind;

void require_pid1(const CalcId& calc, const char* what) {
    if (calc.family == CalcId::Family::Pid)
        throw UnsupportedCalculus(std::string(what) + " needs a trigger, and in " + calc.to_string() +
                                  " a trigger would have to pass a name: name-passing is not part "
                                  "of the calculus");
    if (calc != CalcId::pi_D(1))
        throw UnsupportedCalculus(std::string(what) + " is defined for PiD 1 only (got " +
                                  calc.to_string() + ")");
}

// A readable name not in `ids`: m, m1, m2, ...
std::string plain_fresh(const std::string& base, const std::set<std::string>& ids) {
    if (!ids.count(base)) return base;
    for (int i = 1;; ++i)
        if (!ids.count(base + std::to_string(i))) return base + std::to_string(i);
}

Term parsed(const std::string& src) { return parse_term(src, CalcId::pi_D(1)); }

}  // namespace

Term make_trigger(const std::string& m, const CalcId& calc) {
    require_pid1(calc, "make_trigger");
    return trigger(m);
}

Term trigger_server(const std::string& m, const Term& a, const CalcId& calc) {
    std::set<std::string> ids = all_ids(a);
    std::string z = plain_fresh("Z", ids);
    return encode_replication(Prefix::in(Name::constant(m), z), app(a, {Arg{var(z)}}), calc);
}

Term relocate(const Term& t, const std::string& m, const Term& a, const CalcId& calc) {
    if (t.is(K::Abs)) {
        const auto& f = t.as<node::Abs>();
        return abs(f.params, relocate(f.body, m, a, calc), f.kind);
    }
    return res(m, par(t, trigger_server(m, a, calc)));
}

FactorizationResult factorize(const Term& e, const std::string& hole, const Term& a,
                              const CalcId& calc) {
    require_pid1(calc, "factorize");
    Sort sa = sort_check(a, calc);
    if (!(sa == payload_sort(calc)))
        throw SortError("", "the factored term must be an abstraction of sort " +
                                payload_sort(calc).to_string() + ", got " + sa.to_string());
    if (!free_vars(a).empty()) throw SortError("", "the factored term must be closed");
    sort_check(e, calc);
    auto fv = free_vars(e);
    fv.process.erase(hole);
    if (!fv.empty()) throw SortError("", "the context may only have the hole " + hole + " free");

    std::set<std::string> ids = all_ids(e);
    collect_ids(a, ids);
    FactorizationResult r;
    r.trigger_name = plain_fresh("m", ids);
    r.original = subst_terms(e, {{hole, a}});
    Term with_trigger = subst_terms(e, {{hole, trigger(r.trigger_name)}});
    if (!with_trigger.is(K::Abs) && sort_check(with_trigger, calc).is_proc()) {
        r.factored = relocate(with_trigger, r.trigger_name, a, calc);
        return r;
    }
    if (!with_trigger.is(K::Abs)) with_trigger = normalize(with_trigger);
    r.kind = FactorizationResult::Case::Parameterized;
    for (Term t = with_trigger; t.is(K::Abs); t = t.as<node::Abs>().body) ++r.k;
    r.factored = relocate(with_trigger, r.trigger_name, a, calc);
    return r;
}

std::vector<FactorFixture> factorization_fixtures() {
    const Term fwd = parsed("\\(Z). b!<Z>.0");
    const Term run = parsed("\\(Z). (Z<\\(Y). 0> | b!)");
    auto f = [](std::string id, std::string shape, const std::string& e, Term a) {
        return FactorFixture{std::move(id), std::move(shape), parsed(e), std::move(a)};
    };
    return {
        f("nil", "0", "0", fwd),
        f("hole", "X", "X", fwd),
        f("hole-application", "X<E1>", "X<\\(Y). c!>", run),
        f("abstraction", "\\(Y).E1", "\\(Y). X<Y>", run),
        f("output", "a!<E2>.E1", "a!<X>.X<\\(Y). 0>", fwd),
        f("input", "a(Y).E1", "a(Y). X<Y>", run),
        f("parallel", "E1 | E2", "X<\\(Y). c!> | a!<X>.0", fwd),
        f("restriction", "new c.E1", "new c.(X<\\(Y). c!> | c(W). a!)", run),
        f("application", "E2<E1>", "(\\(W). (W<\\(Y). 0> | a!))<X>", run),
    };
}

std::vector<LawFixture> lemma_fixtures() {
    const CalcId calc = CalcId::pi_D(1);
    const std::string m = "m";
    const Term tr = trigger(m);
    const Term fwd = parsed("\\(Z). b!<Z>.0");
    const Term run = parsed("\\(Z). (Z<\\(Y). 0> | b!)");
    auto fill = [&](const std::string& e) { return subst_terms(parsed(e), {{"X", tr}}); };
    auto boxed = [&](const Term& t, const Term& a) { return res(m, par(t, trigger_server(m, a, calc))); };

    std::vector<LawFixture> out;
    // new m.(alpha.E[Tr] | S) vs alpha.new m.(E[Tr] | S)
    auto prefix = [&](std::string id, const Prefix& alpha, const std::string& e, const Term& a) {
        Term et = fill(e);
        out.push_back({std::move(id), "prefix-commute", boxed(alpha.then(et), a),
                       alpha.then(boxed(et, a))});
    };
    prefix("prefix-commute-output", Prefix::out(Name::constant("a"), dummy_payload(calc)),
           "X<\\(Y). 0>", fwd);
    prefix("prefix-commute-input", Prefix::in(Name::constant("a"), "W"), "X<W> | W<\\(Y). 0>", run);

    // new m.(a!<E2[Tr]>.E1[Tr] | S) vs new m.(a!<relocated E2[Tr]>.E1[Tr] | S)
    auto payload = [&](std::string id, const std::string& e1, const std::string& e2, const Term& a) {
        Term b1 = fill(e2);
        Term b2 = relocate(b1, m, a, calc);
        Term cont = fill(e1);
        out.push_back({std::move(id), "output-payload",
                       boxed(output(Name::constant("a"), b1, cont), a),
                       boxed(output(Name::constant("a"), b2, cont), a)});
    };
    payload("output-payload-hole", "0", "X", fwd);
    payload("output-payload-abstraction", "X<\\(Y). 0>", "\\(Y). (X<Y> | c!)", run);

    // new m.(E1[Tr] | E2[Tr] | S) vs new m.(E1[Tr] | S) | new m.(E2[Tr] | S)
    auto split = [&](std::string id, const std::string& e1, const std::string& e2, const Term& a) {
        Term t1 = fill(e1), t2 = fill(e2);
        out.push_back({std::move(id), "parallel-split", boxed(par(t1, t2), a),
                       par(boxed(t1, a), boxed(t2, a))});
    };
    split("parallel-split-outputs", "X<\\(Y). c!>", "a!<X>.0", fwd);
    split("parallel-split-input", "a(W). X<W>", "X<\\(Y). 0>", run);

    // B<relocated E1[Tr]> vs new m.(B<E1[Tr]> | S)
    auto argument = [&](std::string id, const std::string& b, const std::string& e1, const Term& a) {
        Term bt = parsed(b);
        Term t1 = fill(e1);
        out.push_back({std::move(id), "application-argument", app(bt, {Arg{relocate(t1, m, a, calc)}}),
                       boxed(app(bt, {Arg{t1}}), a)});
    };
    argument("application-argument-run", "\\(Y). Y<\\(Z). 0>", "X", fwd);
    argument("application-argument-send", "\\(Y). a!<Y>.0", "\\(Y). (X<Y> | c!)", run);
    return out;
}

}  // namespace hopi
