#include "doctest.h"

#include <map>

#include "hopi/equivalence.hpp"
#include "hopi/errors.hpp"
#include "hopi/parser.hpp"
#include "hopi/printer.hpp"
#include "hopi/sugar.hpp"
#include "hopi/transforms.hpp"

using namespace hopi;

namespace {

const CalcId D1 = CalcId::pi_D(1);

Term P(const std::string& s, CalcId calc = CalcId::pi_D(1)) { return parse_term(s, calc); }

using VK = Verdict::Kind;

Verdict compare(const FactorizationResult& r) {
    if (r.kind == FactorizationResult::Case::NonParameterized)
        return check_normal(r.original, r.factored, Mode::Weak, {});
    return check_abstraction(r.original, r.factored, Mode::Weak, {});
}

}  // namespace

TEST_SUITE("make_trigger") {
    TEST_CASE("PiD 1") {
        Term t = make_trigger("m", D1);
        CHECK(alpha_equal(t, P("\\(Z). m!<Z>.0")));
        CHECK(free_names(t) == std::set<std::string>{"m"});
        CHECK(sort_check(t, D1) == payload_sort(D1));
    }

    TEST_CASE("unavailable outside PiD 1") {
        CHECK_THROWS_AS(make_trigger("m", CalcId::pi_d(1)), UnsupportedCalculus);
        CHECK_THROWS_AS(make_trigger("m", CalcId::pi_D(2)), UnsupportedCalculus);
        CHECK_THROWS_AS(make_trigger("m", CalcId::pi()), UnsupportedCalculus);
    }
}

TEST_SUITE("trigger_server") {
    TEST_CASE("is the replicated input") {
        Term a = P("\\(Z). b!<Z>.0");
        Term s = trigger_server("m", a, D1);
        CHECK(sort_check(s, D1).is_proc());
        CHECK(alpha_equal(s, encode_replication(Prefix::in(Name::constant("m"), "Z"),
                                                app(a, {Arg{var("Z")}}), D1)));
        CHECK(print_term(s).rfind("!m(", 0) == 0);
    }

    TEST_CASE("serves two requests in sequence") {
        Term s = trigger_server("m", P("\\(Z). Z<\\(Y). 0>"), D1);
        ExploreBudget b;
        b.input_instantiations = {trigger("k")};
        b.fresh_trigger = false;
        // Arm, receive, arm again, receive again.
        Term cur = s;
        int received = 0;
        for (int step = 0; step < 6 && received < 2; ++step) {
            auto ts = transitions(cur, b);
            auto in = std::find_if(ts.begin(), ts.end(), [](const Transition& t) {
                return t.action.kind == Action::Kind::In;
            });
            if (in != ts.end()) {
                cur = in->target;
                ++received;
                continue;
            }
            auto tau = tau_successors(cur);
            REQUIRE_FALSE(tau.empty());
            cur = tau.front();
        }
        CHECK(received == 2);
        // Both requests were answered on k.
        auto lts = build_lts(cur, b);
        int outs = 0;
        for (const auto& e : lts.edges)
            if (e.source == lts.root && e.action.kind == Action::Kind::Out &&
                e.action.subject == Name::constant("k"))
                ++outs;
        CHECK(outs >= 1);
    }
}

TEST_SUITE("factorize") {
    TEST_CASE("fixtures cover every structural form and relate") {
        auto fixtures = factorization_fixtures();
        CHECK(fixtures.size() >= 9);
        std::set<std::string> shapes;
        for (const auto& f : fixtures) {
            INFO(f.id);
            shapes.insert(f.shape);
            auto r = factorize(f.context, "X", f.payload);
            CHECK_FALSE(free_names(r.original).count(r.trigger_name));
            CHECK_FALSE(all_ids(f.context).count(r.trigger_name));
            CHECK_FALSE(all_ids(f.payload).count(r.trigger_name));
            CHECK(sort_check(r.factored, D1) == sort_check(r.original, D1));
            Verdict v = compare(r);
            CHECK(v.kind == VK::BisimilarUpToBound);
        }
        CHECK(shapes.size() == fixtures.size());
    }

    TEST_CASE("a wrong server is caught") {
        // Relocating to a server that runs something else must be refuted.
        Term other = P("\\(Z). c!<Z>.0");
        for (const auto& f : factorization_fixtures()) {
            if (f.id == "nil") continue;
            INFO(f.id);
            auto r = factorize(f.context, "X", f.payload);
            Term with_trigger = subst_terms(f.context, {{"X", trigger(r.trigger_name)}});
            Term wrong = relocate(r.kind == FactorizationResult::Case::Parameterized ? normalize(with_trigger)
                                                                                   : with_trigger,
                                  r.trigger_name, other, D1);
            FactorizationResult bad = r;
            bad.factored = wrong;
            Verdict v = compare(bad);
            CHECK(v.kind == VK::Distinguished);
            if (v.witness) {
                std::string why;
                CHECK_MESSAGE(replay_witness(*v.witness, &why), why);
            }
        }
    }

    TEST_CASE("cases") {
        Term a = P("\\(Z). b!<Z>.0");
        auto hole = factorize(P("X"), "X", a);
        CHECK(hole.kind == FactorizationResult::Case::Parameterized);
        CHECK(hole.k == 1);
        CHECK(hole.factored.is(Term::Kind::Abs));

        auto nil_case = factorize(P("0"), "X", a);
        CHECK(nil_case.kind == FactorizationResult::Case::NonParameterized);
        CHECK(alpha_equal(nil_case.factored, res(nil_case.trigger_name, par(nil(), trigger_server(nil_case.trigger_name, a, D1)))));
        CHECK(check_normal(nil_case.factored, nil(), Mode::Weak, {}).kind == VK::BisimilarUpToBound);

        auto curried = factorize(P("\\(Y). \\(W). (X<Y> | W<\\(V). 0>)", D1), "X", a);
        CHECK(curried.kind == FactorizationResult::Case::Parameterized);
        CHECK(curried.k == 2);
        CHECK(compare(curried).kind == VK::BisimilarUpToBound);

        // The hole applied to an abstraction reduces to a process.
        auto applied = factorize(P("(\\(Y). Y)<X>"), "X", a);
        CHECK(applied.kind == FactorizationResult::Case::Parameterized);
    }

    TEST_CASE("introductory shape") {
        // A<0> | Q factored through a trigger that is fired once.
        Term a = P("\\(Z). a!");
        auto r = factorize(P("X<\\(Y). 0> | c!"), "X", a);
        CHECK(alpha_equal(normalize(r.original), normalize(P("a! | c!"))));
        CHECK(compare(r).kind == VK::BisimilarUpToBound);
    }

    TEST_CASE("fresh name avoids the inputs") {
        auto r = factorize(P("X<\\(Y). m!> | m1!"), "X", P("\\(Z). m2!<Z>"));
        CHECK(r.trigger_name == "m3");
    }

    TEST_CASE("errors") {
        Term a = P("\\(Z). b!<Z>.0");
        CHECK_THROWS_AS(factorize(P("X", CalcId::pi_d(1)), "X", P("\\(z). z!", CalcId::pi_d(1)), CalcId::pi_d(1)),
                        UnsupportedCalculus);
        CHECK_THROWS_AS(factorize(P("X<\\(Y).0>"), "X", P("b!")), SortError);
        CHECK_THROWS_AS(factorize(P("X<\\(Y).0> | W<\\(Y).0>"), "X", a), SortError);
        CHECK_THROWS_AS(factorize(P("X"), "X", P("\\(Z). W<Z>")), SortError);
    }
}

TEST_SUITE("lemma_fixtures") {
    TEST_CASE("at least two instances per law, all related") {
        std::map<std::string, int> per_law;
        for (const auto& f : lemma_fixtures()) {
            INFO(f.id);
            ++per_law[f.law];
            CHECK(sort_check(f.left, D1).is_proc());
            CHECK(sort_check(f.right, D1).is_proc());
            CHECK(check_normal(f.left, f.right, Mode::Weak, {}).kind == VK::BisimilarUpToBound);
        }
        CHECK(per_law.size() == 4);
        for (const auto& [law, n] : per_law) {
            INFO(law);
            CHECK(n >= 2);
        }
    }

    TEST_CASE("an unrestricted server is observable") {
        Term a = P("\\(Z). b!<Z>.0");
        Term server = trigger_server("m", a, D1);
        Term left = par(P("a!.m!<\\(Y). 0>"), server);
        Term right = P("a!.m!<\\(Y). 0>");
        CHECK(check_normal(left, right, Mode::Weak, {}).kind == VK::Distinguished);
    }
}
