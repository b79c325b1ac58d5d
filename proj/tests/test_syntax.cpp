#include "doctest.h"

#include "hopi/errors.hpp"
#include "hopi/parser.hpp"
#include "hopi/printer.hpp"
#include "hopi/semantics.hpp"
#include "hopi/sort.hpp"
#include "hopi/sugar.hpp"
#include "hopi/term_json.hpp"
#include "support/generator.hpp"

using namespace hopi;

namespace {

const CalcId D1 = CalcId::pi_D(1);
const CalcId d1 = CalcId::pi_d(1);

Term P(const std::string& s, CalcId calc = CalcId::pi_D(1)) { return parse_term(s, calc); }
Name c(const std::string& s) { return Name::constant(s); }

// Free names straight from the definition, without any shared helpers.
std::set<std::string> naive_fn(const Term& t) {
    using K = Term::Kind;
    std::set<std::string> out;
    auto add = [&](const Name& n) {
        if (!n.is_variable()) out.insert(n.id);
    };
    auto merge = [&](const Term& s) {
        auto sub = naive_fn(s);
        out.insert(sub.begin(), sub.end());
    };
    switch (t.kind()) {
        case K::Nil:
        case K::Var:
            break;
        case K::Input:
            add(t.as<node::Input>().subject);
            merge(t.as<node::Input>().body);
            break;
        case K::Output:
            add(t.as<node::Output>().subject);
            merge(t.as<node::Output>().payload);
            merge(t.as<node::Output>().cont);
            break;
        case K::Par:
            merge(t.as<node::Par>().left);
            merge(t.as<node::Par>().right);
            break;
        case K::Res: {
            auto sub = naive_fn(t.as<node::Res>().body);
            sub.erase(t.as<node::Res>().binder);
            out.insert(sub.begin(), sub.end());
            break;
        }
        case K::Abs:
            merge(t.as<node::Abs>().body);
            break;
        case K::App:
            merge(t.as<node::App>().op);
            for (const auto& a : t.as<node::App>().args) {
                if (const auto* tm = std::get_if<Term>(&a))
                    merge(*tm);
                else
                    add(std::get<Name>(a));
            }
            break;
    }
    return out;
}

}  // namespace

TEST_SUITE("free names and variables") {
    TEST_CASE("free_names examples") {
        CHECK(free_names(nil()).empty());
        CHECK(free_names(P("new c. c!<\\(Z).0> | a!<\\(Z).0>")) == std::set<std::string>{"a"});
        Term w = P("(\\(x). x!<\\(y).0>.0)<d>", d1);
        CHECK(free_names(w) == std::set<std::string>{"d"});
        CHECK(free_names(normalize(w)) == std::set<std::string>{"d"});
    }

    TEST_CASE("free_names agrees with the naive definition on generated terms") {
        testing::TermGenerator gen(7);
        for (int i = 0; i < 300; ++i) {
            Term t = gen.process(12);
            CHECK(free_names(t) == naive_fn(t));
        }
    }

    TEST_CASE("free_vars examples") {
        CHECK(free_vars(P("a(X).X<\\(Z).0>")).empty());
        auto fv = free_vars(P("X<\\(Z).0> | a(Y).Y<\\(Z).0>"));
        CHECK(fv.process == std::set<std::string>{"X"});
        CHECK(free_vars(trigger("m")).empty());
    }
}

TEST_SUITE("sorts") {
    TEST_CASE("sort_check examples") {
        CHECK(sort_check(P("\\(X). a!<X>.0"), D1) == Sort::abs_D(1));
        CHECK(sort_check(P("\\(x). x!<\\(y).0>.0", d1), d1) == Sort::abs_d(1));
        Term server = parse_term("!m(z).X<z>", d1, {.check_sorts = false});
        CHECK_THROWS_AS(sort_check(server, d1), SortError);
    }

    TEST_CASE("process payloads are rejected in parameterized calculi") {
        CHECK_THROWS_AS(P("a!<0>"), SortError);
        CHECK_NOTHROW(parse_term("a!<0>", CalcId::pi()));
        CHECK_THROWS_AS(parse_term("a!<\\(Z).0>", CalcId::pi()), SortError);
    }

    TEST_CASE("arity and parameter kinds") {
        CHECK_THROWS_AS(P("\\(X, Y). 0"), SortError);
        CHECK(sort_check(P("\\(X, Y). 0", CalcId::pi_D(2)), CalcId::pi_D(2)) == Sort::abs_D(2));
        CHECK_THROWS_AS(P("\\(x). 0"), SortError);
        CHECK_THROWS_AS(P("\\(X). 0", d1), SortError);
        // curried abstraction is a distinct sort
        CHECK(sort_check(P("\\(X). \\(Y). 0"), D1) == Sort::abs_D(1, 2));
        CHECK_THROWS_AS(P("a!<\\(X). \\(Y). 0>"), SortError);
    }

    TEST_CASE("redundant parameters are accepted") {
        const CalcId D2 = CalcId::pi_D(2);
        CHECK(sort_check(P("\\(X1, X2). X1<\\(Z1, Z2).0, \\(Z1, Z2).0>", D2), D2) == Sort::abs_D(2));
    }

    TEST_CASE("sort preservation under substitution") {
        testing::TermGenerator gen(11);
        for (int i = 0; i < 200; ++i) {
            Term body = gen.process(10);
            Term open = par(body, app(var("X"), {dummy_payload(D1)}));
            Term a = gen.abstraction(6);
            CHECK(sort_check(subst_terms_checked(open, {{"X", a}}, D1), D1) == sort_check(open, D1));
        }
        CHECK_THROWS_AS(subst_terms_checked(P("X<\\(Z).0>"), {{"X", nil()}}, D1), SortError);
    }
}

TEST_SUITE("substitution") {
    TEST_CASE("name substitution examples") {
        Term t = output(Name::variable("x"), dummy_payload(d1));
        CHECK(subst_names(t, {{Name::variable("x"), c("d")}}) == output(c("d"), dummy_payload(d1)));
        Term s = P("new c. a!<\\(Z).0>.c!<\\(Z).0>");
        CHECK(alpha_equal(subst_names(s, {{c("a"), c("a")}}), s));
    }

    TEST_CASE("name substitution renames a capturing restriction") {
        // (new d. x!.d!){d/x}: the bound d must move out of the way.
        Term t = res("d", output(Name::variable("x"), dummy_payload(d1),
                                 output(c("d"), dummy_payload(d1))));
        Term r = subst_names(t, {{Name::variable("x"), c("d")}});
        REQUIRE(r.is(Term::Kind::Res));
        const auto& n = r.as<node::Res>();
        CHECK(n.binder != "d");
        CHECK(free_names(r) == std::set<std::string>{"d"});
        Term expected = res(n.binder, output(c("d"), dummy_payload(d1),
                                             output(c(n.binder), dummy_payload(d1))));
        CHECK(r == expected);
    }

    TEST_CASE("higher-order substitution keeps the trigger's name free") {
        Term t = P("new m. X<\\(Z).0>");
        Term r = subst_terms(t, {{"X", trigger("m")}});
        CHECK(free_names(r) == std::set<std::string>{"m"});
        REQUIRE(r.is(Term::Kind::Res));
        CHECK(r.as<node::Res>().binder != "m");
        CHECK(alpha_equal(normalize(r), P("m!<\\(Z).0>")));
    }

    TEST_CASE("higher-order substitution examples") {
        Term a = P("\\(Z). a!<Z>");
        CHECK(subst_terms(var("X"), {{"X", a}}) == a);
        Term r = subst_terms(P("X<\\(Z).0> | X<\\(Z).0>"), {{"X", a}});
        CHECK(normalize(r) == normalize(P("a!<\\(Z).0> | a!<\\(Z).0>")));
    }

    TEST_CASE("substitution lemma for names") {
        testing::TermGenerator gen(23);
        for (int i = 0; i < 200; ++i) {
            Term t = gen.process(12);
            Term via_b = subst_names(subst_names(t, {{c("a"), c("q")}}), {{c("q"), c("b")}});
            Term direct = subst_names(t, {{c("a"), c("b")}});
            CHECK(alpha_equal(via_b, direct));
        }
    }

    TEST_CASE("free names of a substitution instance") {
        testing::TermGenerator gen(29);
        for (int i = 0; i < 200; ++i) {
            Term t = par(gen.process(8), app(var("X"), {dummy_payload(D1)}));
            Term a = gen.abstraction(6);
            auto fn = free_names(subst_terms(t, {{"X", a}}));
            auto bound = free_names(t);
            auto fa = free_names(a);
            bound.insert(fa.begin(), fa.end());
            for (const auto& n : fn) CHECK(bound.count(n));
        }
    }
}

TEST_SUITE("alpha equivalence") {
    TEST_CASE("alpha_canonical examples") {
        CHECK(alpha_canonical(P("a(X).X<\\(Z).0>")) == alpha_canonical(P("a(Z).Z<\\(Z).0>")));
        CHECK(alpha_canonical(P("new c. c!<\\(Z).0>")) == alpha_canonical(P("new d. d!<\\(Z).0>")));
        Term t = alpha_canonical(P("new e. a(Y).e!<Y>"));
        CHECK(alpha_canonical(t) == t);
        CHECK_FALSE(alpha_equal(P("a(X).X<\\(Z).0>"), P("a(X).b!<\\(Z).0>")));
    }

    TEST_CASE("alpha_canonical avoids free names and re-parses") {
        Term t = P("new c. new d. (c!<\\(X). X<\\(Y).0>> | d(X).X<\\(Z).c!<Z>>) | c!<\\(Z).0>");
        Term k = alpha_canonical(t);
        CHECK(alpha_equal(k, t));
        CHECK(free_names(k) == free_names(t));
        CHECK(parse_term(print_term(k, {.resugar = false}), D1) == k);
    }

    TEST_CASE("alpha_canonical is idempotent and invariant under renaming") {
        testing::TermGenerator gen(31);
        for (int i = 0; i < 300; ++i) {
            Term t = gen.process(12);
            Term k = alpha_canonical(t);
            CHECK(alpha_canonical(k) == k);
            Term renamed = freshen_binders(t, all_ids(t));
            CHECK(alpha_canonical(renamed) == k);
        }
    }
}

TEST_SUITE("derived operators") {
    TEST_CASE("trigger shape") {
        CHECK(print_term(trigger("m")) == "\\(Z). m!<Z>.0");
        CHECK(free_names(trigger("m")) == std::set<std::string>{"m"});
    }

    TEST_CASE("tau encoding is resugared") {
        Term t = encode_tau(P("a!"), D1);
        CHECK(sort_check(t, D1) == Sort::proc());
        CHECK(print_term(t) == "tau.a!<\\(Z). 0>.0");
        REQUIRE(match_tau(t));
        CHECK(*match_tau(t) == P("a!"));
    }

    TEST_CASE("replication encoding sort-checks in every calculus") {
        for (CalcId calc : {CalcId::pi(), D1, d1, CalcId::pi_D(2)}) {
            Prefix phi = Prefix::in(c("m"), "Y");
            Term body = calc.family == CalcId::Family::Pi ? nil() : output(c("b"), dummy_payload(calc));
            Term t = encode_replication(phi, body, calc);
            CAPTURE(calc.to_string());
            CHECK(sort_check(t, calc) == Sort::proc());
            REQUIRE(match_replication(t));
            CHECK(match_replication(t)->body == body);
        }
    }
}

TEST_SUITE("term json") {
    TEST_CASE("round trip on generated terms") {
        testing::TermGenerator gen(31);
        for (int i = 0; i < 200; ++i) {
            Term t = i % 2 ? gen.process(14) : gen.abstraction(10);
            CAPTURE(print_term(t));
            CHECK(term_from_json(term_to_json(t)) == t);
        }
        Term w = P("(\\(x). x!<\\(y). 0>.0)<d>", d1);
        CHECK(term_from_json(term_to_json(w)) == w);
    }

    TEST_CASE("schema") {
        auto j = term_to_json(P("new c. a!<\\(Z). c!>.b(X). X<\\(Y). 0>"));
        CHECK(j["kind"] == "res");
        CHECK(j["body"]["kind"] == "output");
        CHECK(j["body"]["subject"]["id"] == "a");
        CHECK(j["body"]["payload"]["kind"] == "abs");
        CHECK(j["body"]["cont"]["binder"] == "X");
    }

    TEST_CASE("malformed") {
        CHECK_THROWS_AS(term_from_json(nlohmann::json{{"kind", "bogus"}}), HopiError);
        CHECK_THROWS_AS(term_from_json(nlohmann::json{{"kind", "var"}}), HopiError);
        CHECK_THROWS_AS(term_from_json(nlohmann::json::array()), HopiError);
    }
}
