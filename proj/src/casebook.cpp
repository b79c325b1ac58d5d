#include "hopi/casebook.hpp"

#include <algorithm>
#include <chrono>

#include "hopi/equivalence.hpp"
#include "hopi/errors.hpp"
#include "hopi/parser.hpp"
#include "hopi/printer.hpp"
#include "hopi/sugar.hpp"
#include "hopi/transforms.hpp"

namespace hopi {

void ClaimRun::expect(bool ok, std::string name, std::string detail) {
    report_.checks.push_back({std::move(name), ok, std::move(detail)});
}

namespace {

const CalcId D1 = CalcId::pi_D(1);
const CalcId d1 = CalcId::pi_d(1);

using VK = Verdict::Kind;

Term P(const std::string& s, const CalcId& calc = D1) { return parse_term(s, calc); }

nlohmann::json summary(const std::string& what, const Verdict& v) {
    nlohmann::json j = {{"what", what},
                        {"verdict", to_string(v.kind)},
                        {"states", v.states_explored},
                        {"depth_bounded", v.depth_bounded}};
    if (!v.reason.empty()) j["reason"] = v.reason;
    if (v.witness) j["witness_steps"] = v.witness->steps.size();
    return j;
}

// Records v and checks its kind; a Distinguished verdict must also replay.
void expect_verdict(ClaimRun& run, const std::string& what, const Verdict& v, VK want) {
    run.record(summary(what, v));
    std::string detail = to_string(v.kind);
    if (!v.reason.empty()) detail += " (" + v.reason + ")";
    run.expect(v.kind == want, what, detail);
    if (v.kind == VK::Distinguished && v.witness) {
        std::string why;
        run.expect(replay_witness(*v.witness, &why), what + ": witness replays", why);
    }
}

// Some reachable state of t has a visible action on `name`.
bool acts_on(const Term& t, const std::string& name, const ExploreBudget& budget) {
    Lts lts = build_lts(t, budget);
    return std::any_of(lts.edges.begin(), lts.edges.end(), [&](const Lts::Edge& e) {
        return e.action.visible() && e.action.subject == Name::constant(name);
    });
}

// ---------------------------------------------------------------------------
// Structural laws

struct LawCase {
    std::string left;
    std::string right;
};

struct Law {
    std::string id;
    std::string title;
    std::vector<LawCase> holds;
    // Instances that miss the side condition and must stay apart.
    std::vector<LawCase> fails;
};

std::vector<Law> structural_laws() {
    return {
        {"law-alpha-input",
         "renaming an input binder",
         {{"a(X). X<\\(Y). 0>", "a(Z). Z<\\(Y). 0>"},
          {"a(X). (X<\\(Y). 0> | b!)", "a(W). (W<\\(Y). 0> | b!)"},
          {"a(X). b(Y). (X<\\(Z). 0> | Y<\\(Z). 0>)", "a(Y). b(X). (Y<\\(Z). 0> | X<\\(Z). 0>)"},
          {"a(X). b!<X>.0", "a(V). b!<V>.0"},
          {"a(X). new c.(c!<X>.0 | c(Y). Y<\\(Z). 0>)", "a(U). new c.(c!<U>.0 | c(Y). Y<\\(Z). 0>)"}},
         {{"a(X). X<\\(Y). 0>", "a(X). 0"}}},
        {"law-alpha-restriction",
         "renaming a restricted name",
         {{"new c.(a!<\\(Z). c!>.0 | c)", "new d.(a!<\\(Z). d!>.0 | d)"},
          {"new c.a!<\\(Z). c!>.c", "new e.a!<\\(Z). e!>.e"},
          {"new c.new d.a!<\\(Z). (c! | d!)>.0", "new x.new y.a!<\\(Z). (x! | y!)>.0"},
          {"a(X). new c.b!<\\(Z). c!>.c", "a(X). new k.b!<\\(Z). k!>.k"},
          {"new c.(c! | c(X). a!)", "new b2.(b2! | b2(X). a!)"}},
         {{"new c.a!<\\(Z). c!>.0", "a!<\\(Z). c!>.0"}}},
        {"law-par-unit",
         "0 is a unit for parallel composition",
         {{"a! | 0", "a!"},
          {"0 | a(X). X<\\(Y). 0>", "a(X). X<\\(Y). 0>"},
          {"a(X). (X<\\(Y). 0> | 0)", "a(X). X<\\(Y). 0>"},
          {"0 | 0", "0"},
          {"new c.(c! | 0 | c(X). b!)", "new c.(c! | c(X). b!)"}},
         {}},
        {"law-par-assoc",
         "parallel composition is associative",
         {{"(a! | b!) | c!", "a! | (b! | c!)"},
          {"(a | b) | c", "a | (b | c)"},
          {"(a! | a) | a!", "a! | (a | a!)"},
          {"d(X). ((X<\\(Y). 0> | a!) | b!)", "d(X). (X<\\(Y). 0> | (a! | b!))"},
          {"new c.((c! | c) | a!)", "new c.(c! | (c | a!))"}},
         {}},
        {"law-par-comm",
         "parallel composition is commutative",
         {{"a! | b!", "b! | a!"},
          {"a | a!", "a! | a"},
          {"a(X). X<\\(Y). 0> | b!<\\(Z). c!>.0", "b!<\\(Z). c!>.0 | a(X). X<\\(Y). 0>"},
          {"d(X). (X<\\(Y). 0> | a!)", "d(X). (a! | X<\\(Y). 0>)"},
          {"new c.(c! | c(X). a!)", "new c.(c(X). a! | c!)"}},
         {{"a!.b!", "b!.a!"}}},
        {"law-res-swap",
         "adjacent restrictions commute",
         {{"new c.new d.a!<\\(Z). (c! | d)>.0", "new d.new c.a!<\\(Z). (c! | d)>.0"},
          {"new c.new d.(c! | d | a!<\\(Z). (c | d!)>.0)", "new d.new c.(c! | d | a!<\\(Z). (c | d!)>.0)"},
          {"new c.new d.a!<\\(Z). c!>.d!", "new d.new c.a!<\\(Z). c!>.d!"},
          {"b(X). new c.new d.(X<\\(Y). c!> | d)", "b(X). new d.new c.(X<\\(Y). c!> | d)"},
          {"new c.new d.new e.a!<\\(Z). (c! | d! | e!)>.0", "new e.new c.new d.a!<\\(Z). (c! | d! | e!)>.0"}},
         {}},
        {"law-res-dead-prefix",
         "a prefix on a restricted name with nothing else in scope is inert",
         {{"new c.c(X). a!", "0"},
          {"new c.c!<\\(Z). a!>.b!", "0"},
          {"new c.c!", "0"},
          {"new c.c(X). (X<\\(Y). 0> | a!)", "0"},
          {"a! | new c.c.b!", "a!"}},
         {{"new c.a(X). c!", "0"}, {"new c.(c! | c)", "0"}}},
        {"law-scope-extrusion",
         "a restriction scope extends over a component that does not mention the name",
         {{"new c.(a!<\\(Z). c!>.0 | b!)", "new c.a!<\\(Z). c!>.0 | b!"},
          {"new c.(c! | c(X). a! | b)", "new c.(c! | c(X). a!) | b"},
          {"new c.(a!<\\(Z). c>.c! | d(X). X<\\(Y). 0>)", "new c.a!<\\(Z). c>.c! | d(X). X<\\(Y). 0>"},
          {"new c.(a!<\\(Z). c!>.0 | new d.b!<\\(Z). d!>.0)", "new c.a!<\\(Z). c!>.0 | new d.b!<\\(Z). d!>.0"},
          {"e(X). new c.(X<\\(Z). c!> | a!)", "e(X). (new c.X<\\(Z). c!> | a!)"}},
         {{"new c.(c(X). 0 | c!)", "new c.c(X). 0 | c!"}}},
        {"law-beta",
         "applying an abstraction substitutes the argument",
         {{"(\\(X). X<\\(Y). 0>)<\\(Y). a!>", "a!"},
          {"(\\(X). (X<\\(Y). 0> | X<\\(Y). 0>))<\\(Y). a!>", "a! | a!"},
          {"(\\(X). b!<X>.0)<\\(Y). a!>", "b!<\\(Y). a!>.0"},
          {"(\\(X). \\(W). (X<W> | W<\\(Y). 0>))<\\(Y). a!>", "\\(W). ((\\(Y). a!)<W> | W<\\(Y). 0>)"},
          {"c(V). (\\(X). X<V>)<\\(Y). Y<\\(Z). 0>>", "c(V). V<\\(Z). 0>"}},
         {{"(\\(X). X<\\(Y). 0>)<\\(Y). a!>", "(\\(X). 0)<\\(Y). a!>"}}},
    };
}

void run_law(ClaimRun& run, const Law& law) {
    int i = 0;
    for (const auto& c : law.holds) {
        std::string tag = law.id + " #" + std::to_string(++i);
        Term l = P(c.left), r = P(c.right);
        run.expect(alpha_equal(normalize(l), normalize(r)), tag + ": same normal form",
                   print_term(normalize(l)) + " / " + print_term(normalize(r)));
        if (sort_check(l, D1).is_proc())
            expect_verdict(run, tag + ": strongly bisimilar", check_normal(l, r, Mode::Strong, run.budget()),
                           VK::BisimilarUpToBound);
    }
    i = 0;
    for (const auto& c : law.fails) {
        std::string tag = law.id + " control #" + std::to_string(++i);
        Term l = P(c.left), r = P(c.right);
        run.expect(!alpha_equal(normalize(l), normalize(r)), tag + ": different normal forms");
    }
}

std::vector<ClaimSource> law_sources(const Law& law) {
    std::vector<ClaimSource> out;
    for (const auto* cases : {&law.holds, &law.fails})
        for (const auto& c : *cases) {
            out.push_back({D1, c.left});
            out.push_back({D1, c.right});
        }
    return out;
}

// ---------------------------------------------------------------------------
// Pid: no trigger, hence no factorization

const char* kPidW = "(\\(x). x!)<d>";

void run_pid_counterexample(ClaimRun& run) {
    Term w = P(kPidW, d1);
    auto ts = transitions(w, run.budget());
    std::vector<Transition> visible;
    for (const auto& t : ts)
        if (t.action.visible()) visible.push_back(t);
    run.expect(visible.size() == 1, "W has exactly one visible transition",
               std::to_string(visible.size()) + " visible");
    if (!visible.empty()) {
        const auto& a = visible.front().action;
        run.expect(a.kind == Action::Kind::Out && a.subject == Name::constant("d"),
                   "the transition is an output on d", print_action(a));
        run.expect(alpha_equal(visible.front().target, nil()), "and W stops afterwards",
                   print_term(visible.front().target));
    }
    // The abstraction inside W behaves according to the name it is given.
    Term we = P("(\\(x). x!)<e>", d1);
    run.expect(acts_on(w, "d", run.budget()) && !acts_on(we, "d", run.budget()) && acts_on(we, "e", run.budget()),
               "the same abstraction applied to e acts on e instead");

    bool trigger_refused = false;
    std::string why;
    try {
        make_trigger("m", d1);
    } catch (const UnsupportedCalculus& e) {
        trigger_refused = true;
        why = e.what();
    }
    run.expect(trigger_refused, "make_trigger refuses Pid", why);

    bool server_refused = false;
    try {
        P("!m(z). X<z>", d1);
    } catch (const HopiError& e) {
        server_refused = true;
        why = e.what();
    }
    run.expect(server_refused, "a server passing a received name is not a Pid term", why);

    bool factorize_refused = false;
    try {
        factorize(P("X<d>", d1), "X", P("\\(x). x!", d1), d1);
    } catch (const UnsupportedCalculus& e) {
        factorize_refused = true;
        why = e.what();
    }
    run.expect(factorize_refused, "factorize refuses Pid", why);
    run.comment("In Pid an abstraction receives names, so what it does depends on the name it is "
                "applied to. A trigger standing for it would have to receive that name and forward "
                "it, and forwarding a received name is name-passing, which Pid does not have.");
}

// ---------------------------------------------------------------------------
// Name capture when plugging into a context

const char* kCaptureLeft = "new m.a!<\\(Z). m>.m!.b";
const char* kCaptureRight = "new n.a!<\\(Z). n>.n!.b";
const char* kCaptureContext = "new m.X<\\(Y). 0>";
// What plugging would give if the context's binder captured the payload's m.
const char* kCaptureNaive = "new m.(new m.(\\(Z). m)<\\(Y). 0> | m!.b)";

void run_name_capture(ClaimRun& run) {
    Term l = P(kCaptureLeft), r = P(kCaptureRight);
    run.expect(alpha_equal(normalize(l), normalize(r)), "the two terms are alpha-variants");

    ContextFamily fam = default_context_family(D1, payload_sort(D1));
    fam.contexts.push_back(P(kCaptureContext));
    fam.contexts.push_back(P("new n.X<\\(Y). 0>"));
    expect_verdict(run, "context bisimilar with binders on m and n in the family",
                   check_context(l, r, Mode::Weak, fam, run.budget()), VK::BisimilarUpToBound);

    Term ctx = P(kCaptureContext);
    for (const auto& [side, t] : {std::pair{"left", l}, std::pair{"right", r}}) {
        auto ts = transitions(t, run.budget());
        auto out = std::find_if(ts.begin(), ts.end(), [](const Transition& x) {
            return x.action.kind == Action::Kind::Out;
        });
        if (out == ts.end()) {
            run.expect(false, std::string(side) + ": has an output");
            continue;
        }
        Term plugged = plug_context(ctx, "X", out->action.extruded, out->target, out->action.payload);
        run.expect(acts_on(plugged, "b", run.budget()),
                   std::string(side) + ": plugged into new m.X<..> it still reaches b", print_term(plugged));
    }
    run.expect(!acts_on(P(kCaptureNaive), "b", run.budget()),
               "capturing the payload's m would block b");
    run.comment("Plugging renames the context's bound m away from the extruded name, so both "
                "alpha-variants behave the same in every context.");
}

// ---------------------------------------------------------------------------
// Factorization

const char* kIntroContext = "X<\\(Y). 0> | c!";
const char* kIntroPayload = "\\(Z). a!";

void run_intro(ClaimRun& run) {
    auto r = factorize(P(kIntroContext), "X", P(kIntroPayload));
    run.expect(r.kind == FactorizationResult::Case::NonParameterized, "non-parameterized case");
    run.expect(alpha_equal(normalize(r.original), normalize(P("a! | c!"))), "E[A] is a! | c!",
               print_term(normalize(r.original)));
    expect_verdict(run, "E[A] and its factorization", check_normal(r.original, r.factored, Mode::Weak, run.budget()),
                   VK::BisimilarUpToBound);
    Verdict strong = check_normal(r.original, r.factored, Mode::Strong, run.budget());
    run.record(summary("strong comparison", strong));
    run.expect(strong.kind == VK::Distinguished, "the extra communication shows in the strong game",
               to_string(strong.kind));
}

void run_factorization(ClaimRun& run, FactorizationResult::Case want) {
    int n = 0;
    for (const auto& f : factorization_fixtures()) {
        auto r = factorize(f.context, "X", f.payload);
        if (r.kind != want) continue;
        ++n;
        run.expect(!free_names(r.original).count(r.trigger_name), f.id + ": trigger name is fresh",
                   r.trigger_name);
        run.expect(sort_check(r.original, D1) == sort_check(r.factored, D1), f.id + ": sort preserved");
        Verdict v = want == FactorizationResult::Case::NonParameterized
                        ? check_normal(r.original, r.factored, Mode::Weak, run.budget())
                        : check_abstraction(r.original, r.factored, Mode::Weak, run.budget());
        expect_verdict(run, f.id + " (" + f.shape + ")", v, VK::BisimilarUpToBound);
    }
    run.expect(n >= 2, "fixtures of this case", std::to_string(n));
}

void run_server_law(ClaimRun& run, const std::string& law) {
    int n = 0;
    for (const auto& f : lemma_fixtures()) {
        if (f.law != law) continue;
        ++n;
        expect_verdict(run, f.id, check_normal(f.left, f.right, Mode::Weak, run.budget()), VK::BisimilarUpToBound);
    }
    run.expect(n >= 2, "instances", std::to_string(n));
}

// ---------------------------------------------------------------------------
// Replication

const char* kReplLeft = "!a!<\\(Z). 0>.0";
const char* kReplRight = "a!<\\(Z). 0>.!a!<\\(Z). 0>.0";

void run_replication(ClaimRun& run) {
    expect_verdict(run, "!a!<..> against one unfolding",
                   check_normal(P(kReplLeft), P(kReplRight), Mode::Weak, run.budget()), VK::BisimilarUpToBound);
    expect_verdict(run, "replicated input against one unfolding",
                   check_normal(P("!a(X). X<\\(Y). 0>"), P("a(X). (X<\\(Y). 0> | !a(X). X<\\(Y). 0>)"),
                                Mode::Weak, run.budget()),
                   VK::BisimilarUpToBound);
    expect_verdict(run, "replication is more than one copy",
                   check_normal(P(kReplLeft), P("a!<\\(Z). 0>.0"), Mode::Weak, run.budget()), VK::Distinguished);
}

// ---------------------------------------------------------------------------
// Coincidence of normal and context bisimilarity

void run_coincidence(ClaimRun& run) {
    ContextFamily fam = default_context_family(D1, payload_sort(D1));
    int agree = 0, i = 0;
    for (const auto& c : coincidence_corpus()) {
        std::string tag = "pair " + std::to_string(++i) + ": " + c.left + " / " + c.right;
        Term l = P(c.left), r = P(c.right);
        VK want = c.bisimilar ? VK::BisimilarUpToBound : VK::Distinguished;
        Verdict vn = check_normal(l, r, Mode::Weak, run.budget());
        Verdict vc = check_context(l, r, Mode::Weak, fam, run.budget());
        expect_verdict(run, tag + " [normal]", vn, want);
        expect_verdict(run, tag + " [context]", vc, want);
        if (vn.kind == vc.kind) ++agree;
    }
    run.expect(agree == i, "normal and context verdicts agree", std::to_string(agree) + "/" + std::to_string(i));
}

std::vector<Claim> build_registry() {
    std::vector<Claim> out;
    for (const auto& law : structural_laws())
        out.push_back({law.id, "Structural law: " + law.title,
                       "Structural congruence of the higher-order calculus", law_sources(law),
                       [law](ClaimRun& run) { run_law(run, law); }});

    out.push_back({"pid-counterexample", "Pid has no factorization: triggers would need name-passing",
                   "Counterexample for the name-abstraction calculus",
                   {{d1, kPidW}, {d1, "(\\(x). x!)<e>"}, {d1, "\\(x). x!"}},
                   run_pid_counterexample});
    out.push_back({"name-capture", "Plugging into a context must not capture extruded names",
                   "Remark on name capture in context bisimilarity",
                   {{D1, kCaptureLeft}, {D1, kCaptureRight}, {D1, kCaptureContext}, {D1, kCaptureNaive}},
                   run_name_capture});
    out.push_back({"intro-factorization", "A<0> | Q relates to its factorization through a trigger",
                   "Introductory factorization example",
                   {{D1, kIntroContext}, {D1, kIntroPayload}, {D1, "a! | c!"}}, run_intro});

    std::vector<ClaimSource> fixture_sources;
    for (const auto& f : factorization_fixtures()) {
        fixture_sources.push_back({D1, print_term(f.context)});
        fixture_sources.push_back({D1, print_term(f.payload)});
    }
    out.push_back({"factorization-nonparam", "Factorization when E[Tr] is a process",
                   "Factorization theorem, non-parameterized case", fixture_sources,
                   [](ClaimRun& run) { run_factorization(run, FactorizationResult::Case::NonParameterized); }});
    out.push_back({"factorization-param", "Factorization when E[Tr] is an abstraction",
                   "Factorization theorem, parameterized case", fixture_sources,
                   [](ClaimRun& run) { run_factorization(run, FactorizationResult::Case::Parameterized); }});

    const std::pair<const char*, const char*> laws[] = {
        {"prefix-commute", "A trigger server commutes with a prefix"},
        {"output-payload", "A trigger server can be copied into an output payload"},
        {"parallel-split", "A trigger server distributes over parallel composition"},
        {"application-argument", "A trigger server can be moved into an application argument"},
    };
    for (const auto& [law, title] : laws) {
        std::string l = law;
        out.push_back({"server-" + l, title, "Distributive laws of trigger servers", {},
                       [l](ClaimRun& run) { run_server_law(run, l); }});
    }

    out.push_back({"replication-unfold", "Replication is bisimilar to its one-step unfolding",
                   "Replication as a derived operator",
                   {{D1, kReplLeft}, {D1, kReplRight}, {D1, "!a(X). X<\\(Y). 0>"},
                    {D1, "a(X). (X<\\(Y). 0> | !a(X). X<\\(Y). 0>)"}},
                   run_replication});

    std::vector<ClaimSource> corpus;
    for (const auto& c : coincidence_corpus()) {
        corpus.push_back({D1, c.left});
        corpus.push_back({D1, c.right});
    }
    out.push_back({"coincidence-sampling", "Normal and context bisimilarity agree on a sample",
                   "Coincidence of normal and context bisimilarity in PiD 1", corpus, run_coincidence});
    return out;
}

}  // namespace

std::vector<CorpusPair> coincidence_corpus() {
    return {
        {"a!", "a! | 0", true},
        {"a! | b!", "b! | a!", true},
        {"tau. a!", "a!", true},
        {"new c.(c! | c(X). a!)", "a!", true},
        {"a(X). X<\\(Y). 0>", "a(Z). Z<\\(W). 0>", true},
        {"!a(X). 0", "a(X). !a(X). 0", true},
        {"a!<\\(Z). b!>.0", "a!<\\(Y). tau. b!>.0", true},
        {"a!.tau. b!", "a!.b!", true},
        {"(\\(X). X<\\(Y). 0>)<\\(Y). a!>", "a!", true},
        {"new c.c!.a! | b!", "b!", true},
        {"tau. tau. a!", "tau. a!", true},
        {"a(X). (X<\\(Y). 0> | X<\\(Y). 0>)", "a(X). (X<\\(Y). 0> | 0 | X<\\(Y). 0>)", true},
        {"a! | c!", "new m.(m!<\\(Y). 0>.0 | c! | !m(Z). (\\(W). a!)<Z>)", true},
        {"new c.(a!<\\(Z). c!>.0 | c(X). b!)", "new d.(a!<\\(Z). d!>.0 | d(X). b!)", true},
        {"a!<\\(Z). Z<\\(Y). 0>>.0", "a!<\\(Z). tau. Z<\\(Y). 0>>.0", true},

        {"a!", "b!", false},
        {"a!", "0", false},
        {"a!.b!", "b!.a!", false},
        {"a(X). 0", "0", false},
        {"a!<\\(Z). c!>.0", "a!<\\(Z). 0>.0", false},
        {"a(X). X<\\(Y). 0>", "a(X). 0", false},
        {"a(X). (X<\\(Y). 0> | X<\\(Y). 0>)", "a(X). X<\\(Y). 0>", false},
        {"new c.(c! | c(X). a! | c(X). b!)", "new c.(c! | c(X). a!)", false},
        {"a!<\\(Z). Z<\\(Y). 0>>.0", "a!<\\(Z). 0>.0", false},
        {"a!<\\(Z). c!>.0 | a(X). X<\\(Y). 0>", "a!<\\(Z). c!>.0 | a(X). 0", false},
        {"!a(X). 0", "a(X). 0", false},
        {"a!<\\(Z). b!>.0", "a!<\\(Z). (b! | b!)>.0", false},
        {"new c.a!<\\(Z). c!>.c(X). b!", "a!<\\(Z). 0>.b!", false},
        {"a(X). b!", "a(X). c!", false},
        {"a!<\\(Z). Z<\\(Y). 0>>.0", "a!<\\(Z). (Z<\\(Y). 0> | Z<\\(Y). 0>)>.0", false},
    };
}

const std::vector<Claim>& claims() {
    static const std::vector<Claim> registry = build_registry();
    return registry;
}

ClaimReport run_claim(const std::string& id, const ExploreBudget& budget) {
    const auto& all = claims();
    auto it = std::find_if(all.begin(), all.end(), [&](const Claim& c) { return c.id == id; });
    if (it == all.end()) throw UnknownClaim(id);
    ClaimRun run(budget);
    run.report().id = id;
    auto start = std::chrono::steady_clock::now();
    try {
        it->run(run);
    } catch (const HopiError& e) {
        run.expect(false, "ran to completion", e.what());
    }
    auto& rep = run.report();
    rep.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rep.passed = !rep.checks.empty() &&
                 std::all_of(rep.checks.begin(), rep.checks.end(), [](const ClaimCheck& c) { return c.ok; });
    return rep;
}

nlohmann::json report_to_json(const ClaimReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        nlohmann::json j = {{"name", c.name}, {"ok", c.ok}};
        if (!c.detail.empty()) j["detail"] = c.detail;
        checks.push_back(std::move(j));
    }
    nlohmann::json j = {{"id", r.id},
                        {"passed", r.passed},
                        {"checks", checks},
                        {"verdicts", r.verdicts},
                        {"millis", r.millis}};
    if (!r.commentary.empty()) j["commentary"] = r.commentary;
    return j;
}

}  // namespace hopi
