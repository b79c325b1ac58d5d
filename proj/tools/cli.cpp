#include "hopi/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <iterator>
#include <set>

#include "CLI11.hpp"

#include "hopi/casebook.hpp"
#include "hopi/equivalence.hpp"
#include "hopi/errors.hpp"
#include "hopi/parser.hpp"
#include "hopi/printer.hpp"
#include "hopi/semantics.hpp"
#include "hopi/term_json.hpp"
#include "hopi/transforms.hpp"

namespace hopi {

namespace {

using json = nlohmann::json;

struct Options {
    std::string calc = "PiD1";
    std::string format = "text";
    std::string defs;
    int max_states = 10000;
    int max_tau_chain = 16;
    int max_depth = 12;
};

class Session {
public:
    Session(const Options& opts, bool calc_given, bool states_given, std::istream& in)
        : opts_(opts), calc_given_(calc_given), in_(in) {
        calc_ = CalcId::parse(opts.calc);
        budget_.max_states = opts.max_states;
        budget_.max_tau_chain = opts.max_tau_chain;
        budget_.max_depth = opts.max_depth;
        if (!states_given) {
            if (const char* env = std::getenv("HOPI_BUDGET_STATES"); env && *env) {
                try {
                    std::size_t used = 0;
                    budget_.max_states = std::stoi(env, &used);
                    if (env[used] != '\0') throw std::invalid_argument(env);
                } catch (const std::logic_error&) {
                    throw HopiError(std::string("HOPI_BUDGET_STATES is not a number: '") + env + "'");
                }
            }
        }
        if (budget_.max_states < 1 || budget_.max_depth < 0 || budget_.max_tau_chain < 0)
            throw HopiError("budgets must be positive");
        if (!opts.defs.empty()) defs_ = load_defs(opts.defs);
    }

    const CalcId& calc() const { return calc_; }
    const ExploreBudget& budget() const { return budget_; }
    const std::string& format() const { return opts_.format; }
    bool json_out() const { return opts_.format == "json"; }

    /// A definition name, "-" for the input stream, or surface syntax.
    Term term(const std::string& arg) {
        if (arg == "-") {
            std::string text((std::istreambuf_iterator<char>(in_)), std::istreambuf_iterator<char>());
            return parse_term(text, calc_);
        }
        if (const Definition* d = defs_.find(arg)) {
            if (d->calc != calc_) {
                if (calc_given_)
                    throw SortError("", "definition '" + arg + "' is in " + d->calc.to_string() +
                                            ", not " + calc_.to_string());
                calc_ = d->calc;
            }
            return d->body;
        }
        return parse_term(arg, calc_);
    }

    void text_only(const char* command) const {
        if (opts_.format == "dot")
            throw HopiError(std::string("--format dot applies to lts, not ") + command);
    }

private:
    Options opts_;
    bool calc_given_;
    std::istream& in_;
    CalcId calc_;
    ExploreBudget budget_;
    DefEnv defs_;
};

int exit_for(Verdict::Kind k) {
    switch (k) {
        case Verdict::Kind::BisimilarUpToBound:
            return kExitOk;
        case Verdict::Kind::Distinguished:
            return kExitDistinguished;
        case Verdict::Kind::Inconclusive:
            return kExitInconclusive;
    }
    return kExitError;
}

// ---------------------------------------------------------------------------

struct ParseArgs {
    std::string term;
    bool raw = false;
    bool elaborate = false;
};

int cmd_parse(Session& s, const ParseArgs& a, std::ostream& out) {
    s.text_only("parse");
    Term t = s.term(a.term);
    Sort sort = sort_check(t, s.calc());
    Term shown = a.raw ? t : normalize(t);
    std::string printed = print_term(shown, PrintOptions{.resugar = !a.elaborate});
    if (s.json_out()) {
        json j = {{"calc", s.calc().to_string()},
                  {"sort", sort.to_string()},
                  {"term", printed},
                  {"ast", term_to_json(shown)}};
        out << j.dump(2) << "\n";
    } else {
        out << printed << "\n";
    }
    return kExitOk;
}

struct TraceArgs {
    std::string term;
    int per_state = 8;
    int depth = 3;
};

json trace_json(const Term& t, const ExploreBudget& b, const TraceArgs& a, int depth,
                std::set<std::string>& seen) {
    json moves = json::array();
    if (depth >= a.depth) return moves;
    auto ts = transitions(t, b);
    for (int i = 0; i < static_cast<int>(ts.size()) && i < a.per_state; ++i) {
        json m = {{"action", print_action(ts[i].action)}, {"target", print_term(ts[i].target)}};
        if (seen.insert(term_key(ts[i].target)).second)
            m["next"] = trace_json(ts[i].target, b, a, depth + 1, seen);
        else
            m["seen"] = true;
        moves.push_back(std::move(m));
    }
    return moves;
}

void trace_text(const Term& t, const ExploreBudget& b, const TraceArgs& a, int depth,
                std::set<std::string>& seen, std::ostream& out) {
    if (depth >= a.depth) return;
    auto ts = transitions(t, b);
    std::string indent(2 * (depth + 1), ' ');
    for (int i = 0; i < static_cast<int>(ts.size()) && i < a.per_state; ++i) {
        out << indent << print_action(ts[i].action) << " -> " << print_term(ts[i].target);
        if (!seen.insert(term_key(ts[i].target)).second) {
            out << "  (seen)\n";
            continue;
        }
        out << "\n";
        trace_text(ts[i].target, b, a, depth + 1, seen, out);
    }
    if (static_cast<int>(ts.size()) > a.per_state)
        out << indent << "... " << ts.size() - a.per_state << " more\n";
}

int cmd_trace(Session& s, const TraceArgs& a, std::ostream& out) {
    s.text_only("trace");
    Term t = normalize(s.term(a.term));
    sort_check(t, s.calc());
    std::set<std::string> seen{term_key(t)};
    if (s.json_out()) {
        json j = {{"term", print_term(t)}, {"transitions", trace_json(t, s.budget(), a, 0, seen)}};
        out << j.dump(2) << "\n";
    } else {
        out << print_term(t) << "\n";
        trace_text(t, s.budget(), a, 0, seen, out);
    }
    return kExitOk;
}

int cmd_lts(Session& s, const std::string& src, std::ostream& out) {
    Term t = s.term(src);
    sort_check(t, s.calc());
    Lts lts = build_lts(t, s.budget());
    if (s.json_out())
        out << lts_to_json(lts).dump(2) << "\n";
    else
        out << lts_to_dot(lts);
    return kExitOk;
}

struct CheckArgs {
    std::string left, right;
    std::string relation = "normal";
    std::string mode = "weak";
};

void witness_text(const Witness& w, std::ostream& out) {
    out << "witness:\n";
    int i = 0;
    for (const auto& st : w.steps) {
        const char* mover = st.side == 0 ? "left" : "right";
        const char* other = st.side == 0 ? "right" : "left";
        out << "  " << ++i << ". " << mover << ": " << print_action(st.action) << " -> "
            << print_term(st.after) << "\n";
        if (st.final) {
            out << "     " << other << " has no move with this label\n";
            continue;
        }
        out << "     " << other << " replies " << print_action(st.defender_action) << " -> "
            << print_term(st.defender_after) << "\n";
        if (st.context_index >= 0) out << "     in context #" << st.context_index << "\n";
    }
}

int cmd_check(Session& s, const CheckArgs& a, std::ostream& out) {
    s.text_only("check");
    Term p = s.term(a.left);
    Term q = s.term(a.right);
    Sort sp = sort_check(p, s.calc()), sq = sort_check(q, s.calc());
    if (!(sp == sq))
        throw SortError("", "cannot compare " + sp.to_string() + " with " + sq.to_string());
    Mode mode = a.mode == "strong" ? Mode::Strong : Mode::Weak;
    Verdict v;
    if (!sp.is_proc()) {
        v = check_abstraction(p, q, mode, s.budget(), s.calc());
    } else if (a.relation == "normal") {
        v = check_normal(p, q, mode, s.budget(), s.calc());
    } else {
        std::set<std::string> names = free_names(p);
        for (const auto& n : free_names(q)) names.insert(n);
        ContextFamily fam = default_context_family(s.calc(), payload_sort(s.calc()), {names.begin(), names.end()});
        v = check_context(p, q, mode, fam, s.budget(), s.calc());
    }
    std::string why;
    bool replays = v.witness && replay_witness(*v.witness, &why);
    if (s.json_out()) {
        json j = verdict_to_json(v);
        if (v.witness) j["replays"] = replays;
        out << j.dump(2) << "\n";
    } else {
        out << "verdict: " << to_string(v.kind);
        if (!v.reason.empty()) out << " (" << v.reason << ")";
        out << "\nstates: " << v.states_explored;
        if (v.depth_bounded) out << " (depth bound reached)";
        out << "\n";
        if (v.witness) {
            witness_text(*v.witness, out);
            out << "replay: " << (replays ? "ok" : "failed: " + why) << "\n";
        }
    }
    return exit_for(v.kind);
}

struct FactorizeArgs {
    std::string context;
    std::string payload;
    std::string hole = "X";
    bool verify = false;
};

int cmd_factorize(Session& s, const FactorizeArgs& a, std::ostream& out) {
    s.text_only("factorize");
    Term e = s.term(a.context);
    Term p = s.term(a.payload);
    FactorizationResult r = factorize(e, a.hole, p, s.calc());
    bool param = r.kind == FactorizationResult::Case::Parameterized;
    std::optional<Verdict> v;
    if (a.verify)
        v = param ? check_abstraction(r.original, r.factored, Mode::Weak, s.budget(), s.calc())
                  : check_normal(r.original, r.factored, Mode::Weak, s.budget(), s.calc());
    if (s.json_out()) {
        json j = {{"original", print_term(r.original)},
                  {"factored", print_term(r.factored)},
                  {"trigger", r.trigger_name},
                  {"case", param ? "parameterized" : "non-parameterized"},
                  {"k", r.k}};
        if (v) j["verdict"] = verdict_to_json(*v);
        out << j.dump(2) << "\n";
    } else {
        out << print_term(r.factored) << "\n";
        if (v) out << "verdict: " << to_string(v->kind) << "\n";
    }
    return v ? exit_for(v->kind) : kExitOk;
}

int cmd_replicate(Session& s, const std::string& src, std::ostream& out) {
    s.text_only("replicate");
    Term t = s.term(src);
    sort_check(t, s.calc());
    // Canonical binders replace the reserved ones so the output parses again.
    t = alpha_canonical(t);
    std::string printed = print_term(t, PrintOptions{.resugar = false});
    if (s.json_out())
        out << json{{"term", printed}, {"ast", term_to_json(t)}}.dump(2) << "\n";
    else
        out << printed << "\n";
    return kExitOk;
}

struct ClaimsArgs {
    std::vector<std::string> ids;
    bool list = false;
};

int cmd_claims(Session& s, const ClaimsArgs& a, std::ostream& out) {
    s.text_only("claims");
    std::vector<const Claim*> chosen;
    for (const auto& id : a.ids) {
        auto it = std::find_if(claims().begin(), claims().end(), [&](const Claim& c) { return c.id == id; });
        if (it == claims().end()) throw UnknownClaim(id);
        chosen.push_back(&*it);
    }
    if (a.ids.empty())
        for (const auto& c : claims()) chosen.push_back(&c);

    if (a.list) {
        if (s.json_out()) {
            json j = json::array();
            for (const auto* c : chosen)
                j.push_back({{"id", c->id}, {"title", c->title}, {"reference", c->reference}});
            out << j.dump(2) << "\n";
        } else {
            for (const auto* c : chosen) out << c->id << "  " << c->title << "\n";
        }
        return kExitOk;
    }

    bool all = true;
    json reports = json::array();
    for (const auto* c : chosen) {
        ClaimReport r = run_claim(c->id, s.budget());
        all = all && r.passed;
        if (s.json_out()) {
            reports.push_back(report_to_json(r));
            continue;
        }
        out << (r.passed ? "PASS  " : "FAIL  ") << c->id << "  (" << r.checks.size() << " checks)\n";
        for (const auto& k : r.checks)
            if (!k.ok) out << "      failed: " << k.name << (k.detail.empty() ? "" : ": " + k.detail) << "\n";
    }
    if (s.json_out())
        out << reports.dump(2) << "\n";
    else
        out << (all ? "all claims pass" : "some claims fail") << "\n";
    return all ? kExitOk : kExitDistinguished;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"Higher-order pi-calculus workbench"};
    app.name("hopi");
    app.require_subcommand(1);
    app.fallthrough();

    Options opts;
    auto* calc_opt = app.add_option("--calc", opts.calc, "Calculus: Pi, PiD<n> or Pid<n>")->capture_default_str();
    app.add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"text", "json", "dot"}))
        ->capture_default_str();
    app.add_option("--defs", opts.defs, "Definition file; its names can stand for terms");
    auto* states_opt =
        app.add_option("--max-states", opts.max_states, "State budget (HOPI_BUDGET_STATES if not given)")
            ->capture_default_str();
    app.add_option("--max-tau-chain", opts.max_tau_chain, "Longest tau chain followed")->capture_default_str();
    app.add_option("--max-depth", opts.max_depth, "Deepest pair explored")->capture_default_str();

    ParseArgs parse_args;
    auto* parse_cmd = app.add_subcommand("parse", "Parse, sort-check and print the normal form");
    parse_cmd->add_option("term", parse_args.term, "Term, definition name or - for stdin")->required();
    parse_cmd->add_flag("--raw", parse_args.raw, "Print the parsed term without normalizing");
    parse_cmd->add_flag("--elaborate", parse_args.elaborate, "Show tau and replication encodings");

    TraceArgs trace_args;
    auto* trace_cmd = app.add_subcommand("trace", "List transitions depth-first");
    trace_cmd->add_option("term", trace_args.term)->required();
    trace_cmd->add_option("-n,--per-state", trace_args.per_state, "Transitions shown per state")
        ->capture_default_str();
    trace_cmd->add_option("--depth", trace_args.depth, "Depth of the listing")->capture_default_str();

    std::string lts_term;
    auto* lts_cmd = app.add_subcommand("lts", "Export the reachable transition system (DOT or JSON)");
    lts_cmd->add_option("term", lts_term)->required();

    CheckArgs check_args;
    auto* check_cmd = app.add_subcommand("check", "Compare two terms");
    check_cmd->add_option("left", check_args.left)->required();
    check_cmd->add_option("right", check_args.right)->required();
    check_cmd->add_option("--relation", check_args.relation)
        ->check(CLI::IsMember({"normal", "context"}))
        ->capture_default_str();
    check_cmd->add_option("--mode", check_args.mode)->check(CLI::IsMember({"weak", "strong"}))->capture_default_str();

    FactorizeArgs fact_args;
    auto* fact_cmd = app.add_subcommand("factorize", "Factor an abstraction out of a context through a trigger");
    fact_cmd->add_option("context", fact_args.context, "Context with the hole free")->required();
    fact_cmd->add_option("payload", fact_args.payload, "Closed abstraction to factor out")->required();
    fact_cmd->add_option("--hole", fact_args.hole)->capture_default_str();
    fact_cmd->add_flag("--verify", fact_args.verify, "Also check the result against the original");

    std::string repl_term;
    auto* repl_cmd = app.add_subcommand("replicate", "Print a term with replication and tau elaborated");
    repl_cmd->add_option("term", repl_term)->required();

    ClaimsArgs claims_args;
    auto* claims_cmd = app.add_subcommand("claims", "Run the casebook");
    claims_cmd->add_option("ids", claims_args.ids, "Claims to run (default: all)");
    claims_cmd->add_flag("--list", claims_args.list, "List claims without running them");

    std::vector<std::string> argv_store{"hopi"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
    }

    try {
        Session s(opts, calc_opt->count() > 0, states_opt->count() > 0, in);
        if (*parse_cmd) return cmd_parse(s, parse_args, out);
        if (*trace_cmd) return cmd_trace(s, trace_args, out);
        if (*lts_cmd) return cmd_lts(s, lts_term, out);
        if (*check_cmd) return cmd_check(s, check_args, out);
        if (*fact_cmd) return cmd_factorize(s, fact_args, out);
        if (*repl_cmd) return cmd_replicate(s, repl_term, out);
        if (*claims_cmd) return cmd_claims(s, claims_args, out);
    } catch (const HopiError& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace hopi
