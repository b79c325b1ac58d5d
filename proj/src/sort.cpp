#include "hopi/sort.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

#include "hopi/errors.hpp"

namespace hopi {

std::string CalcId::to_string() const {
    switch (family) {
        case Family::Pi:
            return "Pi";
        case Family::PiD:
            return "PiD " + std::to_string(arity);
        case Family::Pid:
            return "Pid " + std::to_string(arity);
    }
    return "?";
}

CalcId CalcId::parse(const std::string& text) {
    std::string compact;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)) && ch != '(' && ch != ')' && ch != '_')
            compact.push_back(ch);
    if (compact.size() < 2 || std::tolower(static_cast<unsigned char>(compact[0])) != 'p' ||
        std::tolower(static_cast<unsigned char>(compact[1])) != 'i')
        throw HopiError("unknown calculus '" + text + "' (expected Pi, PiD <n> or Pid <n>)");
    std::string rest = compact.substr(2);
    if (rest.empty()) return pi();
    char family = rest[0];
    std::string digits = rest.substr(1);
    if ((family != 'D' && family != 'd') || digits.empty() ||
        !std::all_of(digits.begin(), digits.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw HopiError("unknown calculus '" + text + "' (expected Pi, PiD <n> or Pid <n>)");
    int n = std::stoi(digits);
    if (n < 1) throw HopiError("calculus arity must be positive in '" + text + "'");
    return family == 'D' ? pi_D(n) : pi_d(n);
}

std::string Sort::to_string() const {
    std::string base;
    switch (kind) {
        case Kind::Proc:
            return "Proc";
        case Kind::AbsD:
            base = "AbsD(" + std::to_string(arity) + ")";
            break;
        case Kind::Absd:
            base = "Absd(" + std::to_string(arity) + ")";
            break;
    }
    if (depth > 1) base += "^" + std::to_string(depth);
    return base;
}

Sort payload_sort(const CalcId& calc) {
    switch (calc.family) {
        case CalcId::Family::Pi:
            return Sort::proc();
        case CalcId::Family::PiD:
            return Sort::abs_D(calc.arity);
        case CalcId::Family::Pid:
            return Sort::abs_d(calc.arity);
    }
    return Sort::proc();
}

Term dummy_payload(const CalcId& calc) {
    if (!calc.parameterized()) return nil();
    std::vector<std::string> params;
    const bool names = calc.family == CalcId::Family::Pid;
    for (int i = 0; i < calc.arity; ++i) {
        std::string p = names ? "z" : "Z";
        if (calc.arity > 1) p += std::to_string(i + 1);
        params.push_back(p);
    }
    return abs(std::move(params), nil(), names ? ParamKind::Name : ParamKind::Process);
}

bool is_dummy_payload(const Term& t) {
    if (t.is(Term::Kind::Nil)) return true;
    return t.is(Term::Kind::Abs) && t.as<node::Abs>().body.is(Term::Kind::Nil);
}

namespace {

class Checker {
public:
    explicit Checker(const CalcId& calc) : calc_(calc) {}

    Sort check(const Term& t) {
        using K = Term::Kind;
        switch (t.kind()) {
            case K::Nil:
                return Sort::proc();
            case K::Var: {
                auto it = process_vars_.find(t.as<node::Var>().id);
                return it == process_vars_.end() ? payload_sort(calc_) : it->second;
            }
            case K::Input: {
                const auto& n = t.as<node::Input>();
                check_name(n.subject, "subject");
                if (n.binder_kind == ParamKind::Name)
                    fail("input binds name variable '" + n.binder +
                         "'; name-passing is not part of any strictly higher-order calculus");
                Scoped scope(*this, "input.body");
                auto saved = bind_process(n.binder);
                expect_proc(check(n.body), "input continuation is not a process");
                restore_process(n.binder, saved);
                return Sort::proc();
            }
            case K::Output: {
                const auto& n = t.as<node::Output>();
                check_name(n.subject, "subject");
                {
                    Scoped scope(*this, "output.payload");
                    Sort s = check(n.payload);
                    if (!(s == payload_sort(calc_)))
                        fail("payload has sort " + s.to_string() + " but " + calc_.to_string() +
                             " transmits only " + payload_sort(calc_).to_string());
                }
                Scoped scope(*this, "output.cont");
                expect_proc(check(n.cont), "output continuation is not a process");
                return Sort::proc();
            }
            case K::Par: {
                const auto& n = t.as<node::Par>();
                {
                    Scoped scope(*this, "par.left");
                    expect_proc(check(n.left), "parallel component is not a process");
                }
                Scoped scope(*this, "par.right");
                expect_proc(check(n.right), "parallel component is not a process");
                return Sort::proc();
            }
            case K::Res: {
                const auto& n = t.as<node::Res>();
                Scoped scope(*this, "res.body");
                expect_proc(check(n.body), "restricted term is not a process");
                return Sort::proc();
            }
            case K::Abs:
                return check_abs(t.as<node::Abs>());
            case K::App:
                return check_app(t.as<node::App>());
        }
        return Sort::proc();
    }

private:
    struct Scoped {
        Scoped(Checker& c, const std::string& step) : c_(c) { c_.path_.push_back(step); }
        ~Scoped() { c_.path_.pop_back(); }
        Checker& c_;
    };

    [[noreturn]] void fail(const std::string& reason) const {
        std::string p;
        for (const auto& s : path_) p += (p.empty() ? "" : "/") + s;
        throw SortError(p, reason);
    }

    void expect_proc(const Sort& s, const std::string& reason) const {
        if (!s.is_proc()) fail(reason + " (has sort " + s.to_string() + ")");
    }

    void check_name(const Name& n, const std::string& role) const {
        if (!n.is_variable()) return;
        if (calc_.family != CalcId::Family::Pid)
            fail(role + " '" + n.id + "' is a name variable, which only Pid admits");
    }

    std::optional<Sort> bind_process(const std::string& id) {
        std::optional<Sort> saved;
        if (auto it = process_vars_.find(id); it != process_vars_.end()) saved = it->second;
        process_vars_[id] = payload_sort(calc_);
        return saved;
    }

    void restore_process(const std::string& id, const std::optional<Sort>& saved) {
        if (saved)
            process_vars_[id] = *saved;
        else
            process_vars_.erase(id);
    }

    Sort::Kind abs_kind() const {
        return calc_.family == CalcId::Family::PiD ? Sort::Kind::AbsD : Sort::Kind::Absd;
    }

    Sort check_abs(const node::Abs& n) {
        Scoped scope(*this, "abs.body");
        if (!calc_.parameterized()) fail("abstraction outside a parameterized calculus");
        const ParamKind expected =
            calc_.family == CalcId::Family::PiD ? ParamKind::Process : ParamKind::Name;
        if (n.kind != expected)
            fail(std::string(n.kind == ParamKind::Process ? "process" : "name") +
                 " parameterization is not part of " + calc_.to_string());
        if (static_cast<int>(n.params.size()) != calc_.arity)
            fail("abstraction has " + std::to_string(n.params.size()) + " parameters but " +
                 calc_.to_string() + " has arity " + std::to_string(calc_.arity));
        std::vector<std::string> sorted = n.params;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            fail("abstraction parameters are not pairwise distinct");
        std::vector<std::optional<Sort>> saved;
        if (n.kind == ParamKind::Process)
            for (const auto& p : n.params) saved.push_back(bind_process(p));
        Sort body = check(n.body);
        if (n.kind == ParamKind::Process)
            for (std::size_t i = n.params.size(); i-- > 0;) restore_process(n.params[i], saved[i]);
        if (body.is_proc()) return Sort{abs_kind(), calc_.arity, 1};
        if (body.kind == abs_kind() && body.arity == calc_.arity)
            return Sort{abs_kind(), calc_.arity, body.depth + 1};
        fail("abstraction body has unexpected sort " + body.to_string());
    }

    Sort check_app(const node::App& n) {
        if (!calc_.parameterized()) fail("application outside a parameterized calculus");
        Sort op;
        {
            Scoped scope(*this, "app.op");
            op = check(n.op);
        }
        if (op.kind != abs_kind())
            fail("applied term has sort " + op.to_string() + ", not an abstraction of " +
                 calc_.to_string());
        if (static_cast<int>(n.args.size()) != op.arity)
            fail("application supplies " + std::to_string(n.args.size()) +
                 " arguments to an abstraction of arity " + std::to_string(op.arity));
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            Scoped scope(*this, "app.arg" + std::to_string(i));
            const Arg& a = n.args[i];
            if (calc_.family == CalcId::Family::PiD) {
                const auto* tm = std::get_if<Term>(&a);
                if (!tm) fail("PiD applications take abstractions, not names");
                Sort s = check(*tm);
                if (!(s == payload_sort(calc_)))
                    fail("argument has sort " + s.to_string() + ", expected " +
                         payload_sort(calc_).to_string());
            } else {
                const auto* nm = std::get_if<Name>(&a);
                if (!nm) fail("Pid applications take names, not terms");
                check_name(*nm, "argument");
            }
        }
        if (op.depth <= 1) return Sort::proc();
        return Sort{op.kind, op.arity, op.depth - 1};
    }

    CalcId calc_;
    std::map<std::string, Sort> process_vars_;
    std::vector<std::string> path_;
};

}  // namespace

Sort sort_check(const Term& t, const CalcId& calc) { return Checker(calc).check(t); }

Term subst_terms_checked(const Term& t, const TermMap& map, const CalcId& calc) {
    for (const auto& [x, image] : map) {
        Sort s = sort_check(image, calc);
        if (!(s == payload_sort(calc)))
            throw SortError("", "image for " + x + " has sort " + s.to_string() + ", expected " +
                                    payload_sort(calc).to_string());
    }
    return subst_terms(t, map);
}

}  // namespace hopi
