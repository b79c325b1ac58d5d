#include "hopi/sugar.hpp"

namespace hopi {

Term Prefix::then(Term cont) const {
    if (kind == Kind::In) return input(subject, binder, std::move(cont), binder_kind);
    return output(subject, payload, std::move(cont));
}

namespace {

std::set<std::string> prefix_ids(const Prefix& p, const Term& body) {
    std::set<std::string> ids = all_ids(body);
    ids.insert(p.subject.id);
    if (p.kind == Prefix::Kind::In)
        ids.insert(p.binder);
    else
        collect_ids(p.payload, ids);
    return ids;
}

bool is_dummy_app(const Term& k, const std::string& x, const std::string& c) {
    if (k.is(Term::Kind::Var)) return k.as<node::Var>().id == x;
    if (!k.is(Term::Kind::App)) return false;
    const auto& a = k.as<node::App>();
    if (!a.op.is(Term::Kind::Var) || a.op.as<node::Var>().id != x || a.args.empty()) return false;
    for (const auto& arg : a.args) {
        if (const auto* tm = std::get_if<Term>(&arg)) {
            if (!tm->is(Term::Kind::Abs) || !is_dummy_payload(*tm) || !free_vars(*tm).empty())
                return false;
        } else if (std::get<Name>(arg) != Name::constant(c)) {
            return false;
        }
    }
    return true;
}

}  // namespace

Term encode_tau(const Term& body, const CalcId& calc) {
    std::set<std::string> ids = all_ids(body);
    std::string c = fresh_id("c", ids);
    ids.insert(c);
    std::string x = fresh_id("X", ids);
    return res(c, par(input(Name::constant(c), x, body), output(Name::constant(c), dummy_payload(calc))));
}

Term encode_replication(const Prefix& prefix, const Term& body, const CalcId& calc) {
    std::set<std::string> ids = prefix_ids(prefix, body);
    std::string c = fresh_id("c", ids);
    ids.insert(c);
    std::string x = fresh_id("X", ids);
    ids.insert(x);
    const Name chan = Name::constant(c);

    Term reinstantiate = var(x);
    if (calc.family == CalcId::Family::PiD) {
        std::vector<Arg> args(static_cast<std::size_t>(calc.arity), Arg{dummy_payload(calc)});
        reinstantiate = app(var(x), std::move(args));
    } else if (calc.family == CalcId::Family::Pid) {
        std::vector<Arg> args(static_cast<std::size_t>(calc.arity), Arg{chan});
        reinstantiate = app(var(x), std::move(args));
    }
    Term server = input(chan, x, par(prefix.then(par(reinstantiate, body)), output(chan, var(x))));

    Term carried = server;
    if (calc.parameterized()) {
        std::vector<std::string> params;
        const bool names = calc.family == CalcId::Family::Pid;
        for (int i = 0; i < calc.arity; ++i) {
            std::string p = fresh_id(names ? "v" : "V", ids);
            ids.insert(p);
            params.push_back(p);
        }
        carried = abs(std::move(params), server, names ? ParamKind::Name : ParamKind::Process);
    }
    return res(c, par(server, output(chan, carried)));
}

std::optional<Term> match_tau(const Term& t) {
    if (!t.is(Term::Kind::Res)) return std::nullopt;
    const auto& r = t.as<node::Res>();
    std::vector<Term> comps = par_components(r.body);
    if (comps.size() != 2) return std::nullopt;
    const Name chan = Name::constant(r.binder);
    for (int i = 0; i < 2; ++i) {
        const Term& in = comps[static_cast<std::size_t>(i)];
        const Term& out = comps[static_cast<std::size_t>(1 - i)];
        if (!in.is(Term::Kind::Input) || !out.is(Term::Kind::Output)) continue;
        const auto& ip = in.as<node::Input>();
        const auto& op = out.as<node::Output>();
        if (ip.subject != chan || op.subject != chan || ip.binder_kind != ParamKind::Process)
            continue;
        if (!is_dummy_payload(op.payload) || !free_vars(op.payload).empty() ||
            !op.cont.is(Term::Kind::Nil))
            continue;
        if (free_vars(ip.body).process.contains(ip.binder) || occurs_free_name(ip.body, r.binder))
            continue;
        return ip.body;
    }
    return std::nullopt;
}

std::optional<ReplicationView> match_replication(const Term& t) {
    if (!t.is(Term::Kind::Res)) return std::nullopt;
    const auto& r = t.as<node::Res>();
    const std::string& c = r.binder;
    const Name chan = Name::constant(c);
    std::vector<Term> comps = par_components(r.body);
    if (comps.size() != 2) return std::nullopt;
    for (int i = 0; i < 2; ++i) {
        const Term& server = comps[static_cast<std::size_t>(i)];
        const Term& seed = comps[static_cast<std::size_t>(1 - i)];
        if (!server.is(Term::Kind::Input) || !seed.is(Term::Kind::Output)) continue;
        const auto& sp = server.as<node::Input>();
        const auto& so = seed.as<node::Output>();
        if (sp.subject != chan || so.subject != chan || sp.binder_kind != ParamKind::Process ||
            !so.cont.is(Term::Kind::Nil))
            continue;
        const std::string& x = sp.binder;

        // The carried copy is the server itself, possibly under an inert abstraction.
        Term carried = so.payload;
        if (carried.is(Term::Kind::Abs)) {
            const auto& a = carried.as<node::Abs>();
            FreeVars fv = free_vars(a.body);
            for (const auto& p : a.params)
                if (fv.process.contains(p) || fv.names.contains(p)) return std::nullopt;
            carried = a.body;
        }
        if (!alpha_equal(carried, server)) continue;

        std::vector<Term> inner = par_components(sp.body);
        if (inner.size() != 2) continue;
        for (int j = 0; j < 2; ++j) {
            const Term& phi = inner[static_cast<std::size_t>(j)];
            const Term& resend = inner[static_cast<std::size_t>(1 - j)];
            if (!resend.is(Term::Kind::Output)) continue;
            const auto& ro = resend.as<node::Output>();
            if (ro.subject != chan || !(ro.payload == var(x)) || !ro.cont.is(Term::Kind::Nil))
                continue;

            Prefix prefix;
            Term cont;
            if (phi.is(Term::Kind::Input)) {
                const auto& pi = phi.as<node::Input>();
                if (pi.binder == x) continue;
                prefix = Prefix::in(pi.subject, pi.binder, pi.binder_kind);
                cont = pi.body;
            } else if (phi.is(Term::Kind::Output)) {
                const auto& po = phi.as<node::Output>();
                if (free_vars(po.payload).process.contains(x) || occurs_free_name(po.payload, c))
                    continue;
                prefix = Prefix::out(po.subject, po.payload);
                cont = po.cont;
            } else {
                continue;
            }
            if (prefix.subject == chan) continue;

            std::optional<Term> body;
            if (cont.is(Term::Kind::Par) && is_dummy_app(cont.as<node::Par>().left, x, c)) {
                body = cont.as<node::Par>().right;
            } else {
                std::vector<Term> parts = par_components(cont);
                std::vector<Term> rest;
                bool found = false;
                for (const auto& p : parts) {
                    if (!found && is_dummy_app(p, x, c))
                        found = true;
                    else
                        rest.push_back(p);
                }
                if (found) body = par_all(rest);
            }
            if (!body) continue;
            if (free_vars(*body).process.contains(x) || occurs_free_name(*body, c)) continue;
            return ReplicationView{prefix, *body};
        }
    }
    return std::nullopt;
}

}  // namespace hopi

namespace hopi {

Term trigger(const std::string& m) { return abs({"Z"}, output(Name::constant(m), var("Z"))); }

}  // namespace hopi
