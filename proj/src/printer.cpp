#include "hopi/printer.hpp"

#include "hopi/sugar.hpp"

namespace hopi {

namespace {

enum Level { kPar = 0, kPrefix = 1, kApp = 2, kAtom = 3 };

class Printer {
public:
    explicit Printer(const PrintOptions& opts) : opts_(opts) {}

    void print(const Term& t, int min_level, std::string& out) const {
        if (level(t) < min_level) {
            out += '(';
            print(t, kPar, out);
            out += ')';
            return;
        }
        if (opts_.resugar && t.is(Term::Kind::Res)) {
            if (auto body = match_tau(t)) {
                out += "tau.";
                print(*body, kPrefix, out);
                return;
            }
            if (auto rep = match_replication(t)) {
                out += '!';
                print_prefix(rep->prefix, out);
                out += '.';
                print(rep->body, kPrefix, out);
                return;
            }
        }
        switch (t.kind()) {
            case Term::Kind::Nil:
                out += '0';
                break;
            case Term::Kind::Var:
                out += t.as<node::Var>().id;
                break;
            case Term::Kind::Input: {
                const auto& n = t.as<node::Input>();
                out += n.subject.id + "(" + n.binder + ").";
                print(n.body, kPrefix, out);
                break;
            }
            case Term::Kind::Output: {
                const auto& n = t.as<node::Output>();
                out += n.subject.id + "!<";
                print(n.payload, kPar, out);
                out += ">.";
                print(n.cont, kPrefix, out);
                break;
            }
            case Term::Kind::Par: {
                const auto& n = t.as<node::Par>();
                print(n.left, kPar, out);
                out += " | ";
                print(n.right, kPrefix, out);
                break;
            }
            case Term::Kind::Res: {
                const auto& n = t.as<node::Res>();
                out += "new " + n.binder + ". ";
                print(n.body, kPrefix, out);
                break;
            }
            case Term::Kind::Abs: {
                const auto& n = t.as<node::Abs>();
                out += "\\(";
                for (std::size_t i = 0; i < n.params.size(); ++i) {
                    if (i) out += ", ";
                    out += n.params[i];
                }
                out += "). ";
                print(n.body, kPrefix, out);
                break;
            }
            case Term::Kind::App: {
                const auto& n = t.as<node::App>();
                print(n.op, kApp, out);
                out += '<';
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    if (i) out += ", ";
                    if (const auto* tm = std::get_if<Term>(&n.args[i]))
                        print(*tm, kPar, out);
                    else
                        out += std::get<Name>(n.args[i]).id;
                }
                out += '>';
                break;
            }
        }
    }

private:
    static int level(const Term& t) {
        switch (t.kind()) {
            case Term::Kind::Par:
                return kPar;
            case Term::Kind::Input:
            case Term::Kind::Output:
            case Term::Kind::Res:
            case Term::Kind::Abs:
                return kPrefix;
            case Term::Kind::App:
                return kApp;
            case Term::Kind::Nil:
            case Term::Kind::Var:
                return kAtom;
        }
        return kAtom;
    }

    void print_prefix(const Prefix& p, std::string& out) const {
        if (p.kind == Prefix::Kind::In) {
            out += p.subject.id + "(" + p.binder + ")";
        } else {
            out += p.subject.id + "!<";
            print(p.payload, kPar, out);
            out += ">";
        }
    }

    PrintOptions opts_;
};

}  // namespace

std::string print_term(const Term& t, const PrintOptions& opts) {
    std::string out;
    Printer(opts).print(t, kPar, out);
    return out;
}

}  // namespace hopi
