#pragma once

// Abstract syntax of strictly higher-order pi-calculus terms with process
// parameterization (PiD) or name parameterization (Pid).
//
// Terms are immutable handles onto shared nodes; copying a Term is cheap and
// safe across threads.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace hopi {

enum class NameKind : std::uint8_t { Constant, Variable };

/// A channel name. Constants (a, b, c, ...) may be restricted; variables
/// (x, y, z) are only bound by name abstractions in Pid.
struct Name {
    NameKind kind = NameKind::Constant;
    std::string id;

    static Name constant(std::string id) { return {NameKind::Constant, std::move(id)}; }
    static Name variable(std::string id) { return {NameKind::Variable, std::move(id)}; }

    bool is_variable() const { return kind == NameKind::Variable; }

    friend auto operator<=>(const Name&, const Name&) = default;
    friend bool operator==(const Name&, const Name&) = default;
};

/// What an abstraction (or an input prefix) binds.
enum class ParamKind : std::uint8_t { Process, Name };

class Term;

namespace node {
struct Nil;
struct Var;
struct Input;
struct Output;
struct Par;
struct Res;
struct Abs;
struct App;
}  // namespace node

class Term {
public:
    enum class Kind : std::uint8_t { Nil, Var, Input, Output, Par, Res, Abs, App };
    struct Node;

    Term();  // Nil

    Kind kind() const;
    bool is(Kind k) const { return kind() == k; }

    template <class T>
    const T& as() const;

    const Node& node() const { return *node_; }
    bool same_node(const Term& other) const { return node_ == other.node_; }

    /// Structural equality (binder names included); use alpha_equal for ≡α.
    friend bool operator==(const Term& a, const Term& b);

    explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

private:
    std::shared_ptr<const Node> node_;
};

using Arg = std::variant<Term, Name>;

namespace node {
struct Nil {};
struct Var {
    std::string id;
};
struct Input {
    Name subject;
    std::string binder;
    ParamKind binder_kind = ParamKind::Process;  // Name here means name-passing: always ill-sorted
    Term body;
};
struct Output {
    Name subject;
    Term payload;
    Term cont;
};
struct Par {
    Term left;
    Term right;
};
struct Res {
    std::string binder;  // a name constant
    Term body;
};
struct Abs {
    std::vector<std::string> params;
    ParamKind kind = ParamKind::Process;
    Term body;
};
struct App {
    Term op;
    std::vector<Arg> args;
};
}  // namespace node

struct Term::Node {
    std::variant<node::Nil, node::Var, node::Input, node::Output, node::Par, node::Res, node::Abs,
                 node::App>
        v;
};

template <class T>
const T& Term::as() const {
    return std::get<T>(node_->v);
}

// Constructors.
Term nil();
Term var(std::string id);
Term input(Name subject, std::string binder, Term body, ParamKind binder_kind = ParamKind::Process);
Term output(Name subject, Term payload, Term cont = nil());
Term par(Term left, Term right);
/// Left-associated parallel composition of all components; nil() when empty.
Term par_all(const std::vector<Term>& components);
Term res(std::string binder, Term body);
/// Nested restrictions, binders[0] outermost.
Term res_all(const std::vector<std::string>& binders, Term body);
Term abs(std::vector<std::string> params, Term body, ParamKind kind = ParamKind::Process);
Term app(Term op, std::vector<Arg> args);

/// Process variables and name variables occurring free.
struct FreeVars {
    std::set<std::string> process;
    std::set<std::string> names;
    bool empty() const { return process.empty() && names.empty(); }
};

std::set<std::string> free_names(const Term& t);
FreeVars free_vars(const Term& t);
/// Every identifier in t, bound or free, of any kind. Used for freshness.
std::set<std::string> all_ids(const Term& t);
void collect_ids(const Term& t, std::set<std::string>& out);

/// `#<base><k>` with the least k not in `avoid`. The parser refuses '#', so the
/// result never clashes with user identifiers.
std::string fresh_id(const std::string& base, const std::set<std::string>& avoid);

bool occurs_free_name(const Term& t, const std::string& id);

std::size_t node_count(const Term& t);

/// Flattened components of nested Par nodes (Nil components dropped).
std::vector<Term> par_components(const Term& t);

using NameMap = std::map<Name, Name>;
using TermMap = std::map<std::string, Term>;

/// Capture-avoiding simultaneous name substitution.
Term subst_names(const Term& t, const NameMap& map);
/// Capture-avoiding simultaneous higher-order substitution of process variables.
Term subst_terms(const Term& t, const TermMap& map);

/// Deterministic alpha representative: binders renamed in depth-first order,
/// avoiding every free identifier.
Term alpha_canonical(const Term& t);
bool alpha_equal(const Term& a, const Term& b);

/// Renames every binder of t that lies in `avoid` to a fresh reserved name.
Term freshen_binders(const Term& t, const std::set<std::string>& avoid);

std::size_t hash_value(const Term& t);

}  // namespace hopi

template <>
struct std::hash<hopi::Term> {
    std::size_t operator()(const hopi::Term& t) const { return hopi::hash_value(t); }
};
