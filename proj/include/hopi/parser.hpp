#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "hopi/sort.hpp"
#include "hopi/term.hpp"

namespace hopi {

struct ParseOptions {
    /// Run sort_check on the result (SortError is forwarded).
    bool check_sorts = true;
};

/// Grammar (ASCII):
///   term := "0" | X | a(X).term | a!<term>.term | term "|" term | new c. term
///         | \(params). term | term<args> | !prefix. term | tau. term | (term)
/// with sugar `a` = a(X).0, `a.P` = a(X).P, `a!` = a!<dummy>.0 and an optional
/// ".0" after outputs. Application binds tighter than prefixes and
/// restriction; "|" binds loosest. Uppercase identifiers are process
/// variables, lowercase ones are names.
Term parse_term(std::string_view src, const CalcId& calc, const ParseOptions& opts = {});

struct Definition {
    std::string name;
    CalcId calc;
    Term body;
    int line = 0;
    int col = 0;
};

/// Named, closed, sort-checked terms loaded from a definition file.
class DefEnv {
public:
    void add(Definition def);
    const Definition* find(const std::string& name) const;
    std::size_t size() const { return defs_.size(); }
    const std::map<std::string, Definition>& entries() const { return defs_; }

private:
    std::map<std::string, Definition> defs_;
};

/// Parses `def NAME [calc] = term ;` entries (calc defaults to PiD 1); `//`
/// starts a comment.
DefEnv parse_defs(std::string_view text);
DefEnv load_defs(const std::filesystem::path& path);

}  // namespace hopi
