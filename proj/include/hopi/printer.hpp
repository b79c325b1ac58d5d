#pragma once

#include <string>

#include "hopi/term.hpp"

namespace hopi {

struct PrintOptions {
    /// Show tau and replication encodings as `tau.P` and `!phi.P`.
    bool resugar = true;
};

/// ASCII surface syntax with minimal parentheses; output is deterministic.
std::string print_term(const Term& t, const PrintOptions& opts = {});

}  // namespace hopi
