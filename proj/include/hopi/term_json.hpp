#pragma once

// JSON form of the abstract syntax: one object per node, tagged by "kind".

#include "json.hpp"

#include "hopi/term.hpp"

namespace hopi {

nlohmann::json term_to_json(const Term& t);

/// Inverse of term_to_json. Throws HopiError on malformed input.
Term term_from_json(const nlohmann::json& j);

}  // namespace hopi
