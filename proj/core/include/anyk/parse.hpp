#pragma once

#include <string_view>

#include "anyk/query.hpp"

namespace anyk {

/// Parses a query file:
///
///   [QUERY] Name(vars) :- Rel(term, ...), ... [;]
///   [ORDER BY LEX v1, v2, ... [ASC|DESC] [;]]
///   [ORDER BY SUM t1 + t2 + ... [ASC|DESC] [;]]
///   [ORDER BY MAX t1, t2, ... [ASC|DESC] [;]]
///   [ORDER BY TUPLEWEIGHT [ASC|DESC] [;]]
///
/// A weight term is `v` (identity) or `w:table(v)`. The head may be `*` or
/// `..` for all body variables, and `x1..x5` expands to x1, x2, ..., x5.
/// Without ORDER BY the answers are ranked by LEX over the head. Lines
/// starting with `#` or `--` are comments.
///
/// Throws ParseError on syntax errors and unknown ORDER BY variables. When
/// `schema` is given, the result is also validated against it (SchemaError).
ParsedQuery parse_query(std::string_view text, const Database* schema = nullptr);

}  // namespace anyk
