#pragma once

#include <utility>

#include "anyk/query.hpp"

namespace anyk {

/// Gives every atom its own relation: a relation referenced by m > 1 atoms
/// is copied to <name>1 .. <name>m and the atoms renamed. O(n) per copy.
std::pair<ConjunctiveQuery, Database> remove_self_joins(const ConjunctiveQuery& q, const Database& d);

/// Filters constants (R(x,1)) and repeated variables (R(x,x)) into the
/// relation, leaving atoms whose terms are distinct variables. Expects
/// self-joins to be removed already. O(n).
std::pair<ConjunctiveQuery, Database> apply_selections(const ConjunctiveQuery& q, const Database& d);

/// Both steps in one pass. The result holds only the relations the
/// normalized query references, plus every weight table.
std::pair<ConjunctiveQuery, Database> normalize(const ConjunctiveQuery& q, const Database& d);

}  // namespace anyk
