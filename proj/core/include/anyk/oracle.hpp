#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anyk/query.hpp"

namespace anyk {

/// The materialized join would exceed the row budget.
class TooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RankedRow {
  /// Values in head order.
  std::vector<Value> values;
  /// Same convention as Answer::weight.
  std::optional<double> weight;
};

struct MaterializedResult {
  std::vector<std::string> head;
  std::vector<RankedRow> rows;
};

/// Join-then-rank: evaluates the query as written (constants, repeated
/// variables and self-joins included) with left-deep hash joins, weighs
/// every answer and sorts by (weight, values of `tie_order` ascending).
/// An empty tie_order means the head order. MAX ranks by the multiset of
/// term weights in descending order (the MAX first). Throws TooLarge when an
/// intermediate result exceeds `max_rows`.
MaterializedResult join_then_rank(const ParsedQuery& pq, const Database& db,
                                  const std::vector<std::string>& tie_order = {},
                                  std::size_t max_rows = 10'000'000);

enum class Shape { Path, Star, Tree };

const char* shape_name(Shape s);
Shape parse_shape(const std::string& s);

struct InstanceParams {
  Shape shape = Shape::Path;
  std::size_t atoms = 3;
  /// Target tuples per relation.
  std::size_t tuples = 10;
  /// Values are drawn from [0, domain).
  std::size_t domain = 5;
  int weight_lo = 0;
  int weight_hi = 9;
  /// Probability that a tuple is replaced by a random (likely dangling) one.
  double dangling = 0.2;
  /// Path only: every atom uses one relation.
  bool self_join = false;
  std::uint64_t seed = 1;
};

struct Instance {
  ParsedQuery query;
  Database db;
};

/// Reproducible random acyclic join query with data. Relations are
/// projections of `tuples` random full assignments, so with dangling = 0 no
/// tuple is dangling. Relations carry integer tuple weights in
/// [weight_lo, weight_hi], and a weight table "w" covers the domain. The
/// ranking is LEX over the head.
Instance random_instance(const InstanceParams& p);

enum class CaseKind { LexTrioFree, LexTrio, Sum, Max, TupleWeight };

const char* case_name(CaseKind k);
inline constexpr CaseKind kAllCaseKinds[] = {CaseKind::LexTrioFree, CaseKind::LexTrio, CaseKind::Sum,
                                             CaseKind::Max, CaseKind::TupleWeight};

/// A random instance (shape, size, selections, self-joins drawn from the
/// seed) with a ranking of the given kind. LexTrioFree draws L from a random
/// running-intersection order, possibly truncated; LexTrio draws a
/// permutation containing a disruptive trio.
Instance random_case(std::uint64_t seed, CaseKind kind, std::size_t max_tuples = 200);

/// Query text and CSV-like dump of an instance, for mismatch reports.
std::string dump_instance(const Instance& inst);

}  // namespace anyk
