#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "anyk/value.hpp"

namespace anyk {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Query text does not follow the grammar. Line and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// The query does not match the loaded data (unknown relation, arity,
/// column types, missing weight-table entries).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

/// A variable name or a constant (selection).
class Term {
 public:
  static Term variable(std::string name) { return Term(std::move(name)); }
  static Term constant(Value v) { return Term(std::move(v)); }

  bool is_variable() const { return std::holds_alternative<std::string>(data_); }
  const std::string& var() const { return std::get<std::string>(data_); }
  const Value& value() const { return std::get<Value>(data_); }

  friend bool operator==(const Term&, const Term&) = default;

 private:
  explicit Term(std::string name) : data_(std::move(name)) {}
  explicit Term(Value v) : data_(std::move(v)) {}
  std::variant<std::string, Value> data_;
};

struct Atom {
  std::string relation;
  std::vector<Term> terms;

  /// Distinct variables in column order.
  std::vector<std::string> variables() const;
  bool contains(const std::string& var) const;
  friend bool operator==(const Atom&, const Atom&) = default;
};

struct ConjunctiveQuery {
  std::string name = "Q";
  std::vector<std::string> head;
  std::vector<Atom> body;

  /// Distinct body variables in order of first appearance.
  std::vector<std::string> variables() const;
  /// True when the head lists every body variable (a join query).
  bool is_join_query() const;
  friend bool operator==(const ConjunctiveQuery&, const ConjunctiveQuery&) = default;
};

std::string to_string(const ConjunctiveQuery& q);

// ---------------------------------------------------------------------------
// Ranking specifications
// ---------------------------------------------------------------------------

enum class Direction { Asc, Desc };

/// f(v): identity on numeric columns, or a named weight table.
struct WeightTerm {
  std::string variable;
  std::optional<std::string> table;
  friend bool operator==(const WeightTerm&, const WeightTerm&) = default;
};

struct LexOrder {
  std::vector<std::string> variables;
  Direction direction = Direction::Asc;
};

struct SumOrder {
  std::vector<WeightTerm> terms;
  Direction direction = Direction::Asc;
};

struct TupleWeightOrder {
  Direction direction = Direction::Asc;
};

struct MaxOrder {
  std::vector<WeightTerm> terms;
  Direction direction = Direction::Asc;
};

using RankingSpec = std::variant<LexOrder, SumOrder, TupleWeightOrder, MaxOrder>;

std::string to_string(const RankingSpec& spec);

struct ParsedQuery {
  ConjunctiveQuery query;
  RankingSpec ranking;
};

// ---------------------------------------------------------------------------
// Data
// ---------------------------------------------------------------------------

struct Relation {
  std::string name;
  std::vector<std::string> columns;
  std::vector<ValueTag> tags;
  std::vector<std::vector<Value>> tuples;
  /// Per-tuple weight w(t), aligned with `tuples` when present.
  std::optional<std::vector<double>> weights;

  std::size_t arity() const { return columns.size(); }
  std::size_t size() const { return tuples.size(); }

  /// Appends a tuple; checks arity and column tags (fixing tags on the
  /// first tuple of an untyped relation). Throws SchemaError.
  void add(std::vector<Value> tuple, std::optional<double> weight = std::nullopt);
  /// Removes duplicate tuples, keeping the first occurrence (and its weight).
  void deduplicate();
};

using WeightTable = std::unordered_map<Value, double, ValueHash>;

struct Database {
  std::map<std::string, Relation> relations;
  std::map<std::string, WeightTable> weight_tables;

  /// Total tuple count n.
  std::size_t size() const;
  const Relation& relation(const std::string& name) const;
  Relation& add_relation(Relation r);
};

/// Checks the query and ranking against the data: relations exist, arities
/// match, every variable binds columns of one tag, constants match column
/// tags, ranking variables are body variables, weight tables cover every
/// value their variable can take, identity weights only on numeric columns,
/// tuple weights exist for TUPLEWEIGHT. Throws SchemaError.
void validate(const ParsedQuery& pq, const Database& db);

// ---------------------------------------------------------------------------
// Answers and weights
// ---------------------------------------------------------------------------

using Assignment = std::map<std::string, Value>;

struct Answer {
  /// Values in head order.
  std::vector<Value> values;
  /// SUM / TUPLEWEIGHT / MAX weight; absent for lexicographic orders.
  std::optional<double> weight;
};

/// Lex: the values of L in order. Otherwise the aggregate.
using AnswerWeight = std::variant<std::vector<Value>, double>;

/// f(v) for one term; throws SchemaError on a table miss or text identity.
double term_weight(const WeightTerm& term, const Value& v, const Database& db);

/// Weight of a full assignment. TUPLEWEIGHT looks up the tuple each atom
/// matches, so it needs the query and the database.
AnswerWeight answer_weight(const Assignment& a, const RankingSpec& spec,
                           const ConjunctiveQuery& q, const Database& db);

/// Three-way comparison of two Lex keys honouring the direction.
int compare_lex_keys(const std::vector<Value>& a, const std::vector<Value>& b,
                     Direction direction);

}  // namespace anyk
