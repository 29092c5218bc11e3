#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "anyk/analysis.hpp"
#include "anyk/encoded.hpp"
#include "anyk/preprocess.hpp"
#include "anyk/query.hpp"

namespace anyk {

enum class Strategy { Lex, Sum, LexViaSum };

const char* strategy_name(Strategy s);

/// Everything decided before touching the data beyond normalization.
struct Plan {
  /// After self-join removal and selection filtering.
  ConjunctiveQuery query;
  Database data;
  RankingSpec ranking;
  Strategy strategy = Strategy::Sum;
  JoinTree tree;
  RelOrder rel;
  /// Set for LEX orders.
  std::optional<Trio> trio;
  /// The lex path found no L-consistent tree although L is trio-free.
  bool lex_fallback = false;
  /// Variables in tie-key order: first introduction along rel.
  std::vector<std::string> tie_order;
};

/// Validates against the data, normalizes, checks that the query is a join
/// query, and picks the strategy and join tree. Throws SchemaError,
/// CyclicError, or std::invalid_argument for projections.
Plan plan_query(const ParsedQuery& pq, const Database& db);

/// w(t) per atom and row for SUM and TUPLEWEIGHT plans, negated for DESC.
std::vector<std::vector<double>> signed_tuple_weights(const Plan& plan, const EncodedInstance& inst);

/// Ranked answers, one at a time. Dropping the stream releases all state.
class AnswerStream {
 public:
  struct Cursor;

  AnswerStream(std::shared_ptr<const Plan> plan, std::unique_ptr<Cursor> cursor, std::optional<std::size_t> limit);
  AnswerStream(AnswerStream&&) noexcept;
  AnswerStream& operator=(AnswerStream&&) noexcept;
  ~AnswerStream();

  /// Next answer with values in head order, or nullopt when exhausted or
  /// the limit is reached.
  std::optional<Answer> next();
  /// Like next() without decoding; false when done.
  bool advance();
  /// Current answer's values / weight after advance().
  Answer current() const;

  const Plan& plan() const { return *plan_; }
  const std::vector<std::string>& tie_order() const { return plan_->tie_order; }
  std::size_t emitted() const;
  std::size_t frontier_size() const;
  const PreprocessStats& stats() const;
  /// Rows of the current answer per rel position (encoded ids).
  std::vector<std::uint32_t> current_rows() const;
  const EncodedInstance& instance() const;
  /// Human-readable preprocessing report: plan, survivors, group counts.
  std::string explain() const;

 private:
  std::shared_ptr<const Plan> plan_;
  std::unique_ptr<Cursor> cursor_;
  std::optional<std::size_t> limit_;
};

/// Plans, preprocesses and returns the answer stream. Lex without a trio
/// uses the stack enumerator over an L-consistent tree; Lex with a trio
/// (or without an L-consistent tree) uses exact SUM weights; the other
/// orders use the priority-queue enumerator.
AnswerStream enumerate(const ParsedQuery& pq, const Database& db, std::optional<std::size_t> limit = std::nullopt);

}  // namespace anyk
