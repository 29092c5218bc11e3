#include "anyk/engine.hpp"

#include <sstream>
#include <stdexcept>

#include "anyk/enumerate.hpp"
#include "anyk/normalize.hpp"

namespace anyk {

using boost::multiprecision::cpp_int;

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Lex: return "LEX";
    case Strategy::Sum: return "SUM";
    case Strategy::LexViaSum: return "LEX-via-SUM";
  }
  return "?";
}

Plan plan_query(const ParsedQuery& pq, const Database& db) {
  validate(pq, db);
  if (!pq.query.is_join_query()) {
    throw std::invalid_argument("enumeration needs a join query: the head must list every body variable once");
  }
  Plan plan;
  std::tie(plan.query, plan.data) = normalize(pq.query, db);
  plan.ranking = pq.ranking;
  plan.tree = build_join_tree(plan.query);  // throws CyclicError
  plan.rel = topological_rel_order(plan.tree);
  plan.strategy = Strategy::Sum;

  if (const auto* lex = std::get_if<LexOrder>(&plan.ranking)) {
    plan.trio = has_disruptive_trio(plan.query, lex->variables);
    plan.strategy = Strategy::LexViaSum;
    if (!plan.trio) {
      if (auto t = l_consistent_join_tree(plan.query, lex->variables)) {
        plan.strategy = Strategy::Lex;
        plan.tree = std::move(t->tree);
        plan.rel = std::move(t->rel);
      } else {
        plan.lex_fallback = true;
      }
    }
  }
  plan.tie_order = introduction_order(plan.query, plan.rel);
  return plan;
}

struct AnswerStream::Cursor {
  virtual ~Cursor() = default;
  virtual bool next() = 0;
  virtual std::span<const std::uint32_t> rows() const = 0;
  virtual std::optional<double> weight() const = 0;
  virtual std::size_t emitted() const = 0;
  virtual std::size_t frontier_size() const = 0;
  virtual const Reduction& reduction() const = 0;

  std::shared_ptr<const EncodedInstance> instance;
  /// (rel position, column) of each head variable.
  std::vector<std::pair<std::size_t, std::size_t>> head;
};

namespace {

class LexCursor final : public AnswerStream::Cursor {
 public:
  explicit LexCursor(std::shared_ptr<const Reduction> r) : red_(r), e_(std::move(r)) {}
  bool next() override { return e_.next(); }
  std::span<const std::uint32_t> rows() const override { return e_.rows(); }
  std::optional<double> weight() const override { return std::nullopt; }
  std::size_t emitted() const override { return e_.emitted(); }
  std::size_t frontier_size() const override { return e_.frontier_size(); }
  const Reduction& reduction() const override { return *red_; }

 private:
  std::shared_ptr<const Reduction> red_;
  LexEnumerator e_;
};

template <RankingAlgebra A, class Report>
class RankedCursor final : public AnswerStream::Cursor {
 public:
  RankedCursor(std::shared_ptr<const WeightedReduction<A>> r, Report report)
      : red_(r), e_(std::move(r)), report_(std::move(report)) {}
  bool next() override { return e_.next(); }
  std::span<const std::uint32_t> rows() const override { return e_.rows(); }
  std::optional<double> weight() const override { return report_(e_.weight()); }
  std::size_t emitted() const override { return e_.emitted(); }
  std::size_t frontier_size() const override { return e_.frontier_size(); }
  const Reduction& reduction() const override { return *red_; }

 private:
  std::shared_ptr<const WeightedReduction<A>> red_;
  RankedEnumerator<A> e_;
  Report report_;
};

template <RankingAlgebra A, class Report>
std::unique_ptr<AnswerStream::Cursor> ranked(const Plan& plan, const EncodedInstance& inst,
                                             std::vector<std::vector<typename A::Weight>> tw, const A& alg,
                                             Report report) {
  auto red = std::make_shared<WeightedReduction<A>>(dp_preprocess(inst, plan.tree, plan.rel, std::move(tw), alg));
  return std::make_unique<RankedCursor<A, Report>>(std::move(red), std::move(report));
}

LexKey lex_key(const EncodedInstance& inst, const LexOrder& lex) {
  LexKey key;
  key.direction = lex.direction;
  for (const auto& v : lex.variables) key.variables.push_back(inst.variable(v));
  return key;
}

template <class W, class Lift>
std::vector<VariableWeights<W>> term_tables(const EncodedInstance& inst, const std::vector<WeightTerm>& terms,
                                            const Database& db, Lift lift) {
  std::vector<VariableWeights<W>> out;
  for (const auto& t : terms) {
    const auto v = inst.variable(t.variable);
    VariableWeights<W> w{v, {}};
    w.by_id.reserve(inst.dictionary[v].size());
    for (const auto& value : inst.dictionary[v]) w.by_id.push_back(lift(term_weight(t, value, db)));
    out.push_back(std::move(w));
  }
  return out;
}

std::unique_ptr<AnswerStream::Cursor> make_cursor(const Plan& plan, const EncodedInstance& inst) {
  if (plan.strategy == Strategy::Lex) {
    const auto& lex = std::get<LexOrder>(plan.ranking);
    auto red = std::make_shared<Reduction>(semijoin_reduce_lex(inst, plan.tree, plan.rel, lex_key(inst, lex)));
    return std::make_unique<LexCursor>(std::move(red));
  }
  if (plan.strategy == Strategy::LexViaSum) {
    const auto key = lex_key(inst, std::get<LexOrder>(plan.ranking));
    const cpp_int n = lex_separation_bound(inst, key);
    const ExactSum alg;
    auto tw = attr_weights_to_tuple_weights(inst, plan.rel, lex_to_sum_weights(inst, key, n), alg);
    return ranked(plan, inst, std::move(tw), alg, [](const cpp_int&) { return std::optional<double>{}; });
  }
  return std::visit(
      [&](const auto& s) -> std::unique_ptr<AnswerStream::Cursor> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, LexOrder>) {
          throw std::logic_error("lexicographic order planned as SUM");
        } else if constexpr (std::is_same_v<S, MaxOrder>) {
          const LeximaxAlgebra alg{s.direction == Direction::Desc};
          auto terms = term_tables<std::vector<double>>(inst, s.terms, plan.data,
                                                        [&](double x) { return alg.lift(x); });
          auto tw = attr_weights_to_tuple_weights(inst, plan.rel, terms, alg);
          return ranked(plan, inst, std::move(tw), alg,
                        [](const std::vector<double>& w) { return std::optional<double>(w.front()); });
        } else {
          const double sign = s.direction == Direction::Desc ? -1.0 : 1.0;
          return ranked(plan, inst, signed_tuple_weights(plan, inst), DoubleSum{},
                        [sign](double w) { return std::optional<double>(sign * w + 0.0); });
        }
      },
      plan.ranking);
}

}  // namespace

std::vector<std::vector<double>> signed_tuple_weights(const Plan& plan, const EncodedInstance& inst) {
  // DESC ranks by the negated weights
  auto sign_of = [](Direction d) { return d == Direction::Desc ? -1.0 : 1.0; };
  if (const auto* sum = std::get_if<SumOrder>(&plan.ranking)) {
    const double sign = sign_of(sum->direction);
    auto terms = term_tables<double>(inst, sum->terms, plan.data, [&](double x) { return sign * x; });
    return attr_weights_to_tuple_weights(inst, plan.rel, terms, DoubleSum{});
  }
  if (const auto* tw = std::get_if<TupleWeightOrder>(&plan.ranking)) {
    std::vector<std::vector<double>> out;
    for (const auto& a : inst.atoms) {
      out.emplace_back(a.tuple_weights);
      for (auto& w : out.back()) w *= sign_of(tw->direction);
    }
    return out;
  }
  throw std::invalid_argument("tuple weights exist for SUM and TUPLEWEIGHT orders only");
}

AnswerStream::AnswerStream(std::shared_ptr<const Plan> plan, std::unique_ptr<Cursor> cursor,
                           std::optional<std::size_t> limit)
    : plan_(std::move(plan)), cursor_(std::move(cursor)), limit_(limit) {}
AnswerStream::AnswerStream(AnswerStream&&) noexcept = default;
AnswerStream& AnswerStream::operator=(AnswerStream&&) noexcept = default;
AnswerStream::~AnswerStream() = default;

bool AnswerStream::advance() {
  if (limit_ && cursor_->emitted() >= *limit_) return false;
  return cursor_->next();
}

Answer AnswerStream::current() const {
  Answer a;
  const auto rows = cursor_->rows();
  const auto& red = cursor_->reduction();
  a.values.reserve(cursor_->head.size());
  for (const auto& [pos, col] : cursor_->head) {
    const auto& atom = red.atom(pos);
    a.values.push_back(cursor_->instance->decode(atom.vars[col], atom.at(rows[pos], col)));
  }
  a.weight = cursor_->weight();
  return a;
}

std::optional<Answer> AnswerStream::next() {
  if (!advance()) return std::nullopt;
  return current();
}

std::size_t AnswerStream::emitted() const { return cursor_->emitted(); }
std::size_t AnswerStream::frontier_size() const { return cursor_->frontier_size(); }
const PreprocessStats& AnswerStream::stats() const { return cursor_->reduction().stats; }
const EncodedInstance& AnswerStream::instance() const { return *cursor_->instance; }

std::vector<std::uint32_t> AnswerStream::current_rows() const {
  const auto rows = cursor_->rows();
  return {rows.begin(), rows.end()};
}

std::string AnswerStream::explain() const {
  std::ostringstream os;
  const auto& plan = *plan_;
  const auto& red = cursor_->reduction();
  os << "query: " << to_string(plan.query) << "\n";
  os << "ranking: " << to_string(plan.ranking) << "\n";
  os << "strategy: " << strategy_name(plan.strategy);
  if (plan.trio) os << " (disruptive trio " << plan.trio->a << ", " << plan.trio->b << ", " << plan.trio->c << ")";
  if (plan.lex_fallback) os << " (no L-consistent join tree)";
  os << "\nrel:";
  for (auto a : plan.rel) os << " " << plan.query.body[a].relation;
  os << "\n";
  for (std::size_t pos = 0; pos < red.size(); ++pos) {
    const auto& node = red.layout.nodes[pos];
    os << "  " << red.atom(pos).relation << ": " << red.stats.survivors[pos] << "/" << red.atom(pos).rows
       << " tuples alive, " << red.stats.groups[pos] << " groups";
    if (node.parent >= 0) os << " (edge from " << red.atom(static_cast<std::size_t>(node.parent)).relation << ")";
    os << "\n";
  }
  os << "group folds: " << red.stats.group_folds << "\n";
  return os.str();
}

AnswerStream enumerate(const ParsedQuery& pq, const Database& db, std::optional<std::size_t> limit) {
  auto plan = std::make_shared<const Plan>(plan_query(pq, db));
  auto inst = std::make_shared<const EncodedInstance>(encode(plan->query, plan->data));
  auto cursor = make_cursor(*plan, *inst);
  cursor->instance = inst;
  for (const auto& v : plan->query.head) {
    const auto var = inst->variable(v);
    for (std::size_t pos = 0; pos < plan->rel.size(); ++pos) {
      const int col = inst->atoms[plan->rel[pos]].column_of(var);
      if (col >= 0) {
        cursor->head.emplace_back(pos, static_cast<std::size_t>(col));
        break;
      }
    }
  }
  return AnswerStream(std::move(plan), std::move(cursor), limit);
}

}  // namespace anyk
