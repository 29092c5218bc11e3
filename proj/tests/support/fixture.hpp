#pragma once

// The running-example database and small helpers shared by the tests.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "anyk/encoded.hpp"
#include "anyk/engine.hpp"
#include "anyk/parse.hpp"
#include "anyk/preprocess.hpp"

namespace anyk::test {

using Ints = std::vector<std::int64_t>;

inline Relation int_relation(const std::string& name, const std::vector<Ints>& tuples,
                             std::vector<std::string> columns = {}) {
  Relation r;
  r.name = name;
  if (columns.empty()) {
    for (std::size_t c = 0; c < (tuples.empty() ? 2 : tuples[0].size()); ++c) columns.push_back("c" + std::to_string(c));
  }
  r.columns = std::move(columns);
  for (const auto& t : tuples) {
    std::vector<Value> row;
    for (auto v : t) row.emplace_back(v);
    r.add(std::move(row));
  }
  return r;
}

/// R, S, T, U of the running example.
inline Database example_db() {
  Database db;
  db.add_relation(int_relation("R", {{1, 1}, {2, 2}, {0, 0}}));
  db.add_relation(int_relation("S", {{0, 1}, {1, 1}, {1, 2}, {2, 3}, {2, 5}}));
  db.add_relation(int_relation("T", {{0, 0}, {1, 3}, {2, 2}}));
  db.add_relation(int_relation("U", {{2, 1}, {2, 2}, {3, 8}, {3, 9}}));
  return db;
}

inline const char* kExampleBody = "Q(x1..x5) :- R(x1,x2), S(x1,x3), T(x2,x4), U(x4,x5)";

inline ParsedQuery example_query(const std::string& order) {
  return parse_query(std::string(kExampleBody) + " ORDER BY " + order);
}

inline Ints ints(const std::vector<Value>& values) {
  Ints out;
  for (const auto& v : values) out.push_back(v.as_int());
  return out;
}

/// Everything the engine builds before enumeration, for white-box tests.
struct Prepared {
  Plan plan;
  EncodedInstance inst;

  explicit Prepared(const ParsedQuery& pq, const Database& db)
      : plan(plan_query(pq, db)), inst(encode(plan.query, plan.data)) {}

  std::size_t position(const std::string& relation) const {
    for (std::size_t pos = 0; pos < plan.rel.size(); ++pos) {
      if (inst.atoms[plan.rel[pos]].relation == relation) return pos;
    }
    throw std::out_of_range(relation);
  }

  Ints tuple(std::size_t pos, std::uint32_t row) const {
    const auto& atom = inst.atoms[plan.rel[pos]];
    Ints out;
    for (std::size_t c = 0; c < atom.arity(); ++c) out.push_back(inst.decode(atom.vars[c], atom.at(row, c)).as_int());
    return out;
  }

  std::uint32_t row_of(const std::string& relation, const Ints& values) const {
    const auto pos = position(relation);
    const auto& atom = inst.atoms[plan.rel[pos]];
    for (std::uint32_t r = 0; r < atom.rows; ++r) {
      if (tuple(pos, r) == values) return r;
    }
    throw std::out_of_range("no such tuple");
  }

  WeightedReduction<DoubleSum> sum_reduction() const {
    return dp_preprocess(inst, plan.tree, plan.rel, signed_tuple_weights(plan, inst), DoubleSum{});
  }

  Reduction lex_reduction(const std::vector<std::string>& L, Direction dir = Direction::Asc) const {
    LexKey key{{}, dir};
    for (const auto& v : L) key.variables.push_back(inst.variable(v));
    return semijoin_reduce_lex(inst, plan.tree, plan.rel, key);
  }
};

}  // namespace anyk::test
