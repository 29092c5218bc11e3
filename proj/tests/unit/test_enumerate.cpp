#include <gtest/gtest.h>

#include <memory>
#include <set>

#include "anyk/enumerate.hpp"
#include "anyk/oracle.hpp"
#include "fixture.hpp"

using namespace anyk;
using test::Ints;
using test::Prepared;

namespace {

ParsedQuery example_sum() { return test::example_query("SUM x1 + x2 + x3 + x4 + x5"); }

// Full assignment of an answer given its rows, in x1..x5 order.
Ints assignment(const Prepared& p, std::span<const std::uint32_t> rows) {
  std::map<std::string, std::int64_t> a;
  for (std::size_t pos = 0; pos < rows.size(); ++pos) {
    const auto& atom = p.inst.atoms[p.plan.rel[pos]];
    const auto t = p.tuple(pos, rows[pos]);
    for (std::size_t c = 0; c < atom.arity(); ++c) a[p.inst.variables[atom.vars[c]]] = t[c];
  }
  Ints out;
  for (const auto& [_, v] : a) out.push_back(v);
  return out;
}

std::vector<Ints> drain(AnswerStream& s) {
  std::vector<Ints> out;
  while (auto a = s.next()) out.push_back(test::ints(a->values));
  return out;
}

}  // namespace

TEST(Lex, FirstFiveAnswers) {
  const auto out = [] {
    auto s = enumerate(test::example_query("LEX x1, x2, x3, x4, x5"), test::example_db(), 5);
    return drain(s);
  }();
  EXPECT_EQ(out, (std::vector<Ints>{{1, 1, 1, 3, 8}, {1, 1, 1, 3, 9}, {1, 1, 2, 3, 8}, {1, 1, 2, 3, 9}, {2, 2, 3, 2, 1}}));
}

TEST(Lex, BacktrackingInternals) {
  const Prepared p(test::example_query("LEX x1, x2, x3, x4, x5"), test::example_db());
  LexEnumerator e(std::make_shared<Reduction>(p.lex_reduction({"x1", "x2", "x3", "x4", "x5"})));
  ASSERT_TRUE(e.next());
  EXPECT_EQ(assignment(p, e.rows()), (Ints{1, 1, 1, 3, 8}));
  // the next candidate to pop swaps in U(3,9) at the last position
  auto f = e.frontier();
  ASSERT_FALSE(f.empty());
  ASSERT_EQ(f.back().rows.size(), 4u);
  EXPECT_EQ(p.tuple(3, f.back().rows[3]), (Ints{3, 9}));
  EXPECT_EQ(e.frontier_size(), 3u);

  ASSERT_TRUE(e.next());
  EXPECT_EQ(assignment(p, e.rows()), (Ints{1, 1, 1, 3, 9}));
  // U has no further match: backtrack to S(1,2)
  f = e.frontier();
  ASSERT_EQ(f.back().rows.size(), 2u);
  EXPECT_EQ(p.tuple(1, f.back().rows[1]), (Ints{1, 2}));

  std::size_t count = 2;
  while (e.next()) ++count;
  EXPECT_EQ(count, 8u);
  EXPECT_EQ(e.frontier_size(), 0u);
  EXPECT_EQ(e.live_cells(), 0u);
}

TEST(Sum, SeedAndSecondIteration) {
  const Prepared p(example_sum(), test::example_db());
  RankedEnumerator<DoubleSum> e(std::make_shared<WeightedReduction<DoubleSum>>(p.sum_reduction()));
  EXPECT_EQ(e.frontier_size(), 1u);
  EXPECT_EQ(e.frontier()[0].prio, 10.0);
  EXPECT_EQ(p.tuple(0, e.frontier()[0].rows[0]), (Ints{2, 2}));

  ASSERT_TRUE(e.next());
  EXPECT_EQ(assignment(p, e.rows()), (Ints{2, 2, 3, 2, 1}));
  EXPECT_EQ(e.weight(), 10.0);

  // candidates: R(1,1); R(2,2) with S(2,5); (2,2,3,2) with U(2,2)
  std::map<std::size_t, double> by_length;
  for (const auto& c : e.frontier()) by_length[c.rows.size()] = c.prio;
  EXPECT_EQ(e.frontier_size(), 3u);
  EXPECT_EQ(by_length[1], 14.0);
  EXPECT_EQ(by_length[2], 12.0);
  EXPECT_EQ(by_length[4], 11.0);
  for (const auto& c : e.frontier()) {
    if (c.rows.size() == 2) EXPECT_EQ(p.tuple(1, c.rows[1]), (Ints{2, 5}));
  }

  ASSERT_TRUE(e.next());
  EXPECT_EQ(assignment(p, e.rows()), (Ints{2, 2, 3, 2, 2}));
  EXPECT_EQ(e.weight(), 11.0);
}

TEST(Sum, IncrementalPriorityMatchesRecomputation) {
  const Prepared p(example_sum(), test::example_db());
  const auto r = std::make_shared<WeightedReduction<DoubleSum>>(p.sum_reduction());
  RankedEnumerator<DoubleSum> e(r);
  ASSERT_TRUE(e.next());
  std::vector<std::uint32_t> rows(e.rows().begin(), e.rows().end());
  // S(2,3) -> S(2,5): 10 - 3 + 5
  rows[1] = p.row_of("S", {2, 5});
  EXPECT_EQ(e.prefix_prio(rows, 2), 12.0);
  EXPECT_EQ(incremental_prio(DoubleSum{}, 10.0, 3.0, 5.0), 12.0);
  // U(2,1) -> U(2,2): 10 - 1 + 2
  rows = {e.rows().begin(), e.rows().end()};
  rows[3] = p.row_of("U", {2, 2});
  EXPECT_EQ(e.prefix_prio(rows, 4), 11.0);
  // same tuple: unchanged
  EXPECT_EQ(incremental_prio(DoubleSum{}, 10.0, 3.0, 3.0), 10.0);
  EXPECT_EQ(e.prefix_prio(e.rows(), 4), 10.0);

  // every pushed priority equals the recomputed best extension
  while (e.next()) {
    for (const auto& c : e.frontier()) EXPECT_EQ(c.prio, e.prefix_prio(c.rows, c.rows.size()));
  }
}

TEST(Sum, TopOneAndFullOrder) {
  auto top = enumerate(example_sum(), test::example_db(), 1);
  const auto first = top.next();
  ASSERT_TRUE(first);
  EXPECT_EQ(test::ints(first->values), (Ints{2, 2, 3, 2, 1}));
  EXPECT_EQ(first->weight, 10.0);
  EXPECT_FALSE(top.next());

  auto all = enumerate(example_sum(), test::example_db(), 100);
  std::vector<double> weights;
  while (auto a = all.next()) weights.push_back(*a->weight);
  EXPECT_EQ(weights, (std::vector<double>{10, 11, 12, 13, 14, 15, 15, 16}));
  EXPECT_FALSE(all.next());
  EXPECT_EQ(all.emitted(), 8u);
}

TEST(Sum, Descending) {
  auto s = enumerate(test::example_query("SUM x1 + x2 + x3 + x4 + x5 DESC"), test::example_db());
  std::vector<double> weights;
  while (auto a = s.next()) weights.push_back(*a->weight);
  EXPECT_EQ(weights, (std::vector<double>{16, 15, 15, 14, 13, 12, 11, 10}));
}

TEST(Sum, NegativeWeights) {
  Database db = test::example_db();
  WeightTable w;
  for (int v = 0; v <= 9; ++v) w[Value(v)] = v % 2 ? -v : v / 2.0;
  db.weight_tables["w"] = w;
  const auto pq = test::example_query("SUM w:w(x1) + w:w(x3) + w:w(x5)");
  auto s = enumerate(pq, db);
  const auto expected = join_then_rank(pq, db, s.tie_order());
  std::size_t i = 0;
  while (auto a = s.next()) {
    ASSERT_LT(i, expected.rows.size());
    EXPECT_EQ(a->values, expected.rows[i].values);
    EXPECT_EQ(a->weight, expected.rows[i].weight);
    ++i;
  }
  EXPECT_EQ(i, expected.rows.size());
  EXPECT_LT(*expected.rows.front().weight, 0.0);
}

TEST(Sum, ZeroWeights) {
  Database db = test::example_db();
  WeightTable w;
  for (int v = 0; v <= 9; ++v) w[Value(v)] = 0;
  db.weight_tables["w"] = w;
  auto s = enumerate(test::example_query("SUM w:w(x1)"), db);
  std::size_t n = 0;
  while (auto a = s.next()) {
    EXPECT_EQ(a->weight, 0.0);
    ++n;
  }
  EXPECT_EQ(n, 8u);
}

TEST(Max, AgreesWithOracle) {
  for (const auto* order : {"MAX x3, x5", "MAX x3, x5 DESC", "MAX x1, x2, x3, x4, x5"}) {
    const auto pq = test::example_query(order);
    auto s = enumerate(pq, test::example_db());
    const auto expected = join_then_rank(pq, test::example_db(), s.tie_order());
    std::vector<RankedRow> got;
    while (auto a = s.next()) got.push_back({a->values, a->weight});
    ASSERT_EQ(got.size(), expected.rows.size()) << order;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].values, expected.rows[i].values) << order;
      EXPECT_EQ(got[i].weight, expected.rows[i].weight) << order;
    }
  }
}

TEST(Max, NonDecreasingMax) {
  auto s = enumerate(test::example_query("MAX x3, x5"), test::example_db());
  std::vector<double> w;
  while (auto a = s.next()) w.push_back(*a->weight);
  EXPECT_TRUE(std::is_sorted(w.begin(), w.end()));
  // (2,2,3,2,1) and (2,2,3,2,2) have max 3; the x1 = 1 answers have x5 >= 8
  EXPECT_EQ(w, (std::vector<double>{3, 3, 5, 5, 8, 8, 9, 9}));
}

TEST(Enumerate, LimitBeyondOutput) {
  auto s = enumerate(test::example_query("LEX x1, x2, x3, x4, x5"), test::example_db(), 1000);
  EXPECT_EQ(drain(s).size(), 8u);
  EXPECT_FALSE(s.next());
  EXPECT_FALSE(s.next());
}

TEST(Enumerate, EmptyRelation) {
  Database db = test::example_db();
  db.relations.at("T").tuples.clear();
  for (const auto* order : {"LEX x1, x2, x3, x4, x5", "SUM x1 + x2", "LEX x1, x4, x2", "MAX x1"}) {
    auto s = enumerate(test::example_query(order), db);
    EXPECT_FALSE(s.next()) << order;
    EXPECT_EQ(s.frontier_size(), 0u);
  }
  Database nothing = test::example_db();
  nothing.relations.at("U").tuples = {{Value(7), Value(7)}};
  auto s = enumerate(test::example_query("SUM x1"), nothing);
  EXPECT_FALSE(s.next());
}

TEST(Enumerate, SingleAtomSeedIsSmallest) {
  Database db;
  db.add_relation(test::int_relation("R", {{3}, {1}, {2}}, {"a"}));
  auto s = enumerate(parse_query("Q(x) :- R(x) ORDER BY LEX x"), db);
  EXPECT_EQ(drain(s), (std::vector<Ints>{{1}, {2}, {3}}));
  auto d = enumerate(parse_query("Q(x) :- R(x) ORDER BY LEX x DESC"), db);
  EXPECT_EQ(drain(d), (std::vector<Ints>{{3}, {2}, {1}}));
}

TEST(Enumerate, LexWithTrioUsesSum) {
  auto s = enumerate(test::example_query("LEX x1, x4, x2"), test::example_db());
  EXPECT_EQ(s.plan().strategy, Strategy::LexViaSum);
  ASSERT_TRUE(s.plan().trio);
  std::vector<Ints> keys;
  while (auto a = s.next()) {
    EXPECT_FALSE(a->weight);
    keys.push_back({a->values[0].as_int(), a->values[3].as_int(), a->values[1].as_int()});
  }
  EXPECT_EQ(keys.size(), 8u);
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
}

TEST(Enumerate, Projection) {
  EXPECT_THROW(enumerate(parse_query("Q(x1) :- R(x1,x2), S(x1,x3)"), test::example_db()), std::invalid_argument);
  Database db = test::example_db();
  db.add_relation(test::int_relation("V", {{1, 1}}));
  EXPECT_THROW(enumerate(parse_query("Q(x1,x2,x3) :- R(x1,x2), S(x2,x3), V(x3,x1)"), db), CyclicError);
}

TEST(Enumerate, ExplainReport) {
  auto s = enumerate(test::example_query("LEX x1, x2, x3, x4, x5"), test::example_db());
  const auto text = s.explain();
  EXPECT_NE(text.find("strategy: LEX"), std::string::npos) << text;
  EXPECT_NE(text.find("2/3 tuples alive"), std::string::npos) << text;
}

namespace {

void check_random(CaseKind kind, std::uint64_t seeds) {
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    const auto inst = random_case(seed, kind, 60);
    auto s = enumerate(inst.query, inst.db);
    const auto expected = join_then_rank(inst.query, inst.db, s.tie_order());
    const std::size_t l = s.plan().rel.size();
    std::set<std::vector<Value>> seen;
    std::size_t i = 0;
    while (auto a = s.next()) {
      ASSERT_LT(i, expected.rows.size()) << case_name(kind) << " seed " << seed;
      EXPECT_TRUE(seen.insert(a->values).second) << "duplicate, seed " << seed;
      EXPECT_EQ(a->values, expected.rows[i].values) << case_name(kind) << " seed " << seed << " answer " << i;
      EXPECT_EQ(a->weight, expected.rows[i].weight) << case_name(kind) << " seed " << seed;
      ++i;
      EXPECT_LE(s.frontier_size(), i * l) << seed;
    }
    EXPECT_EQ(i, expected.rows.size()) << case_name(kind) << " seed " << seed;
  }
}

}  // namespace

TEST(Random, LexTrioFree) { check_random(CaseKind::LexTrioFree, 60); }
TEST(Random, LexTrio) { check_random(CaseKind::LexTrio, 60); }
TEST(Random, Sum) { check_random(CaseKind::Sum, 60); }
TEST(Random, Max) { check_random(CaseKind::Max, 60); }
TEST(Random, TupleWeight) { check_random(CaseKind::TupleWeight, 60); }

TEST(Random, PrefixAgreement) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto kind = kAllCaseKinds[seed % 5];
    const auto inst = random_case(seed + 1000, kind, 80);
    const std::size_t k = 1 + seed * 7 % 23;
    auto s = enumerate(inst.query, inst.db, k);
    const auto expected = join_then_rank(inst.query, inst.db, s.tie_order());
    std::size_t i = 0;
    while (auto a = s.next()) {
      EXPECT_EQ(a->values, expected.rows[i].values) << seed;
      ++i;
    }
    EXPECT_EQ(i, std::min(k, expected.rows.size())) << seed;
  }
}

TEST(CellPool, RecyclesChains) {
  CellPool pool;
  const auto a = pool.make(0, 0, 0, CellPool::kNil);
  const auto b = pool.make(1, 0, 0, a);
  const auto c = pool.make(2, 0, 0, a);
  pool.release(a);
  EXPECT_EQ(pool.live(), 3u);
  pool.release(b);
  EXPECT_EQ(pool.live(), 2u);
  pool.release(c);
  EXPECT_EQ(pool.live(), 0u);
  const auto d = pool.make(5, 0, 0, CellPool::kNil);
  EXPECT_LT(d, 3u);
  EXPECT_EQ(pool[d].row, 5u);
}
