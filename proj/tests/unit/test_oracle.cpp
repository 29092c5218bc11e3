#include <gtest/gtest.h>

#include "anyk/oracle.hpp"
#include "fixture.hpp"

using namespace anyk;
using test::Ints;

TEST(Oracle, FixtureSum) {
  const auto r = join_then_rank(test::example_query("SUM x1 + x2 + x3 + x4 + x5"), test::example_db());
  ASSERT_EQ(r.rows.size(), 8u);
  std::vector<double> w;
  for (const auto& row : r.rows) w.push_back(*row.weight);
  EXPECT_EQ(w, (std::vector<double>{10, 11, 12, 13, 14, 15, 15, 16}));
  EXPECT_EQ(test::ints(r.rows[0].values), (Ints{2, 2, 3, 2, 1}));
  EXPECT_EQ(r.head, (std::vector<std::string>{"x1", "x2", "x3", "x4", "x5"}));
}

TEST(Oracle, FixtureLex) {
  const auto r = join_then_rank(test::example_query("LEX x1, x2, x3, x4, x5"), test::example_db());
  ASSERT_EQ(r.rows.size(), 8u);
  EXPECT_EQ(test::ints(r.rows[0].values), (Ints{1, 1, 1, 3, 8}));
  EXPECT_FALSE(r.rows[0].weight);
}

TEST(Oracle, TieOrderBreaksTies) {
  // (1,1,1,3,9) and (1,1,2,3,8) both weigh 15
  const auto pq = test::example_query("SUM x1 + x2 + x3 + x4 + x5");
  const auto by_x3 = join_then_rank(pq, test::example_db(), {"x3"});
  const auto by_x5 = join_then_rank(pq, test::example_db(), {"x5"});
  EXPECT_EQ(*by_x3.rows[5].weight, 15.0);
  EXPECT_EQ(*by_x3.rows[6].weight, 15.0);
  EXPECT_EQ(test::ints(by_x3.rows[5].values), (Ints{1, 1, 1, 3, 9}));
  EXPECT_EQ(test::ints(by_x5.rows[5].values), (Ints{1, 1, 2, 3, 8}));
}

TEST(Oracle, EmptyRelation) {
  Database db = test::example_db();
  db.relations.at("S").tuples.clear();
  EXPECT_TRUE(join_then_rank(test::example_query("SUM x1"), db).rows.empty());
}

TEST(Oracle, SelectionsAndSelfJoins) {
  Database db;
  db.add_relation(test::int_relation("E", {{1, 2}, {2, 3}, {3, 1}, {2, 2}}));
  const auto r = join_then_rank(parse_query("Q(a,b,c) :- E(a,b), E(b,c), E(c,c) ORDER BY LEX a, b, c"), db);
  std::vector<Ints> got;
  for (const auto& row : r.rows) got.push_back(test::ints(row.values));
  EXPECT_EQ(got, (std::vector<Ints>{{1, 2, 2}, {2, 2, 2}, {3, 1, 2}}));
  const auto c = join_then_rank(parse_query("Q(a) :- E(a, 2) ORDER BY LEX a"), db);
  EXPECT_EQ(c.rows.size(), 2u);
}

TEST(Oracle, RowBudget) {
  const auto inst = random_case(5, CaseKind::Sum, 200);
  EXPECT_THROW(join_then_rank(inst.query, inst.db, {}, 0), TooLarge);
}

TEST(RandomInstance, Deterministic) {
  InstanceParams p;
  p.atoms = 3;
  p.tuples = 10;
  p.seed = 1;
  const auto a = random_instance(p), b = random_instance(p);
  EXPECT_EQ(dump_instance(a), dump_instance(b));
  EXPECT_EQ(a.query.query.body.size(), 3u);
  p.seed = 2;
  EXPECT_NE(dump_instance(a), dump_instance(random_instance(p)));
}

TEST(RandomInstance, ShapesAndSelfJoin) {
  for (Shape s : {Shape::Path, Shape::Star, Shape::Tree}) {
    InstanceParams p;
    p.shape = s;
    p.atoms = 5;
    const auto inst = random_instance(p);
    EXPECT_EQ(inst.query.query.body.size(), 5u);
    EXPECT_TRUE(inst.query.query.is_join_query());
    EXPECT_EQ(parse_shape(shape_name(s)), s);
  }
  InstanceParams p;
  p.atoms = 3;
  p.self_join = true;
  const auto cit = random_instance(p);
  for (const auto& atom : cit.query.query.body) EXPECT_EQ(atom.relation, cit.query.query.body[0].relation);
  EXPECT_EQ(cit.query.query.body[0].terms.size(), 2u);
}

TEST(RandomInstance, NoDanglingMeansEveryTupleJoins) {
  InstanceParams p;
  p.shape = Shape::Tree;
  p.atoms = 4;
  p.tuples = 20;
  p.dangling = 0;
  const auto inst = random_instance(p);
  const auto r = join_then_rank(inst.query, inst.db);
  for (const auto& atom : inst.query.query.body) {
    const auto& rel = inst.db.relation(atom.relation);
    for (const auto& t : rel.tuples) {
      bool used = false;
      for (const auto& row : r.rows) {
        bool match = true;
        for (std::size_t c = 0; c < t.size(); ++c) {
          const auto& var = atom.terms[c].var();
          const auto h = std::find(r.head.begin(), r.head.end(), var) - r.head.begin();
          match = match && row.values[static_cast<std::size_t>(h)] == t[c];
        }
        used = used || match;
      }
      EXPECT_TRUE(used);
    }
  }
}

TEST(RandomCase, KindsHaveMatchingRankings) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    EXPECT_TRUE(std::holds_alternative<LexOrder>(random_case(seed, CaseKind::LexTrioFree).query.ranking));
    EXPECT_TRUE(std::holds_alternative<LexOrder>(random_case(seed, CaseKind::LexTrio).query.ranking));
    EXPECT_TRUE(std::holds_alternative<SumOrder>(random_case(seed, CaseKind::Sum).query.ranking));
    EXPECT_TRUE(std::holds_alternative<MaxOrder>(random_case(seed, CaseKind::Max).query.ranking));
    EXPECT_TRUE(std::holds_alternative<TupleWeightOrder>(random_case(seed, CaseKind::TupleWeight).query.ranking));
    const auto inst = random_case(seed, CaseKind::Sum, 200);
    EXPECT_LE(inst.query.query.body.size(), 5u);
    for (const auto& [_, rel] : inst.db.relations) EXPECT_LE(rel.size(), 200u);
  }
}
