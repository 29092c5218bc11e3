#include <gtest/gtest.h>

#include <random>
#include <set>

#include "anyk/analysis.hpp"
#include "anyk/engine.hpp"
#include "anyk/oracle.hpp"
#include "anyk/parse.hpp"
#include "fixture.hpp"

using namespace anyk;

namespace {

ConjunctiveQuery example() { return test::example_query("LEX x1").query; }

std::vector<std::string> split_order(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto arrow = s.find("->", start);
    out.push_back(s.substr(start, arrow == std::string::npos ? std::string::npos : arrow - start));
    if (arrow == std::string::npos) break;
    start = arrow + 2;
  }
  return out;
}

std::vector<std::string> rel_names(const ConjunctiveQuery& q, const RelOrder& rel) {
  std::vector<std::string> out;
  for (auto a : rel) out.push_back(q.body[a].relation);
  return out;
}

using Names = std::vector<std::string>;

}  // namespace

TEST(JoinTree, ExampleQuery) {
  const auto q = example();
  const JoinTree t = build_join_tree(q);
  EXPECT_EQ(t.root, 0u);
  EXPECT_EQ(t.parent, (std::vector<int>{-1, 0, 0, 2}));
  EXPECT_EQ(t.join_vars[1], Names{"x1"});
  EXPECT_EQ(t.join_vars[2], Names{"x2"});
  EXPECT_EQ(t.join_vars[3], Names{"x4"});
  EXPECT_TRUE(has_running_intersection(q, t));
}

TEST(JoinTree, TriangleIsCyclic) {
  const auto q = parse_query("Q(x,y,z) :- R(x,y), S(y,z), T(z,x)").query;
  EXPECT_FALSE(is_acyclic(q));
  try {
    build_join_tree(q);
    FAIL() << "expected CyclicError";
  } catch (const CyclicError& e) {
    EXPECT_EQ(e.residual().edges.size(), 3u);
  }
}

TEST(JoinTree, SingleAtom) {
  const auto q = parse_query("Q(x) :- R(x)").query;
  const JoinTree t = build_join_tree(q);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(topological_rel_order(t), (RelOrder{0}));
}

TEST(RelOrder, ExampleAndSwapped) {
  const auto q = example();
  const JoinTree t = build_join_tree(q);
  EXPECT_EQ(rel_names(q, topological_rel_order(t)), (Names{"R", "S", "T", "U"}));
  auto order = t.children;
  std::reverse(order[0].begin(), order[0].end());
  const RelOrder swapped = topological_rel_order(t, order);
  EXPECT_EQ(rel_names(q, swapped), (Names{"R", "T", "U", "S"}));
  EXPECT_TRUE(respects(t, swapped));
  EXPECT_FALSE(respects(t, RelOrder{0, 3, 2, 1}));
}

TEST(Trio, ClassicExamples) {
  const auto q = example();
  EXPECT_EQ(has_disruptive_trio(q, split_order("x1->x4->x2")), (Trio{"x1", "x4", "x2"}));
  const auto t = has_disruptive_trio(q, split_order("x1->x3->x4->x5->x2"));
  ASSERT_TRUE(t);
  EXPECT_EQ(t->c, "x2");
  EXPECT_FALSE(has_disruptive_trio(q, split_order("x1->x2->x3->x4->x5")));
}

TEST(Trio, IndependentOfAtomOrder) {
  const auto q = example();
  auto shuffled = q;
  std::reverse(shuffled.body.begin(), shuffled.body.end());
  std::mt19937_64 rng(3);
  std::vector<std::string> vars = q.variables();
  for (int i = 0; i < 200; ++i) {
    std::shuffle(vars.begin(), vars.end(), rng);
    const std::vector<std::string> L(vars.begin(), vars.begin() + 1 + static_cast<long>(rng() % vars.size()));
    EXPECT_EQ(has_disruptive_trio(q, L).has_value(), has_disruptive_trio(shuffled, L).has_value());
  }
}

TEST(LConsistent, ClassicExamples) {
  const auto q = example();
  const auto a = l_consistent_join_tree(q, split_order("x1->x2->x3->x4->x5"));
  ASSERT_TRUE(a);
  EXPECT_EQ(a->tree.parent, (std::vector<int>{-1, 0, 0, 2}));
  EXPECT_EQ(rel_names(q, a->rel), (Names{"R", "S", "T", "U"}));

  const auto b = l_consistent_join_tree(q, split_order("x1->x2->x4->x5->x3"));
  ASSERT_TRUE(b);
  EXPECT_EQ(b->tree.parent, (std::vector<int>{-1, 0, 0, 2}));
  EXPECT_EQ(rel_names(q, b->rel), (Names{"R", "T", "U", "S"}));

  const auto L = split_order("x2->x1->x3->x4->x5");
  const auto c = l_consistent_join_tree(q, L);
  ASSERT_TRUE(c);
  EXPECT_EQ(rel_names(q, c->rel), (Names{"R", "S", "T", "U"}));
  EXPECT_TRUE(is_l_consistent(q, *c, L));

  EXPECT_FALSE(l_consistent_join_tree(q, split_order("x1->x4->x2")));
  EXPECT_FALSE(is_l_consistent(q, *a, split_order("x1->x2->x4->x5->x3")));
}

TEST(LConsistent, RootSortedByLeadingVariables) {
  // L = x2 -> x1 -> ...: R is sorted by x2, then x1.
  Database db = test::example_db();
  db.relations.at("R").add({Value(2), Value(1)});
  db.relations.at("S").add({Value(2), Value(9)});
  auto stream = enumerate(test::example_query("LEX x2, x1, x3, x4, x5"), db);
  EXPECT_EQ(stream.plan().strategy, Strategy::Lex);
  std::vector<test::Ints> firsts;
  while (auto a = stream.next()) firsts.push_back({a->values[1].as_int(), a->values[0].as_int()});
  EXPECT_TRUE(std::is_sorted(firsts.begin(), firsts.end()));
  EXPECT_EQ(firsts.front(), (test::Ints{1, 1}));
  EXPECT_EQ(firsts.back(), (test::Ints{2, 2}));
}

TEST(FreeConnex, Examples) {
  EXPECT_TRUE(is_free_connex(example()));
  EXPECT_FALSE(is_free_connex(parse_query("Q(x1,x3) :- R(x1,x2), S(x2,x3)").query));
  EXPECT_TRUE(is_free_connex(parse_query("Q(x1,x2) :- R(x1,x2), S(x2,x3)").query));
  EXPECT_FALSE(is_free_connex(parse_query("Q(x,y,z) :- R(x,y), S(y,z), T(z,x)").query));
}

namespace {

// Random acyclic query by ear composition: each new atom keeps a subset of
// one existing atom's variables and adds fresh ones.
ConjunctiveQuery ear_composed(std::mt19937_64& rng, std::size_t atoms) {
  ConjunctiveQuery q;
  int fresh = 0;
  auto var = [&] { return "v" + std::to_string(fresh++); };
  Atom first{"A0", {}};
  for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i) first.terms.push_back(Term::variable(var()));
  q.body.push_back(first);
  for (std::size_t a = 1; a < atoms; ++a) {
    const Atom& host = q.body[rng() % q.body.size()];
    Atom ear{"A" + std::to_string(a), {}};
    for (const auto& t : host.terms) {
      if (rng() % 2) ear.terms.push_back(t);
    }
    for (std::size_t i = 0, n = rng() % 3; i < n || ear.terms.empty(); ++i) ear.terms.push_back(Term::variable(var()));
    std::shuffle(ear.terms.begin(), ear.terms.end(), rng);
    q.body.push_back(ear);
  }
  std::shuffle(q.body.begin(), q.body.end(), rng);
  q.head = q.variables();
  return q;
}

// Random tree-shaped graph query (binary atoms).
ConjunctiveQuery binary_tree_query(std::mt19937_64& rng, std::size_t atoms) {
  ConjunctiveQuery q;
  for (std::size_t a = 0; a < atoms; ++a) {
    const std::size_t p = rng() % (a + 1);
    q.body.push_back(Atom{"E" + std::to_string(a),
                          {Term::variable("v" + std::to_string(p)), Term::variable("v" + std::to_string(a + 1))}});
  }
  q.head = q.variables();
  return q;
}

}  // namespace

TEST(JoinTree, RandomEarComposedQueriesAreAcyclic) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const auto q = ear_composed(rng, 1 + rng() % 7);
    JoinTree t;
    ASSERT_NO_THROW(t = build_join_tree(q)) << to_string(q);
    EXPECT_EQ(t.root, 0u);
    EXPECT_TRUE(has_running_intersection(q, t)) << to_string(q);
    EXPECT_TRUE(respects(t, topological_rel_order(t)));
    EXPECT_TRUE(is_free_connex(q));
  }
}

TEST(JoinTree, ClosingACycleIsDetected) {
  std::mt19937_64 rng(23);
  int perturbed = 0;
  for (int i = 0; i < 500; ++i) {
    auto q = binary_tree_query(rng, 2 + rng() % 6);
    ASSERT_TRUE(is_acyclic(q));
    const auto vars = q.variables();
    const auto h = Hypergraph::of(q);
    const std::size_t a = rng() % vars.size(), b = rng() % vars.size();
    if (a == b || h.neighbors(a, b)) continue;
    q.body.push_back(Atom{"C", {Term::variable(h.vertices[a]), Term::variable(h.vertices[b])}});
    EXPECT_THROW(build_join_tree(q), CyclicError) << to_string(q);
    ++perturbed;
  }
  EXPECT_GT(perturbed, 100);
}

TEST(LConsistent, RandomTrioFreeOrdersPlanAsLex) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const auto inst = random_case(seed, CaseKind::LexTrioFree, 20);
    const Plan plan = plan_query(inst.query, inst.db);
    const auto& L = std::get<LexOrder>(plan.ranking).variables;
    EXPECT_FALSE(plan.trio) << seed;
    EXPECT_EQ(plan.strategy, Strategy::Lex) << seed;
    EXPECT_TRUE(is_l_consistent(plan.query, OrderedJoinTree{plan.tree, plan.rel}, L)) << seed;
    EXPECT_TRUE(has_running_intersection(plan.query, plan.tree)) << seed;
  }
}

TEST(LConsistent, TrioOrdersFallBackToSum) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto inst = random_case(seed, CaseKind::LexTrio, 20);
    const Plan plan = plan_query(inst.query, inst.db);
    EXPECT_TRUE(plan.trio) << seed;
    EXPECT_EQ(plan.strategy, Strategy::LexViaSum) << seed;
  }
}

TEST(TieOrder, IntroductionAlongRel) {
  const auto q = example();
  EXPECT_EQ(introduction_order(q, RelOrder{0, 2, 3, 1}), (Names{"x1", "x2", "x4", "x5", "x3"}));
}
