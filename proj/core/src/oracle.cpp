#include "anyk/oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "anyk/analysis.hpp"

namespace anyk {

namespace {

struct KeyHash {
  std::size_t operator()(const std::vector<Value>& key) const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (const auto& v : key) h = (h ^ v.hash()) * 0x100000001b3ull;
    return h;
  }
};

// A row of the growing left-deep join: one slot per query variable.
struct Partial {
  std::vector<Value> slots;
  double tuple_weight = 0;
};

double table_weight(const WeightTerm& t, const Value& v, const Database& db) {
  if (!t.table) {
    if (v.tag() == ValueTag::Int) return static_cast<double>(v.as_int());
    if (v.tag() == ValueTag::Float) return v.as_float();
    throw SchemaError("text value under identity weight");
  }
  const auto& table = db.weight_tables.at(*t.table);
  auto it = table.find(v);
  if (it == table.end()) throw SchemaError("weight table miss for " + v.to_string());
  return it->second;
}

}  // namespace

MaterializedResult join_then_rank(const ParsedQuery& pq, const Database& db,
                                  const std::vector<std::string>& tie_order, std::size_t max_rows) {
  const auto& q = pq.query;
  std::vector<std::string> vars;
  for (const auto& atom : q.body) {
    for (const auto& t : atom.terms) {
      if (t.is_variable() && std::find(vars.begin(), vars.end(), t.var()) == vars.end()) vars.push_back(t.var());
    }
  }
  auto slot_of = [&](const std::string& v) {
    return static_cast<std::size_t>(std::find(vars.begin(), vars.end(), v) - vars.begin());
  };

  // Left-deep plan: keep joining the first atom connected to what is bound.
  std::vector<bool> bound(vars.size(), false), used(q.body.size(), false);
  std::vector<Partial> acc{Partial{std::vector<Value>(vars.size()), 0}};
  for (std::size_t step = 0; step < q.body.size(); ++step) {
    std::size_t pick = q.body.size();
    for (std::size_t a = 0; a < q.body.size() && pick == q.body.size(); ++a) {
      if (used[a]) continue;
      for (const auto& t : q.body[a].terms) {
        if (t.is_variable() && bound[slot_of(t.var())]) {
          pick = a;
          break;
        }
      }
    }
    if (pick == q.body.size()) pick = static_cast<std::size_t>(std::find(used.begin(), used.end(), false) - used.begin());
    used[pick] = true;
    const auto& atom = q.body[pick];
    const Relation& rel = db.relation(atom.relation);

    std::vector<std::size_t> key_cols;
    for (std::size_t c = 0; c < atom.terms.size(); ++c) {
      if (atom.terms[c].is_variable() && bound[slot_of(atom.terms[c].var())]) key_cols.push_back(c);
    }
    // Selections within the atom: constants and repeated variables.
    std::unordered_map<std::vector<Value>, std::vector<std::size_t>, KeyHash> hash;
    for (std::size_t t = 0; t < rel.size(); ++t) {
      const auto& tuple = rel.tuples[t];
      bool ok = true;
      std::map<std::string, const Value*> seen;
      for (std::size_t c = 0; c < atom.terms.size() && ok; ++c) {
        const auto& term = atom.terms[c];
        if (!term.is_variable()) {
          ok = tuple[c] == term.value();
        } else if (auto [it, fresh] = seen.emplace(term.var(), &tuple[c]); !fresh) {
          ok = *it->second == tuple[c];
        }
      }
      if (!ok) continue;
      std::vector<Value> key;
      for (auto c : key_cols) key.push_back(tuple[c]);
      hash[std::move(key)].push_back(t);
    }

    std::vector<Partial> next;
    for (const auto& p : acc) {
      std::vector<Value> key;
      for (auto c : key_cols) key.push_back(p.slots[slot_of(atom.terms[c].var())]);
      auto it = hash.find(key);
      if (it == hash.end()) continue;
      for (auto t : it->second) {
        if (next.size() >= max_rows) throw TooLarge("join exceeds " + std::to_string(max_rows) + " rows");
        Partial out = p;
        for (std::size_t c = 0; c < atom.terms.size(); ++c) {
          if (atom.terms[c].is_variable()) out.slots[slot_of(atom.terms[c].var())] = rel.tuples[t][c];
        }
        if (rel.weights) out.tuple_weight += (*rel.weights)[t];
        next.push_back(std::move(out));
      }
    }
    acc = std::move(next);
    for (const auto& t : atom.terms) {
      if (t.is_variable()) bound[slot_of(t.var())] = true;
    }
  }
  if (q.body.empty()) acc.clear();

  // Rank.
  struct Keyed {
    std::vector<Value> lex;
    std::vector<double> num;  // SUM/TUPLEWEIGHT: one entry; MAX: descending multiset
    std::vector<Value> tie;
    RankedRow row;
  };
  const auto& tie_vars = tie_order.empty() ? q.head : tie_order;
  std::vector<Keyed> keyed;
  keyed.reserve(acc.size());
  Direction dir = Direction::Asc;
  std::visit([&](const auto& s) { dir = s.direction; }, pq.ranking);
  for (const auto& p : acc) {
    Keyed k;
    for (const auto& h : q.head) k.row.values.push_back(p.slots[slot_of(h)]);
    for (const auto& v : tie_vars) k.tie.push_back(p.slots[slot_of(v)]);
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, LexOrder>) {
            for (const auto& v : s.variables) k.lex.push_back(p.slots[slot_of(v)]);
          } else if constexpr (std::is_same_v<S, SumOrder>) {
            double total = 0;
            for (const auto& t : s.terms) total += table_weight(t, p.slots[slot_of(t.variable)], db);
            k.num = {total};
            k.row.weight = total;
          } else if constexpr (std::is_same_v<S, MaxOrder>) {
            for (const auto& t : s.terms) k.num.push_back(table_weight(t, p.slots[slot_of(t.variable)], db));
            std::sort(k.num.begin(), k.num.end(), std::greater<>{});
            k.row.weight = k.num.front();
          } else {
            k.num = {p.tuple_weight};
            k.row.weight = p.tuple_weight;
          }
        },
        pq.ranking);
    keyed.push_back(std::move(k));
  }
  const bool desc = dir == Direction::Desc;
  std::sort(keyed.begin(), keyed.end(), [desc](const Keyed& a, const Keyed& b) {
    if (a.lex != b.lex) return desc ? b.lex < a.lex : a.lex < b.lex;
    if (a.num != b.num) return desc ? b.num < a.num : a.num < b.num;
    return a.tie < b.tie;
  });

  MaterializedResult out;
  out.head = q.head;
  for (auto& k : keyed) out.rows.push_back(std::move(k.row));
  return out;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

const char* shape_name(Shape s) {
  switch (s) {
    case Shape::Path: return "path";
    case Shape::Star: return "star";
    case Shape::Tree: return "tree";
  }
  return "?";
}

Shape parse_shape(const std::string& s) {
  if (s == "path") return Shape::Path;
  if (s == "star") return Shape::Star;
  if (s == "tree") return Shape::Tree;
  throw std::invalid_argument("unknown shape " + s + " (path, star, tree)");
}

const char* case_name(CaseKind k) {
  switch (k) {
    case CaseKind::LexTrioFree: return "lex";
    case CaseKind::LexTrio: return "lex-trio";
    case CaseKind::Sum: return "sum";
    case CaseKind::Max: return "max";
    case CaseKind::TupleWeight: return "tupleweight";
  }
  return "?";
}

namespace {

std::string var_name(std::size_t i) { return "x" + std::to_string(i + 1); }

// Variable sets per atom; parents precede children in atom order.
std::vector<std::vector<std::size_t>> skeleton(const InstanceParams& p, std::mt19937_64& rng) {
  std::vector<std::vector<std::size_t>> atoms;
  switch (p.shape) {
    case Shape::Path:
      for (std::size_t i = 0; i < p.atoms; ++i) atoms.push_back({i, i + 1});
      break;
    case Shape::Star:
      for (std::size_t i = 0; i < p.atoms; ++i) atoms.push_back({0, i + 1});
      break;
    case Shape::Tree: {
      std::size_t next = 0;
      std::bernoulli_distribution coin(0.3);
      atoms.push_back({next, next + 1});
      next += 2;
      if (coin(rng)) atoms[0].push_back(next++);
      for (std::size_t i = 1; i < p.atoms; ++i) {
        const auto& parent = atoms[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)];
        std::vector<std::size_t> shared = parent;
        std::shuffle(shared.begin(), shared.end(), rng);
        shared.resize(coin(rng) && parent.size() > 1 ? 2 : 1);
        const std::size_t fresh = coin(rng) ? 2 : 1;
        for (std::size_t f = 0; f < fresh; ++f) shared.push_back(next++);
        std::shuffle(shared.begin(), shared.end(), rng);
        atoms.push_back(std::move(shared));
      }
      break;
    }
  }
  return atoms;
}

}  // namespace

Instance random_instance(const InstanceParams& p) {
  if (p.atoms == 0 || p.tuples == 0 || p.domain == 0) throw std::invalid_argument("instance parameters must be positive");
  std::mt19937_64 rng(p.seed);
  const auto atoms = skeleton(p, rng);
  std::size_t nvars = 0;
  for (const auto& a : atoms) nvars = std::max(nvars, *std::max_element(a.begin(), a.end()) + 1);

  std::uniform_int_distribution<std::int64_t> value(0, static_cast<std::int64_t>(p.domain) - 1);
  std::uniform_int_distribution<int> weight(p.weight_lo, p.weight_hi);
  std::bernoulli_distribution dangle(p.dangling);

  std::vector<std::vector<std::int64_t>> full(p.tuples, std::vector<std::int64_t>(nvars));
  for (auto& row : full) {
    for (auto& v : row) v = value(rng);
  }

  Instance inst;
  auto& q = inst.query.query;
  for (std::size_t v = 0; v < nvars; ++v) q.head.push_back(var_name(v));
  const bool shared_rel = p.self_join && p.shape == Shape::Path;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const std::string name = shared_rel ? "E" : "R" + std::to_string(a + 1);
    Atom atom{name, {}};
    for (auto v : atoms[a]) atom.terms.push_back(Term::variable(var_name(v)));
    q.body.push_back(std::move(atom));
    if (shared_rel && a > 0) continue;

    Relation rel;
    rel.name = name;
    for (std::size_t c = 0; c < atoms[a].size(); ++c) rel.columns.push_back("c" + std::to_string(c + 1));
    rel.weights.emplace();
    for (const auto& row : full) {
      std::vector<Value> tuple;
      if (dangle(rng)) {
        for (std::size_t c = 0; c < atoms[a].size(); ++c) tuple.emplace_back(value(rng));
      } else {
        for (auto v : atoms[a]) tuple.emplace_back(row[v]);
      }
      rel.add(std::move(tuple), weight(rng));
    }
    if (shared_rel) {  // the other atoms' projections go into the same relation
      const std::size_t share = std::max<std::size_t>(1, full.size() / atoms.size());
      rel.tuples.resize(std::min(rel.tuples.size(), share));
      rel.weights->resize(rel.tuples.size());
      for (std::size_t b = 1; b < atoms.size(); ++b) {
        for (std::size_t r = 0; r < share; ++r) {
          rel.add({Value(full[r][atoms[b][0]]), Value(full[r][atoms[b][1]])}, weight(rng));
        }
      }
    }
    rel.deduplicate();
    inst.db.add_relation(std::move(rel));
  }

  WeightTable w;
  for (std::size_t v = 0; v < p.domain; ++v) w[Value(static_cast<std::int64_t>(v))] = weight(rng);
  inst.db.weight_tables["w"] = std::move(w);
  inst.query.ranking = LexOrder{q.head, Direction::Asc};
  return inst;
}

namespace {

// Random order of atoms in which every atom's overlap with the earlier ones
// lies inside one earlier atom; falls back to declaration order.
std::vector<std::size_t> random_rip_order(const ConjunctiveQuery& q, std::mt19937_64& rng) {
  const std::size_t m = q.body.size();
  for (int attempt = 0; attempt < 20; ++attempt) {
    std::vector<std::size_t> order;
    std::vector<bool> placed(m, false);
    std::set<std::string> bound;
    order.push_back(std::uniform_int_distribution<std::size_t>(0, m - 1)(rng));
    placed[order[0]] = true;
    for (const auto& v : q.body[order[0]].variables()) bound.insert(v);
    while (order.size() < m) {
      std::vector<std::size_t> ok;
      for (std::size_t a = 0; a < m; ++a) {
        if (placed[a]) continue;
        std::vector<std::string> overlap;
        for (const auto& v : q.body[a].variables()) {
          if (bound.contains(v)) overlap.push_back(v);
        }
        const bool inside = std::any_of(order.begin(), order.end(), [&](std::size_t b) {
          return std::all_of(overlap.begin(), overlap.end(), [&](const auto& v) { return q.body[b].contains(v); });
        });
        if (inside) ok.push_back(a);
      }
      if (ok.empty()) break;
      const auto a = ok[std::uniform_int_distribution<std::size_t>(0, ok.size() - 1)(rng)];
      placed[a] = true;
      order.push_back(a);
      for (const auto& v : q.body[a].variables()) bound.insert(v);
    }
    if (order.size() == m) return order;
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

std::vector<WeightTerm> random_terms(const std::vector<std::string>& vars, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> count(1, vars.size() + 1);
  std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
  std::bernoulli_distribution table(0.4);
  std::vector<WeightTerm> terms;
  const auto k = count(rng);
  for (std::size_t i = 0; i < k; ++i) {
    WeightTerm t{vars[pick(rng)], std::nullopt};
    if (table(rng)) t.table = "w";
    terms.push_back(std::move(t));
  }
  return terms;
}

// Occasionally adds a constant selection or a repeated-variable atom.
void add_selection(Instance& inst, std::size_t domain, std::mt19937_64& rng) {
  auto& q = inst.query.query;
  const auto vars = q.variables();
  const auto& x = vars[std::uniform_int_distribution<std::size_t>(0, vars.size() - 1)(rng)];
  Relation rel;
  rel.columns = {"a", "b"};
  if (std::bernoulli_distribution(0.5)(rng)) {
    rel.name = "Sel";
    for (std::size_t v = 0; v < domain; ++v) {
      rel.add({Value(static_cast<std::int64_t>(v)), Value(static_cast<std::int64_t>(v % 3 == 0 ? 0 : 1))});
    }
    q.body.push_back(Atom{"Sel", {Term::variable(x), Term::constant(Value(std::int64_t{1}))}});
  } else {
    rel.name = "Eq";
    for (std::size_t v = 0; v < domain; ++v) {
      const auto i = static_cast<std::int64_t>(v);
      // one row per value, a quarter of them off the diagonal
      rel.add({Value(i), Value(v % 4 == 3 ? (i + 1) % static_cast<std::int64_t>(domain) : i)});
    }
    q.body.push_back(Atom{"Eq", {Term::variable(x), Term::variable(x)}});
  }
  rel.weights = std::vector<double>(rel.size(), 1.0);
  inst.db.add_relation(std::move(rel));
}

}  // namespace

Instance random_case(std::uint64_t seed, CaseKind kind, std::size_t max_tuples) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(kind));
  for (;;) {
    InstanceParams p;
    p.shape = static_cast<Shape>(std::uniform_int_distribution<int>(0, 2)(rng));
    const bool selection = std::bernoulli_distribution(0.15)(rng);
    p.atoms = std::uniform_int_distribution<std::size_t>(kind == CaseKind::LexTrio ? 2 : 1, selection ? 4 : 5)(rng);
    // log-uniform size; keep the join output moderate
    const double lg = std::uniform_real_distribution<double>(0, std::log2(static_cast<double>(max_tuples)))(rng);
    p.tuples = std::max<std::size_t>(1, static_cast<std::size_t>(std::exp2(lg)));
    p.domain = std::max<std::size_t>(3, p.tuples / std::uniform_int_distribution<std::size_t>(1, 3)(rng));
    p.weight_lo = std::bernoulli_distribution(0.3)(rng) ? -5 : 0;
    p.weight_hi = 9;
    p.dangling = std::uniform_real_distribution<double>(0, 0.4)(rng);
    p.self_join = p.shape == Shape::Path && std::bernoulli_distribution(0.2)(rng);
    p.seed = rng();
    Instance inst = random_instance(p);
    if (selection) add_selection(inst, p.domain, rng);

    const auto& q = inst.query.query;
    const auto vars = q.variables();
    const Direction dir = std::bernoulli_distribution(0.5)(rng) ? Direction::Desc : Direction::Asc;
    switch (kind) {
      case CaseKind::LexTrioFree: {
        std::vector<std::string> L;
        std::set<std::string> bound;
        for (auto a : random_rip_order(q, rng)) {
          std::vector<std::string> fresh;
          for (const auto& v : q.body[a].variables()) {
            if (bound.insert(v).second) fresh.push_back(v);
          }
          std::shuffle(fresh.begin(), fresh.end(), rng);
          L.insert(L.end(), fresh.begin(), fresh.end());
        }
        if (std::bernoulli_distribution(0.3)(rng)) {
          L.resize(std::uniform_int_distribution<std::size_t>(1, L.size())(rng));
        }
        inst.query.ranking = LexOrder{L, dir};
        return inst;
      }
      case CaseKind::LexTrio: {
        std::vector<std::string> L = vars;
        for (int attempt = 0; attempt < 100; ++attempt) {
          std::shuffle(L.begin(), L.end(), rng);
          std::vector<std::string> cut(L.begin(), L.begin() + static_cast<long>(std::uniform_int_distribution<std::size_t>(
                                                                    std::min<std::size_t>(3, L.size()), L.size())(rng)));
          if (has_disruptive_trio(q, cut)) {
            inst.query.ranking = LexOrder{cut, dir};
            return inst;
          }
        }
        continue;  // no trio possible here; draw another instance
      }
      case CaseKind::Sum:
        inst.query.ranking = SumOrder{random_terms(vars, rng), dir};
        return inst;
      case CaseKind::Max:
        inst.query.ranking = MaxOrder{random_terms(vars, rng), dir};
        return inst;
      case CaseKind::TupleWeight:
        inst.query.ranking = TupleWeightOrder{dir};
        return inst;
    }
  }
}

std::string dump_instance(const Instance& inst) {
  std::ostringstream os;
  os << "QUERY " << to_string(inst.query.query) << "\nORDER BY " << to_string(inst.query.ranking) << ";\n";
  for (const auto& [name, rel] : inst.db.relations) {
    os << "# " << name << "\n";
    for (std::size_t c = 0; c < rel.arity(); ++c) os << (c ? "," : "") << rel.columns[c];
    if (rel.weights) os << ",__weight";
    os << "\n";
    for (std::size_t t = 0; t < rel.size(); ++t) {
      for (std::size_t c = 0; c < rel.arity(); ++c) os << (c ? "," : "") << rel.tuples[t][c].to_string();
      if (rel.weights) os << "," << (*rel.weights)[t];
      os << "\n";
    }
  }
  for (const auto& [name, table] : inst.db.weight_tables) {
    std::map<Value, double> sorted(table.begin(), table.end());
    os << "# weight table " << name << "\nvalue,weight\n";
    for (const auto& [v, w] : sorted) os << v.to_string() << "," << w << "\n";
  }
  return os.str();
}

}  // namespace anyk
