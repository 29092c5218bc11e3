#include "anyk/query.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

namespace anyk {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

std::vector<std::string> Atom::variables() const {
  std::vector<std::string> out;
  for (const auto& t : terms) {
    if (t.is_variable() && std::find(out.begin(), out.end(), t.var()) == out.end()) {
      out.push_back(t.var());
    }
  }
  return out;
}

bool Atom::contains(const std::string& var) const {
  return std::any_of(terms.begin(), terms.end(),
                     [&](const Term& t) { return t.is_variable() && t.var() == var; });
}

std::vector<std::string> ConjunctiveQuery::variables() const {
  std::vector<std::string> out;
  for (const auto& atom : body) {
    for (auto& v : atom.variables()) {
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
    }
  }
  return out;
}

bool ConjunctiveQuery::is_join_query() const {
  const auto vars = variables();
  const std::set<std::string> h(head.begin(), head.end());
  return h.size() == head.size() && h == std::set<std::string>(vars.begin(), vars.end());
}

std::string to_string(const ConjunctiveQuery& q) {
  std::ostringstream os;
  os << q.name << "(";
  for (std::size_t i = 0; i < q.head.size(); ++i) os << (i ? "," : "") << q.head[i];
  os << ") :- ";
  for (std::size_t a = 0; a < q.body.size(); ++a) {
    const auto& atom = q.body[a];
    os << (a ? ", " : "") << atom.relation << "(";
    for (std::size_t i = 0; i < atom.terms.size(); ++i) {
      const auto& t = atom.terms[i];
      os << (i ? "," : "");
      if (t.is_variable()) {
        os << t.var();
      } else if (t.value().tag() == ValueTag::Text) {
        os << '\'' << t.value().as_text() << '\'';
      } else {
        os << t.value().to_string();
      }
    }
    os << ")";
  }
  return os.str();
}

namespace {

std::string direction_suffix(Direction d) { return d == Direction::Desc ? " DESC" : ""; }

std::string terms_string(const std::vector<WeightTerm>& terms, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += sep;
    out += terms[i].table ? "w:" + *terms[i].table + "(" + terms[i].variable + ")"
                          : terms[i].variable;
  }
  return out;
}

}  // namespace

std::string to_string(const RankingSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, LexOrder>) {
          std::string out = "LEX ";
          for (std::size_t i = 0; i < s.variables.size(); ++i) {
            out += (i ? ", " : "") + s.variables[i];
          }
          return out + direction_suffix(s.direction);
        } else if constexpr (std::is_same_v<S, SumOrder>) {
          return "SUM " + terms_string(s.terms, " + ") + direction_suffix(s.direction);
        } else if constexpr (std::is_same_v<S, MaxOrder>) {
          return "MAX " + terms_string(s.terms, ", ") + direction_suffix(s.direction);
        } else {
          return "TUPLEWEIGHT" + direction_suffix(s.direction);
        }
      },
      spec);
}

// ---------------------------------------------------------------------------

void Relation::add(std::vector<Value> tuple, std::optional<double> weight) {
  if (tuple.size() != arity()) {
    throw SchemaError("relation " + name + ": tuple of length " + std::to_string(tuple.size()) +
                      ", arity is " + std::to_string(arity()));
  }
  if (tags.size() != arity()) {
    tags.clear();
    for (const auto& v : tuple) tags.push_back(v.tag());
  }
  for (std::size_t i = 0; i < arity(); ++i) {
    if (tuple[i].tag() != tags[i]) {
      throw SchemaError("relation " + name + ", column " + columns[i] + ": expected " +
                        std::string(tag_name(tags[i])) + ", got " +
                        std::string(tag_name(tuple[i].tag())));
    }
  }
  if (weight && !weights) {
    if (!tuples.empty()) {
      throw SchemaError("relation " + name + ": weight given for some tuples only");
    }
    weights.emplace();
  }
  if (weights) {
    if (!weight) throw SchemaError("relation " + name + ": weight missing for a tuple");
    weights->push_back(*weight);
  }
  tuples.push_back(std::move(tuple));
}

void Relation::deduplicate() {
  struct RowHash {
    std::size_t operator()(const std::vector<Value>* row) const {
      std::size_t h = 0;
      for (const auto& v : *row) h = h * 1000003 ^ v.hash();
      return h;
    }
  };
  struct RowEq {
    bool operator()(const std::vector<Value>* a, const std::vector<Value>* b) const {
      return *a == *b;
    }
  };
  std::unordered_set<const std::vector<Value>*, RowHash, RowEq> seen;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (seen.insert(&tuples[i]).second) keep.push_back(i);
  }
  if (keep.size() == tuples.size()) return;
  std::vector<std::vector<Value>> kept;
  std::vector<double> kept_weights;
  for (auto i : keep) {
    kept.push_back(std::move(tuples[i]));
    if (weights) kept_weights.push_back((*weights)[i]);
  }
  tuples = std::move(kept);
  if (weights) weights = std::move(kept_weights);
}

std::size_t Database::size() const {
  std::size_t n = 0;
  for (const auto& [_, r] : relations) n += r.size();
  return n;
}

const Relation& Database::relation(const std::string& name) const {
  auto it = relations.find(name);
  if (it == relations.end()) throw SchemaError("unknown relation " + name);
  return it->second;
}

Relation& Database::add_relation(Relation r) {
  auto name = r.name;
  return relations.insert_or_assign(std::move(name), std::move(r)).first->second;
}

// ---------------------------------------------------------------------------

namespace {

struct VariableBinding {
  std::optional<ValueTag> tag;
  // (relation, column) pairs bound to the variable
  std::vector<std::pair<const Relation*, std::size_t>> columns;
};

void check_terms(const std::vector<WeightTerm>& terms,
                 const std::map<std::string, VariableBinding>& bindings, const Database& db) {
  for (const auto& term : terms) {
    auto it = bindings.find(term.variable);
    if (it == bindings.end()) throw SchemaError("unknown variable in ORDER BY: " + term.variable);
    if (!term.table) {
      if (it->second.tag == ValueTag::Text) {
        throw SchemaError("variable " + term.variable +
                          " is text; identity weights need a weight table");
      }
      continue;
    }
    auto table = db.weight_tables.find(*term.table);
    if (table == db.weight_tables.end()) {
      throw SchemaError("unknown weight table " + *term.table);
    }
    for (const auto& [rel, col] : it->second.columns) {
      for (const auto& tuple : rel->tuples) {
        if (!table->second.contains(tuple[col])) {
          throw SchemaError("weight table " + *term.table + " has no entry for value " +
                            tuple[col].to_string() + " of variable " + term.variable);
        }
      }
    }
  }
}

}  // namespace

void validate(const ParsedQuery& pq, const Database& db) {
  const auto& q = pq.query;
  if (q.body.empty()) throw SchemaError("query has no atoms");
  std::map<std::string, VariableBinding> bindings;
  for (const auto& atom : q.body) {
    const Relation& rel = db.relation(atom.relation);
    if (rel.arity() != atom.terms.size()) {
      throw SchemaError("atom " + atom.relation + " has " + std::to_string(atom.terms.size()) +
                        " terms, relation arity is " + std::to_string(rel.arity()));
    }
    for (std::size_t i = 0; i < atom.terms.size(); ++i) {
      const auto& term = atom.terms[i];
      const bool typed = rel.tags.size() == rel.arity();
      if (!term.is_variable()) {
        if (typed && term.value().tag() != rel.tags[i]) {
          throw SchemaError("constant " + term.value().to_string() + " in " + atom.relation +
                            " does not match column type " + std::string(tag_name(rel.tags[i])));
        }
        continue;
      }
      auto& b = bindings[term.var()];
      b.columns.emplace_back(&rel, i);
      if (!typed) continue;
      if (b.tag && *b.tag != rel.tags[i]) {
        throw SchemaError("variable " + term.var() + " joins columns of types " +
                          std::string(tag_name(*b.tag)) + " and " +
                          std::string(tag_name(rel.tags[i])));
      }
      b.tag = rel.tags[i];
    }
  }
  for (const auto& h : q.head) {
    if (!bindings.contains(h)) throw SchemaError("head variable " + h + " not in body");
  }
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, LexOrder>) {
          std::set<std::string> seen;
          for (const auto& v : s.variables) {
            if (!bindings.contains(v)) throw SchemaError("unknown variable in ORDER BY: " + v);
            if (!seen.insert(v).second) throw SchemaError("repeated variable in LEX order: " + v);
          }
        } else if constexpr (std::is_same_v<S, TupleWeightOrder>) {
          for (const auto& atom : q.body) {
            if (!db.relation(atom.relation).weights) {
              throw SchemaError("TUPLEWEIGHT needs a __weight column in " + atom.relation);
            }
          }
        } else {
          if (s.terms.empty()) throw SchemaError("ranking has no terms");
          check_terms(s.terms, bindings, db);
        }
      },
      pq.ranking);
}

// ---------------------------------------------------------------------------

double term_weight(const WeightTerm& term, const Value& v, const Database& db) {
  if (term.table) {
    auto table = db.weight_tables.find(*term.table);
    if (table == db.weight_tables.end()) throw SchemaError("unknown weight table " + *term.table);
    auto it = table->second.find(v);
    if (it == table->second.end()) {
      throw SchemaError("weight table " + *term.table + " has no entry for " + v.to_string());
    }
    return it->second;
  }
  if (auto x = v.numeric()) return *x;
  throw SchemaError("identity weight on text value " + v.to_string());
}

AnswerWeight answer_weight(const Assignment& a, const RankingSpec& spec, const ConjunctiveQuery& q,
                           const Database& db) {
  auto lookup = [&](const std::string& var) -> const Value& {
    auto it = a.find(var);
    if (it == a.end()) throw std::invalid_argument("assignment misses variable " + var);
    return it->second;
  };
  return std::visit(
      [&](const auto& s) -> AnswerWeight {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, LexOrder>) {
          std::vector<Value> key;
          for (const auto& v : s.variables) key.push_back(lookup(v));
          return key;
        } else if constexpr (std::is_same_v<S, SumOrder>) {
          double total = 0;
          for (const auto& t : s.terms) total += term_weight(t, lookup(t.variable), db);
          return total;
        } else if constexpr (std::is_same_v<S, MaxOrder>) {
          double best = 0;
          for (std::size_t i = 0; i < s.terms.size(); ++i) {
            const double w = term_weight(s.terms[i], lookup(s.terms[i].variable), db);
            best = i == 0 ? w : std::max(best, w);
          }
          return best;
        } else {
          double total = 0;
          for (const auto& atom : q.body) {
            const auto& rel = db.relation(atom.relation);
            std::vector<Value> tuple;
            for (const auto& t : atom.terms) tuple.push_back(t.is_variable() ? lookup(t.var()) : t.value());
            auto it = std::find(rel.tuples.begin(), rel.tuples.end(), tuple);
            if (it == rel.tuples.end() || !rel.weights) {
              throw std::invalid_argument("assignment does not match a weighted tuple of " +
                                          atom.relation);
            }
            total += (*rel.weights)[static_cast<std::size_t>(it - rel.tuples.begin())];
          }
          return total;
        }
      },
      spec);
}

int compare_lex_keys(const std::vector<Value>& a, const std::vector<Value>& b, Direction direction) {
  const auto c = std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
  const int r = c < 0 ? -1 : (c > 0 ? 1 : 0);
  return direction == Direction::Desc ? -r : r;
}

}  // namespace anyk
