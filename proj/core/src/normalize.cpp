#include "anyk/normalize.hpp"

#include <map>

namespace anyk {

namespace {

// Filters `src` by the constants and repeated variables of `atom` and
// projects it onto the first occurrence of every variable. Returns false
// (touching nothing) when the atom has no selection.
bool select(const Atom& atom, const Relation& src, Relation& out, std::vector<Term>& terms) {
  std::vector<std::size_t> kept;
  std::vector<std::pair<std::size_t, std::size_t>> equalities;
  std::vector<std::pair<std::size_t, Value>> constants;
  std::map<std::string, std::size_t> first;
  for (std::size_t i = 0; i < atom.terms.size(); ++i) {
    const auto& t = atom.terms[i];
    if (!t.is_variable()) {
      constants.emplace_back(i, t.value());
    } else if (auto it = first.find(t.var()); it != first.end()) {
      equalities.emplace_back(it->second, i);
    } else {
      first.emplace(t.var(), i);
      kept.push_back(i);
    }
  }
  if (constants.empty() && equalities.empty()) return false;

  out = Relation{};
  out.name = src.name;
  for (auto i : kept) {
    out.columns.push_back(src.columns[i]);
    if (i < src.tags.size()) out.tags.push_back(src.tags[i]);
  }
  if (src.weights) out.weights.emplace();
  for (std::size_t t = 0; t < src.size(); ++t) {
    const auto& row = src.tuples[t];
    bool ok = true;
    for (const auto& [i, v] : constants) ok = ok && row[i] == v;
    for (const auto& [a, b] : equalities) ok = ok && row[a] == row[b];
    if (!ok) continue;
    std::vector<Value> projected;
    projected.reserve(kept.size());
    for (auto i : kept) projected.push_back(row[i]);
    out.tuples.push_back(std::move(projected));
    if (src.weights) out.weights->push_back((*src.weights)[t]);
  }
  // only an all-constant atom can project distinct rows onto one tuple
  if (kept.empty()) out.deduplicate();

  std::vector<Term> projected_terms;
  for (auto i : kept) projected_terms.push_back(atom.terms[i]);
  terms = std::move(projected_terms);  // may alias atom.terms
  return true;
}

std::string fresh_name(const std::string& base, int copy, const Database& a, const Database& b) {
  std::string name = base + std::to_string(copy);
  while (a.relations.contains(name) || b.relations.contains(name)) name += "_";
  return name;
}

}  // namespace

std::pair<ConjunctiveQuery, Database> remove_self_joins(const ConjunctiveQuery& q, const Database& d) {
  std::map<std::string, int> uses;
  for (const auto& atom : q.body) ++uses[atom.relation];

  ConjunctiveQuery out_q = q;
  Database out_d = d;
  std::map<std::string, int> seen;
  for (auto& atom : out_q.body) {
    if (uses[atom.relation] < 2) continue;
    Relation copy = d.relation(atom.relation);
    copy.name = fresh_name(atom.relation, ++seen[atom.relation], out_d, out_d);
    atom.relation = copy.name;
    out_d.add_relation(std::move(copy));
  }
  return {std::move(out_q), std::move(out_d)};
}

std::pair<ConjunctiveQuery, Database> apply_selections(const ConjunctiveQuery& q, const Database& d) {
  ConjunctiveQuery out_q = q;
  Database out_d = d;
  for (auto& atom : out_q.body) {
    Relation filtered;
    if (select(atom, d.relation(atom.relation), filtered, atom.terms)) out_d.add_relation(std::move(filtered));
  }
  return {std::move(out_q), std::move(out_d)};
}

// One pass with one copy per atom: the result holds only the relations the
// normalized query references (and every weight table).
std::pair<ConjunctiveQuery, Database> normalize(const ConjunctiveQuery& q, const Database& d) {
  std::map<std::string, int> uses, seen;
  for (const auto& atom : q.body) ++uses[atom.relation];

  ConjunctiveQuery out_q = q;
  Database out_d;
  out_d.weight_tables = d.weight_tables;
  for (auto& atom : out_q.body) {
    const Relation& src = d.relation(atom.relation);
    if (uses[atom.relation] > 1) atom.relation = fresh_name(atom.relation, ++seen[atom.relation], d, out_d);
    if (out_d.relations.contains(atom.relation)) continue;
    Relation rel;
    if (!select(atom, src, rel, atom.terms)) rel = src;
    rel.name = atom.relation;
    out_d.add_relation(std::move(rel));
  }
  return {std::move(out_q), std::move(out_d)};
}

}  // namespace anyk
