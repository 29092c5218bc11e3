#include "anyk/encoded.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_map>

namespace anyk {

int EncodedAtom::column_of(std::size_t var) const {
  auto it = std::find(vars.begin(), vars.end(), var);
  return it == vars.end() ? -1 : static_cast<int>(it - vars.begin());
}

std::size_t EncodedInstance::variable(const std::string& name) const {
  auto it = std::find(variables.begin(), variables.end(), name);
  if (it == variables.end()) throw std::invalid_argument("unknown variable " + name);
  return static_cast<std::size_t>(it - variables.begin());
}

std::size_t EncodedInstance::size() const {
  std::size_t n = 0;
  for (const auto& a : atoms) n += a.rows;
  return n;
}

EncodedInstance encode(const ConjunctiveQuery& q, const Database& d) {
  EncodedInstance inst;
  inst.variables = q.variables();
  inst.dictionary.resize(inst.variables.size());

  std::vector<const Relation*> rels;
  for (const auto& atom : q.body) {
    const Relation& rel = d.relation(atom.relation);
    if (rel.arity() != atom.terms.size()) {
      throw SchemaError("atom " + atom.relation + " does not match relation arity");
    }
    rels.push_back(&rel);
    EncodedAtom ea;
    ea.relation = atom.relation;
    for (const auto& t : atom.terms) {
      if (!t.is_variable()) throw std::invalid_argument("encode expects a normalized query");
      ea.vars.push_back(inst.variable(t.var()));
    }
    inst.atoms.push_back(std::move(ea));
  }

  // column tags; a variable keeps one tag across all its columns
  std::vector<std::optional<ValueTag>> tags(inst.variables.size());
  for (std::size_t a = 0; a < q.body.size(); ++a) {
    const auto& ea = inst.atoms[a];
    for (const auto& tuple : rels[a]->tuples) {
      for (std::size_t c = 0; c < ea.arity(); ++c) {
        auto& tag = tags[ea.vars[c]];
        if (tag && *tag != tuple[c].tag()) {
          throw SchemaError("variable " + inst.variables[ea.vars[c]] + " mixes value types");
        }
        tag = tuple[c].tag();
      }
    }
  }

  // Integer variables (the common case) use sorted int64 keys and binary
  // search; the rest sort and hash Values.
  std::vector<std::vector<std::int64_t>> int_keys(inst.variables.size());
  std::vector<std::unordered_map<Value, std::uint32_t, ValueHash>> ids(inst.variables.size());
  auto is_int = [&](std::size_t v) { return tags[v] == ValueTag::Int; };
  for (std::size_t a = 0; a < q.body.size(); ++a) {
    const auto& ea = inst.atoms[a];
    for (std::size_t c = 0; c < ea.arity(); ++c) {
      const std::size_t v = ea.vars[c];
      for (const auto& tuple : rels[a]->tuples) {
        if (is_int(v)) {
          int_keys[v].push_back(tuple[c].as_int());
        } else {
          inst.dictionary[v].push_back(tuple[c]);
        }
      }
    }
  }
  // Dense integer ranges get a direct offset -> id table instead.
  std::vector<std::int64_t> base(inst.variables.size(), 0);
  std::vector<std::vector<std::uint32_t>> dense(inst.variables.size());
  for (std::size_t v = 0; v < inst.variables.size(); ++v) {
    auto& dict = inst.dictionary[v];
    if (is_int(v)) {
      auto& keys = int_keys[v];
      if (keys.empty()) continue;
      const auto [lo, hi] = std::minmax_element(keys.begin(), keys.end());
      const auto range = static_cast<std::uint64_t>(*hi) - static_cast<std::uint64_t>(*lo);
      if (range < 4 * keys.size() + 1024) {
        base[v] = *lo;
        auto& table = dense[v];
        table.assign(range + 1, 0);
        for (auto k : keys) table[static_cast<std::size_t>(k - base[v])] = 1;
        std::uint32_t next = 0;
        for (std::size_t i = 0; i < table.size(); ++i) {
          if (!table[i]) continue;
          table[i] = next++;
          dict.emplace_back(base[v] + static_cast<std::int64_t>(i));
        }
        continue;
      }
      std::sort(keys.begin(), keys.end());
      keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
      dict.assign(keys.begin(), keys.end());
      continue;
    }
    std::sort(dict.begin(), dict.end());
    dict.erase(std::unique(dict.begin(), dict.end()), dict.end());
    ids[v].reserve(dict.size());
    for (std::size_t i = 0; i < dict.size(); ++i) ids[v].emplace(dict[i], static_cast<std::uint32_t>(i));
  }
  auto id_of = [&](std::size_t v, const Value& x) -> std::uint32_t {
    if (!is_int(v)) return ids[v].at(x);
    if (!dense[v].empty()) return dense[v][static_cast<std::size_t>(x.as_int() - base[v])];
    const auto& keys = int_keys[v];
    return static_cast<std::uint32_t>(std::lower_bound(keys.begin(), keys.end(), x.as_int()) - keys.begin());
  };

  for (std::size_t a = 0; a < q.body.size(); ++a) {
    auto& ea = inst.atoms[a];
    const Relation& rel = *rels[a];
    ea.rows = rel.size();
    ea.cells.reserve(ea.rows * ea.arity());
    for (const auto& tuple : rel.tuples) {
      for (std::size_t c = 0; c < ea.arity(); ++c) ea.cells.push_back(id_of(ea.vars[c], tuple[c]));
    }
    if (rel.weights) ea.tuple_weights = *rel.weights;
  }
  return inst;
}

}  // namespace anyk
