#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "anyk/query.hpp"

namespace anyk {

/// One atom's relation with values replaced by per-variable ids.
struct EncodedAtom {
  std::string relation;
  /// Variable index of each column.
  std::vector<std::size_t> vars;
  std::size_t rows = 0;
  /// Row-major ids, rows * arity.
  std::vector<std::uint32_t> cells;
  /// w(t) per row, empty when the relation has no weights.
  std::vector<double> tuple_weights;

  std::size_t arity() const { return vars.size(); }
  std::uint32_t at(std::size_t row, std::size_t col) const { return cells[row * vars.size() + col]; }
  std::span<const std::uint32_t> row(std::size_t r) const {
    return {cells.data() + r * vars.size(), vars.size()};
  }
  /// Column holding `var`, or -1.
  int column_of(std::size_t var) const;
};

/// A normalized join query over dictionary-encoded data. Ids are dense per
/// variable and preserve the value order, so comparing ids compares values.
struct EncodedInstance {
  std::vector<std::string> variables;
  /// Sorted distinct values of each variable (id -> value).
  std::vector<std::vector<Value>> dictionary;
  std::vector<EncodedAtom> atoms;

  std::size_t variable(const std::string& name) const;
  std::size_t size() const;
  const Value& decode(std::size_t var, std::uint32_t id) const { return dictionary[var][id]; }
};

/// Expects a normalized query: distinct relations per atom, only distinct
/// variables as terms. Throws SchemaError on mixed-tag variables.
EncodedInstance encode(const ConjunctiveQuery& q, const Database& d);

}  // namespace anyk
