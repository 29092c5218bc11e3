#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "anyk/query.hpp"

namespace anyk {

/// Splits one CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line);

/// Header row = column names. A column named `__weight` supplies tuple
/// weights. Column tags are inferred (int, then float, then text).
/// Duplicate tuples are dropped.
Relation read_relation_csv(std::istream& in, const std::string& name);
Relation load_relation_csv(const std::filesystem::path& path, const std::string& name);

/// Two columns: value, weight. A header row is skipped when its weight
/// field is not numeric.
WeightTable read_weight_table_csv(std::istream& in);

/// Loads `<dir>/<Rel>.csv` for every relation in the body and
/// `<dir>/<table>.csv` for every weight table the ranking references.
Database load_database(const std::filesystem::path& dir, const ParsedQuery& pq);

void write_relation_csv(std::ostream& out, const Relation& r);

}  // namespace anyk
