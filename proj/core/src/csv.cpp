#include "anyk/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace anyk {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

namespace {

std::vector<std::vector<std::string>> read_records(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

ValueTag widen(ValueTag a, ValueTag b) { return static_cast<ValueTag>(std::max(int(a), int(b))); }

}  // namespace

Relation read_relation_csv(std::istream& in, const std::string& name) {
  auto rows = read_records(in);
  if (rows.empty()) throw SchemaError("relation " + name + ": missing header row");
  const auto header = rows.front();
  Relation r;
  r.name = name;
  std::optional<std::size_t> weight_col;
  std::vector<std::size_t> data_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "__weight") {
      weight_col = i;
    } else {
      r.columns.push_back(header[i]);
      data_cols.push_back(i);
    }
  }
  if (r.columns.empty()) throw SchemaError("relation " + name + " has no data columns");

  std::vector<ValueTag> tags(data_cols.size(), ValueTag::Int);
  for (std::size_t row = 1; row < rows.size(); ++row) {
    if (rows[row].size() != header.size()) {
      throw SchemaError("relation " + name + ", line " + std::to_string(row + 1) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(rows[row].size()));
    }
    for (std::size_t c = 0; c < data_cols.size(); ++c) {
      tags[c] = widen(tags[c], Value::infer_tag(rows[row][data_cols[c]]));
    }
  }
  r.tags = tags;
  for (std::size_t row = 1; row < rows.size(); ++row) {
    std::vector<Value> tuple;
    for (std::size_t c = 0; c < data_cols.size(); ++c) {
      tuple.push_back(Value::parse(rows[row][data_cols[c]], tags[c]));
    }
    std::optional<double> w;
    if (weight_col) {
      try {
        w = Value::parse(rows[row][*weight_col], ValueTag::Float).as_float();
      } catch (const std::invalid_argument&) {
        throw SchemaError("relation " + name + ", line " + std::to_string(row + 1) +
                          ": non-numeric __weight");
      }
    }
    r.add(std::move(tuple), w);
  }
  if (weight_col && !r.weights) r.weights.emplace();
  r.deduplicate();
  return r;
}

Relation load_relation_csv(const std::filesystem::path& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  return read_relation_csv(in, name);
}

WeightTable read_weight_table_csv(std::istream& in) {
  auto rows = read_records(in);
  WeightTable table;
  std::size_t first = 0;
  if (!rows.empty() && rows[0].size() == 2 && Value::infer_tag(rows[0][1]) == ValueTag::Text) {
    first = 1;
  }
  ValueTag key_tag = ValueTag::Int;
  for (std::size_t i = first; i < rows.size(); ++i) {
    if (rows[i].size() != 2) throw SchemaError("weight table rows need exactly 2 fields");
    key_tag = widen(key_tag, Value::infer_tag(rows[i][0]));
  }
  for (std::size_t i = first; i < rows.size(); ++i) {
    const auto w = Value::infer_tag(rows[i][1]);
    if (w == ValueTag::Text) throw SchemaError("non-numeric weight '" + rows[i][1] + "'");
    table[Value::parse(rows[i][0], key_tag)] = Value::parse(rows[i][1], ValueTag::Float).as_float();
  }
  return table;
}

Database load_database(const std::filesystem::path& dir, const ParsedQuery& pq) {
  Database db;
  std::set<std::string> names;
  for (const auto& atom : pq.query.body) names.insert(atom.relation);
  for (const auto& name : names) db.add_relation(load_relation_csv(dir / (name + ".csv"), name));

  auto load_tables = [&](const std::vector<WeightTerm>& terms) {
    for (const auto& t : terms) {
      if (!t.table || db.weight_tables.contains(*t.table)) continue;
      std::ifstream in(dir / (*t.table + ".csv"));
      if (!in) throw SchemaError("cannot open weight table " + (dir / (*t.table + ".csv")).string());
      db.weight_tables[*t.table] = read_weight_table_csv(in);
    }
  };
  if (auto* s = std::get_if<SumOrder>(&pq.ranking)) load_tables(s->terms);
  if (auto* m = std::get_if<MaxOrder>(&pq.ranking)) load_tables(m->terms);
  return db;
}

void write_relation_csv(std::ostream& out, const Relation& r) {
  auto field = [](const Value& v) {
    std::string s = v.to_string();
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
  if (r.weights) out << ",__weight";
  out << "\n";
  for (std::size_t t = 0; t < r.tuples.size(); ++t) {
    for (std::size_t i = 0; i < r.tuples[t].size(); ++i) out << (i ? "," : "") << field(r.tuples[t][i]);
    if (r.weights) out << "," << Value((*r.weights)[t]).to_string();
    out << "\n";
  }
}

}  // namespace anyk
