#include "anyk/bench.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <regex>
#include <stdexcept>

#include "anyk/engine.hpp"
#include "anyk/preprocess.hpp"

namespace anyk {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

std::int64_t median(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  return v.empty() ? 0 : v[v.size() / 2];
}

bool same_answer(const Answer& a, const RankedRow& b) {
  if (a.values != b.values || a.weight.has_value() != b.weight.has_value()) return false;
  if (!a.weight) return true;
  return std::abs(*a.weight - *b.weight) <= 1e-9 * std::max(1.0, std::abs(*b.weight));
}

// Weights on a 2^-32 grid: sums are exact in double, so the engine and the
// oracle agree bit for bit while ties stay rare.
double grid_weight(std::mt19937_64& rng) {
  constexpr std::int64_t scale = std::int64_t{1} << 32;
  return static_cast<double>(std::uniform_int_distribution<std::int64_t>(0, scale - 1)(rng)) / scale;
}

void write_answer(std::ostream& os, const Answer& a) {
  for (std::size_t i = 0; i < a.values.size(); ++i) os << (i ? "," : "") << a.values[i].to_string();
  if (a.weight) os << "," << *a.weight;
  os << std::endl;
}

}  // namespace

std::size_t join_first(const ParsedQuery& pq, const Database& db) {
  const Plan plan = plan_query(pq, db);
  if (plan.strategy != Strategy::Sum) throw std::invalid_argument("join-first supports SUM and TUPLEWEIGHT orders");
  const EncodedInstance inst = encode(plan.query, plan.data);
  const auto tw = signed_tuple_weights(plan, inst);
  const Reduction r = semijoin_reduce_lex(inst, plan.tree, plan.rel, LexKey{});
  if (r.empty()) return 0;

  const std::size_t l = r.size();
  std::vector<std::vector<double>> w(l);
  for (std::size_t pos = 0; pos < l; ++pos) w[pos] = tw[plan.rel[pos]];

  std::vector<std::uint32_t> cells;
  std::vector<double> weights;
  std::vector<std::uint32_t> rows(l);
  std::function<void(std::size_t, double)> dfs = [&](std::size_t pos, double acc) {
    if (pos == l) {
      cells.insert(cells.end(), rows.begin(), rows.end());
      weights.push_back(acc);
      return;
    }
    const std::uint32_t g = pos == 0 ? 0 : r.group_from_parent(pos, rows[static_cast<std::size_t>(r.layout.nodes[pos].parent)]);
    for (auto m : r.nodes[pos].index.group(g)) {
      rows[pos] = m;
      dfs(pos + 1, acc + w[pos][m]);
    }
  };
  dfs(0, 0.0);

  std::vector<std::uint32_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (weights[a] != weights[b]) return weights[a] < weights[b];
    for (std::size_t pos = 0; pos < l; ++pos) {
      const auto& rank = r.nodes[pos].rank;
      const auto ra = rank[cells[a * l + pos]], rb = rank[cells[b * l + pos]];
      if (ra != rb) return ra < rb;
    }
    return false;
  });
  return order.size();
}

TtkCurve measure_ttk(const ParsedQuery& pq, const Database& db, const std::vector<std::size_t>& checkpoints,
                     const TtkOptions& opt) {
  TtkCurve curve;
  curve.n = db.size();
  curve.atoms = pq.query.body.size();
  curve.spec = to_string(pq.ranking);
  std::vector<std::size_t> ks = checkpoints;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  const auto deadline = Clock::now() + opt.timeout;

  if (opt.anyk) {
    const auto t0 = Clock::now();
    auto stream = enumerate(pq, db);
    std::size_t i = 0;
    for (; i < ks.size() && ks[i] == 0; ++i) curve.samples.push_back({"anyk", curve.n, 0, since(t0)});
    bool more = true;
    while (i < ks.size() && more) {
      more = stream.advance();
      const std::size_t k = stream.emitted();
      if (more && opt.echo) write_answer(*opt.echo, stream.current());
      if (!more) {
        // checkpoints past the output size are never reached
        if (ks.back() == kFull) curve.samples.push_back({"anyk", curve.n, k, since(t0)});
        break;
      }
      if (ks[i] == k) {
        curve.samples.push_back({"anyk", curve.n, k, since(t0)});
        ++i;
      }
      if ((k & 0xfff) == 0 && Clock::now() > deadline) {
        curve.timed_out = true;
        break;
      }
    }
    curve.answers = stream.emitted();
  }

  if (opt.join_first && !curve.timed_out) {
    const auto t0 = Clock::now();
    const std::size_t total = join_first(pq, db);
    const auto elapsed = since(t0);
    curve.answers = total;
    for (auto k : ks) {
      if (k == kFull) {
        curve.samples.push_back({"join-first", curve.n, total, elapsed});
      } else if (k <= total) {
        curve.samples.push_back({"join-first", curve.n, k, elapsed});
      }
    }
  }

  if (opt.verify) {
    try {
      auto stream = enumerate(pq, db, opt.verify_first);
      const auto expected = join_then_rank(pq, db, stream.tie_order(), opt.verify_max_rows);
      std::size_t i = 0;
      while (auto a = stream.next()) {
        if (i >= expected.rows.size() || !same_answer(*a, expected.rows[i])) curve.verified = false;
        ++i;
      }
      if (i != std::min(opt.verify_first, expected.rows.size())) curve.verified = false;
    } catch (const TooLarge&) {
      curve.verification_skipped = true;
    }
  }
  return curve;
}

Instance worst_case_path3(std::size_t n, std::uint64_t seed) {
  const std::size_t m = std::max<std::size_t>(1, n / 3);
  std::mt19937_64 rng(seed);
  Instance inst;
  auto& q = inst.query.query;
  q.head = {"x1", "x2", "x3", "x4"};
  const char* vars[3][2] = {{"x1", "x2"}, {"x2", "x3"}, {"x3", "x4"}};
  for (int a = 0; a < 3; ++a) {
    Relation rel;
    rel.name = "R" + std::to_string(a + 1);
    rel.columns = {"a", "b"};
    rel.weights.emplace();
    for (std::size_t i = 0; i < m; ++i) {
      const auto v = static_cast<std::int64_t>(i);
      switch (a) {
        case 0: rel.add({Value(v), Value(std::int64_t{0})}, grid_weight(rng)); break;
        case 1: rel.add({Value(std::int64_t{0}), Value(v)}, grid_weight(rng)); break;
        default: rel.add({Value(v), Value(v)}, grid_weight(rng)); break;
      }
    }
    inst.db.add_relation(std::move(rel));
    q.body.push_back(Atom{"R" + std::to_string(a + 1), {Term::variable(vars[a][0]), Term::variable(vars[a][1])}});
  }
  WeightTable w;
  for (std::size_t i = 0; i < m; ++i) w[Value(static_cast<std::int64_t>(i))] = grid_weight(rng);
  inst.db.weight_tables["w"] = std::move(w);
  apply_spec(inst, "sum");
  return inst;
}

Instance uniform_instance(Shape shape, std::size_t atoms, std::size_t tuples, std::size_t domain,
                          std::uint64_t seed) {
  if (atoms == 0 || domain == 0) throw std::invalid_argument("atoms and domain must be positive");
  std::mt19937_64 rng(seed);
  Instance inst;
  auto& q = inst.query.query;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t a = 0; a < atoms; ++a) {
    switch (shape) {
      case Shape::Path: edges.emplace_back(a, a + 1); break;
      case Shape::Star: edges.emplace_back(0, a + 1); break;
      case Shape::Tree:
        edges.emplace_back(a == 0 ? 0 : std::uniform_int_distribution<std::size_t>(0, a)(rng), a + 1);
        break;
    }
  }
  for (std::size_t v = 0; v <= atoms; ++v) q.head.push_back("x" + std::to_string(v + 1));
  std::uniform_int_distribution<std::int64_t> value(0, static_cast<std::int64_t>(domain) - 1);
  for (std::size_t a = 0; a < atoms; ++a) {
    Relation rel;
    rel.name = "R" + std::to_string(a + 1);
    rel.columns = {"a", "b"};
    rel.weights.emplace();
    for (std::size_t t = 0; t < tuples; ++t) rel.add({Value(value(rng)), Value(value(rng))}, grid_weight(rng));
    rel.deduplicate();
    inst.db.add_relation(std::move(rel));
    q.body.push_back(Atom{"R" + std::to_string(a + 1),
                          {Term::variable(q.head[edges[a].first]), Term::variable(q.head[edges[a].second])}});
  }
  WeightTable w;
  for (std::size_t v = 0; v < domain; ++v) w[Value(static_cast<std::int64_t>(v))] = grid_weight(rng);
  inst.db.weight_tables["w"] = std::move(w);
  apply_spec(inst, "sum");
  return inst;
}

void apply_spec(Instance& inst, const std::string& spec) {
  const auto& head = inst.query.query.head;
  std::vector<WeightTerm> terms;
  for (const auto& v : head) terms.push_back({v, "w"});
  if (spec == "sum") {
    inst.query.ranking = SumOrder{terms, Direction::Asc};
  } else if (spec == "max") {
    inst.query.ranking = MaxOrder{terms, Direction::Asc};
  } else if (spec == "tupleweight") {
    inst.query.ranking = TupleWeightOrder{Direction::Asc};
  } else if (spec == "lex") {
    inst.query.ranking = LexOrder{head, Direction::Asc};
  } else {
    throw std::invalid_argument("unknown spec " + spec + " (sum, max, tupleweight, lex)");
  }
}

std::vector<ScalingRow> scaling_report(const std::vector<std::size_t>& ns, std::size_t repetitions,
                                       const std::function<Instance(std::size_t)>& make) {
  std::vector<ScalingRow> rows;
  for (auto n : ns) {
    const Instance inst = make(n);
    ScalingRow row;
    row.n = n;
    std::vector<std::int64_t> first, full;
    for (std::size_t rep = 0; rep < std::max<std::size_t>(1, repetitions); ++rep) {
      auto t0 = Clock::now();
      {
        auto s = enumerate(inst.query, inst.db);
        s.advance();
        first.push_back(since(t0));
      }
      t0 = Clock::now();
      auto s = enumerate(inst.query, inst.db);
      while (s.advance()) {
      }
      full.push_back(since(t0));
      row.answers = s.emitted();
    }
    row.tt1_ns = median(first);
    row.ttfull_ns = median(full);
    if (!rows.empty()) {
      row.tt1_ratio = static_cast<double>(row.tt1_ns) / static_cast<double>(rows.back().tt1_ns);
      row.ttfull_ratio = static_cast<double>(row.ttfull_ns) / static_cast<double>(rows.back().ttfull_ns);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_ttk_csv(std::ostream& os, const std::vector<TtkSample>& samples, bool header) {
  if (header) os << "competitor,n,k,elapsed_ns\n";
  for (const auto& s : samples) os << s.competitor << "," << s.n << "," << s.k << "," << s.elapsed_ns << "\n";
}

void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows) {
  os << "n,answers,tt1_ns,ttfull_ns,tt1_ratio,ttfull_ratio\n";
  for (const auto& r : rows) {
    os << r.n << "," << r.answers << "," << r.tt1_ns << "," << r.ttfull_ns << "," << r.tt1_ratio << ","
       << r.ttfull_ratio << "\n";
  }
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  auto number = [](const std::string& s) -> std::size_t {
    static const std::regex pow2(R"(\s*2\^(\d+)\s*)");
    std::smatch m;
    if (std::regex_match(s, m, pow2)) return std::size_t{1} << std::stoul(m[1]);
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad size " + s);
    return v;
  };
  std::vector<std::size_t> out;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = number(text.substr(0, dots)), hi = number(text.substr(dots + 2));
    if (lo == 0 || hi < lo) throw std::invalid_argument("bad size range " + text);
    for (auto n = lo; n <= hi; n *= 2) out.push_back(n);
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    out.push_back(number(text.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace anyk
