// anyk: ranked enumeration of acyclic join queries from the command line.
//
//   anyk run --query q.q --data dir/ [--k K] [--explain]
//   anyk analyze --query q.q
//   anyk check --seed-range 0..99
//   anyk bench --shape path --atoms 4 --n 2^10..2^16 --spec sum --out curve.csv

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "anyk/analysis.hpp"
#include "anyk/bench.hpp"
#include "anyk/csv.hpp"
#include "anyk/engine.hpp"
#include "anyk/oracle.hpp"
#include "anyk/parse.hpp"

namespace {

using namespace anyk;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

// ---------------------------------------------------------------- run

int run(const std::string& query_file, const std::string& data_dir, std::optional<std::size_t> k, bool explain) {
  const auto text = read_file(query_file);
  auto pq = parse_query(text);
  const Database db = load_database(data_dir, pq);
  validate(pq, db);
  auto stream = enumerate(pq, db, k);
  if (explain) std::cerr << stream.explain();

  std::vector<std::size_t> key_pos;  // LEX prints its key as the weight
  if (const auto* lex = std::get_if<LexOrder>(&pq.ranking)) {
    for (const auto& v : lex->variables) {
      key_pos.push_back(static_cast<std::size_t>(
          std::find(pq.query.head.begin(), pq.query.head.end(), v) - pq.query.head.begin()));
    }
  }
  for (std::size_t i = 0; i < pq.query.head.size(); ++i) std::cout << (i ? "," : "") << pq.query.head[i];
  std::cout << ",weight\n";
  while (auto a = stream.next()) {
    for (const auto& v : a->values) std::cout << csv_field(v.to_string()) << ",";
    if (a->weight) {
      std::cout << *a->weight;
    } else {
      std::string key;
      for (std::size_t i = 0; i < key_pos.size(); ++i) key += (i ? ";" : "") + a->values[key_pos[i]].to_string();
      std::cout << csv_field(key);
    }
    std::cout << std::endl;  // flushed per answer so TT(k) is observable
  }
  if (explain) std::cerr << "answers: " << stream.emitted() << "\n";
  return 0;
}

// ---------------------------------------------------------------- analyze

int analyze(const std::string& query_file) {
  const auto pq = parse_query(read_file(query_file));
  const auto& q = pq.query;
  std::vector<std::pair<std::string, std::string>> kv;
  std::cout << "query: " << to_string(q) << "\n";
  std::cout << "ranking: " << to_string(pq.ranking) << "\n";
  std::cout << "hypergraph: " << Hypergraph::of(q).to_string() << "\n";

  const bool acyclic = is_acyclic(q);
  const bool full = q.is_join_query();
  kv.emplace_back("acyclic", acyclic ? "yes" : "no");
  kv.emplace_back("join_query", full ? "yes" : "no");
  kv.emplace_back("free_connex", is_free_connex(q) ? "yes" : "no");
  if (!acyclic) {
    try {
      build_join_tree(q);
    } catch (const CyclicError& e) {
      std::cout << "cyclic residual: " << e.residual().to_string() << "\n";
    }
  }

  auto name = [&](std::size_t a) { return q.body[a].relation + "#" + std::to_string(a); };
  auto describe = [&](const JoinTree& tree, const RelOrder& rel) {
    std::string parents, order;
    for (std::size_t a = 0; a < tree.size(); ++a) {
      parents += (a ? " " : "") + name(a) + "->" + (tree.parent[a] < 0 ? "root" : name(tree.parent[a]));
    }
    for (std::size_t i = 0; i < rel.size(); ++i) order += (i ? " " : "") + name(rel[i]);
    kv.emplace_back("tree", parents);
    kv.emplace_back("rel", order);
  };

  std::string algorithm = "none";
  if (acyclic) {
    JoinTree tree = build_join_tree(q);
    RelOrder rel = topological_rel_order(tree);
    algorithm = "SUM";
    if (const auto* lex = std::get_if<LexOrder>(&pq.ranking)) {
      const auto trio = has_disruptive_trio(q, lex->variables);
      kv.emplace_back("trio", trio ? trio->a + "," + trio->b + "," + trio->c : "none");
      algorithm = "LEX-via-SUM";
      if (!trio) {
        if (auto t = l_consistent_join_tree(q, lex->variables)) {
          tree = t->tree;
          rel = t->rel;
          algorithm = "LEX";
        } else {
          kv.emplace_back("l_consistent", "not-found");
        }
      }
    }
    describe(tree, rel);
    if (!full) algorithm += " (projection: analysis only)";
  }
  kv.emplace_back("algorithm", algorithm);

  std::cout << "\n";
  for (const auto& [k, v] : kv) std::cout << k << "=" << v << "\n";
  return 0;
}

// ---------------------------------------------------------------- check

// Empty when engine and oracle agree, else a description of the first
// difference.
std::string compare(const Instance& inst) {
  try {
    auto stream = enumerate(inst.query, inst.db);
    const auto expected = join_then_rank(inst.query, inst.db, stream.tie_order());
    const std::size_t l = inst.query.query.body.size();
    std::size_t i = 0;
    while (auto a = stream.next()) {
      if (i >= expected.rows.size()) return "extra answer at position " + std::to_string(i);
      if (a->values != expected.rows[i].values || a->weight != expected.rows[i].weight) {
        return "answers differ at position " + std::to_string(i);
      }
      if (stream.frontier_size() > stream.emitted() * l) return "frontier exceeds k*l at k=" + std::to_string(i + 1);
      ++i;
    }
    if (i != expected.rows.size()) return "missing answers from position " + std::to_string(i);
  } catch (const std::exception& e) {
    return std::string("exception: ") + e.what();
  }
  return {};
}

// Greedy: drop tuples one at a time while the mismatch persists.
Instance minimize(Instance inst) {
  bool progress = true;
  while (progress) {
    progress = false;
    for (auto& [name, rel] : inst.db.relations) {
      for (std::size_t t = 0; t < rel.size();) {
        Instance trial = inst;
        auto& r = trial.db.relations.at(name);
        r.tuples.erase(r.tuples.begin() + static_cast<long>(t));
        if (r.weights) r.weights->erase(r.weights->begin() + static_cast<long>(t));
        if (!compare(trial).empty()) {
          rel = std::move(r);
          progress = true;
        } else {
          ++t;
        }
      }
    }
  }
  return inst;
}

std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) return {std::stoull(s), std::stoull(s)};
  return {std::stoull(s.substr(0, dots)), std::stoull(s.substr(dots + 2))};
}

int check(const std::string& range, std::size_t max_tuples) {
  const auto [lo, hi] = parse_range(range);
  std::size_t cases = 0;
  for (auto seed = lo; seed <= hi; ++seed) {
    for (auto kind : kAllCaseKinds) {
      const Instance inst = random_case(seed, kind, max_tuples);
      ++cases;
      const auto diff = compare(inst);
      if (diff.empty()) continue;
      std::cout << "MISMATCH seed=" << seed << " kind=" << case_name(kind) << ": " << diff << "\n";
      const Instance small = minimize(inst);
      std::cout << "minimized (" << compare(small) << "):\n" << dump_instance(small);
      return 1;
    }
  }
  std::cout << "ok: " << cases << " cases, seeds " << lo << ".." << hi << "\n";
  return 0;
}

// ---------------------------------------------------------------- bench

int bench(const std::string& shape, std::size_t atoms, const std::string& sizes, const std::string& spec,
          const std::string& out_path, const std::string& ks_text, std::size_t fanout, bool worst_case,
          const std::string& competitors, int timeout_s, bool echo, bool scaling, std::size_t reps) {
  std::vector<std::size_t> ks;
  {
    std::stringstream ss(ks_text);
    std::string item;
    while (std::getline(ss, item, ',')) ks.push_back(item == "full" ? kFull : std::stoull(item));
  }
  auto make = [&](std::size_t n) {
    Instance inst = worst_case ? worst_case_path3(n)
                               : uniform_instance(parse_shape(shape), atoms, std::max<std::size_t>(1, n / atoms),
                                                  std::max<std::size_t>(1, n / atoms / fanout));
    apply_spec(inst, spec);
    return inst;
  };

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    out = &file;
  }
  if (scaling) {
    const auto rows = scaling_report(parse_size_list(sizes), reps, make);
    write_scaling_csv(*out, rows);
    return 0;
  }

  TtkOptions opt;
  opt.anyk = competitors.find("anyk") != std::string::npos;
  opt.join_first = competitors.find("join-first") != std::string::npos;
  opt.timeout = std::chrono::seconds(timeout_s);
  if (echo) opt.echo = &std::cerr;
  bool header = true;
  for (auto n : parse_size_list(sizes)) {
    const Instance inst = make(n);
    const auto curve = measure_ttk(inst.query, inst.db, ks, opt);
    write_ttk_csv(*out, curve.samples, header);
    header = false;
    std::cerr << "n=" << n << " answers=" << curve.answers << (curve.timed_out ? " TIMEOUT" : "")
              << (curve.verification_skipped ? " (oracle check skipped: too large)"
                                             : curve.verified ? " (first answers match oracle)" : " ORACLE MISMATCH")
              << "\n";
    if (!curve.verified) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ranked enumeration of acyclic join queries"};
  app.require_subcommand(1);

  std::string query_file, data_dir;
  std::optional<std::size_t> k;
  bool explain = false;
  auto* run_cmd = app.add_subcommand("run", "Stream ranked answers as CSV");
  run_cmd->add_option("--query,-q", query_file, "Query file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--data,-d", data_dir, "Directory with <Relation>.csv and weight tables")
      ->required()
      ->check(CLI::ExistingDirectory);
  run_cmd->add_option("--k,-k", k, "Stop after k answers");
  run_cmd->add_flag("--explain", explain, "Print the plan and preprocessing statistics to stderr");

  auto* analyze_cmd = app.add_subcommand("analyze", "Structural analysis of a query");
  analyze_cmd->add_option("--query,-q", query_file, "Query file")->required()->check(CLI::ExistingFile);

  std::string seed_range = "0..99";
  std::size_t max_tuples = 200;
  auto* check_cmd = app.add_subcommand("check", "Differential test against join-then-rank");
  check_cmd->add_option("--seed-range", seed_range, "Seeds a..b (inclusive)");
  check_cmd->add_option("--max-tuples", max_tuples, "Upper bound on tuples per relation");

  std::string shape = "path", sizes = "2^10..2^16", spec = "sum", out_path, ks = "0,1,10,100,1000,full",
              competitors = "anyk,join-first";
  std::size_t atoms = 4, fanout = 2, reps = 3;
  bool worst_case = false, echo = false, scaling = false;
  int timeout_s = 300;
  auto* bench_cmd = app.add_subcommand("bench", "Measure TT(k) curves");
  bench_cmd->add_option("--shape", shape, "path, star or tree")->check(CLI::IsMember({"path", "star", "tree"}));
  bench_cmd->add_option("--atoms", atoms, "Number of atoms");
  bench_cmd->add_option("--n", sizes, "Total tuples: 2^10..2^16 (doublings) or a comma list");
  bench_cmd->add_option("--spec", spec, "sum, tupleweight, max or lex")
      ->check(CLI::IsMember({"sum", "tupleweight", "max", "lex"}));
  bench_cmd->add_option("--out", out_path, "CSV output (competitor,n,k,elapsed_ns); stdout by default");
  bench_cmd->add_option("--k", ks, "Checkpoints, comma separated; 'full' for the last answer");
  bench_cmd->add_option("--fanout", fanout, "Expected matches per join value (domain = tuples/fanout)");
  bench_cmd->add_flag("--worst-case", worst_case, "3-path instance with (n/3)^2 answers");
  bench_cmd->add_option("--competitors", competitors, "anyk, join-first or both");
  bench_cmd->add_option("--timeout", timeout_s, "Seconds per run");
  bench_cmd->add_flag("--echo", echo, "Print every anyk answer to stderr, flushed (measures I/O too)");
  bench_cmd->add_flag("--scaling", scaling, "Median TT(1)/TT(full) per n with doubling ratios instead of curves");
  bench_cmd->add_option("--repetitions", reps, "Repetitions for --scaling");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(query_file, data_dir, k, explain);
    if (*analyze_cmd) return analyze(query_file);
    if (*check_cmd) return check(seed_range, max_tuples);
    if (*bench_cmd) {
      return bench(shape, atoms, sizes, spec, out_path, ks, fanout, worst_case, competitors, timeout_s, echo, scaling,
                   reps);
    }
  } catch (const ParseError& e) {
    std::cerr << query_file << ":" << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
