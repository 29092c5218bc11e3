#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "anyk/oracle.hpp"

namespace anyk {

/// Checkpoint meaning "after the last answer".
inline constexpr std::size_t kFull = std::numeric_limits<std::size_t>::max();

struct TtkSample {
  std::string competitor;
  std::size_t n = 0;
  std::size_t k = 0;
  std::int64_t elapsed_ns = 0;
};

struct TtkCurve {
  std::string shape;
  std::string spec;
  std::size_t n = 0;
  std::size_t atoms = 0;
  std::size_t answers = 0;
  std::vector<TtkSample> samples;
  bool timed_out = false;
  /// First answers matched the oracle (or the check was skipped).
  bool verified = true;
  bool verification_skipped = false;
};

struct TtkOptions {
  bool anyk = true;
  bool join_first = true;
  std::chrono::milliseconds timeout{std::chrono::minutes(5)};
  /// Compare the first answers with join_then_rank when it fits in
  /// `verify_max_rows`.
  bool verify = true;
  std::size_t verify_first = 100;
  std::size_t verify_max_rows = 300'000;
  /// Writes every anyk answer here, flushed, while timing (off by default:
  /// the harness measures the algorithm, not I/O).
  std::ostream* echo = nullptr;
};

/// TT(k) at every checkpoint (k = 0 is preprocessing only, kFull the whole
/// output). anyk timestamps one enumeration run; join-first materializes,
/// weighs and sorts everything first, so all its checkpoints share one time.
/// Samples with k = kFull are reported with the actual answer count.
TtkCurve measure_ttk(const ParsedQuery& pq, const Database& db, const std::vector<std::size_t>& checkpoints,
                     const TtkOptions& opt = {});

/// Join-first: reduce, materialize every answer, weigh, sort. Returns the
/// answer count; supports SUM and TUPLEWEIGHT.
std::size_t join_first(const ParsedQuery& pq, const Database& db);

/// Output of size (n/3)^2: R1 = {(i,0)}, R2 = {(0,j)}, R3 = {(j,j)}, with
/// random real weights in a table "w".
Instance worst_case_path3(std::size_t n, std::uint64_t seed = 7);
/// Uniform random binary relations on a path/star/tree skeleton with
/// random real weights; `tuples` per relation, join values in [0, domain).
Instance uniform_instance(Shape shape, std::size_t atoms, std::size_t tuples, std::size_t domain,
                          std::uint64_t seed = 7);
/// Sets the ranking: "sum" (SUM of w over every variable), "tupleweight",
/// "max", or "lex" (all variables).
void apply_spec(Instance& inst, const std::string& spec);

struct ScalingRow {
  std::size_t n = 0;
  std::size_t answers = 0;
  std::int64_t tt1_ns = 0;
  std::int64_t ttfull_ns = 0;
  /// Ratio to the previous row; 0 for the first.
  double tt1_ratio = 0;
  double ttfull_ratio = 0;
};

/// Median TT(1) and TT(full) of the anyk enumerator per n, with ratios
/// between consecutive sizes.
std::vector<ScalingRow> scaling_report(const std::vector<std::size_t>& ns, std::size_t repetitions,
                                       const std::function<Instance(std::size_t)>& make);

void write_ttk_csv(std::ostream& os, const std::vector<TtkSample>& samples, bool header = true);
void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows);

/// Parses "2^10..2^16" (doublings), "1000,2000" or a single number.
std::vector<std::size_t> parse_size_list(const std::string& text);

}  // namespace anyk
