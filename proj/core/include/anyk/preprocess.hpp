#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "anyk/algebra.hpp"
#include "anyk/analysis.hpp"
#include "anyk/encoded.hpp"

namespace anyk {

inline constexpr std::uint32_t kNoGroup = std::numeric_limits<std::uint32_t>::max();

/// Tuples of one child relation grouped by their join key with the parent.
/// Groups are stored contiguously (CSR); only the tuples passed as alive
/// are members. Lookups hash the parent's key once; single-column keys use
/// a direct id table.
class JoinIndex {
 public:
  JoinIndex() = default;

  static JoinIndex build(const EncodedInstance& inst, const EncodedAtom& child,
                         std::span<const std::size_t> key_cols, std::span<const std::uint8_t> alive);

  /// Group matching row `row` of `parent` on `parent_key_cols`, or kNoGroup.
  std::uint32_t find(const EncodedAtom& parent, std::size_t row,
                     std::span<const std::size_t> parent_key_cols) const;

  std::size_t group_count() const { return begin_.empty() ? 0 : begin_.size() - 1; }
  std::size_t member_count() const { return members_.size(); }

  std::span<const std::uint32_t> group(std::uint32_t g) const {
    return {members_.data() + begin_[g], begin_[g + 1] - begin_[g]};
  }
  std::span<std::uint32_t> group_mut(std::uint32_t g) {
    return {members_.data() + begin_[g], begin_[g + 1] - begin_[g]};
  }

  /// Sorts every group with `less(row_a, row_b)`.
  template <class Less>
  void sort_groups(Less&& less) {
    for (std::uint32_t g = 0; g < group_count(); ++g) {
      auto m = group_mut(g);
      std::sort(m.begin(), m.end(), less);
    }
  }

 private:
  enum class Kind { Whole, Direct, Packed, Bytes };

  Kind kind_ = Kind::Whole;
  std::vector<std::uint32_t> direct_;
  std::unordered_map<std::uint64_t, std::uint32_t> packed_;
  std::unordered_map<std::string, std::uint32_t> bytes_;
  std::vector<std::uint32_t> begin_;
  std::vector<std::uint32_t> members_;
};

/// Position of one atom in the relation order and its link to the parent.
struct NodeLayout {
  std::size_t atom = 0;
  /// Parent position in rel, -1 for the root.
  int parent = -1;
  /// Index of this node among the parent's children.
  std::size_t slot = 0;
  /// Children positions, increasing.
  std::vector<std::size_t> children;
  /// Columns of this atom shared with the parent, and the matching parent columns.
  std::vector<std::size_t> key_cols;
  std::vector<std::size_t> parent_key_cols;
};

struct Layout {
  /// Indexed by rel position.
  std::vector<NodeLayout> nodes;
  static Layout make(const EncodedInstance& inst, const JoinTree& tree, const RelOrder& rel);
  std::size_t size() const { return nodes.size(); }
};

struct PreprocessStats {
  /// Alive tuples per rel position after reduction.
  std::vector<std::size_t> survivors;
  /// Groups in the index of each rel position (the root counts as one group).
  std::vector<std::size_t> groups;
  /// Group aggregates (val(M) or opt(M)) computed; at most one per group.
  std::size_t group_folds = 0;
};

struct ReducedNode {
  /// val(t); dead tuples are tombstoned and excluded from groups.
  std::vector<std::uint8_t> alive;
  /// Groups of this node's tuples keyed by the parent edge; one group at the root.
  JoinIndex index;
  /// Per row, per child slot: the child group it joins with.
  std::vector<std::uint32_t> child_group;
  /// Position of each row in the full-tuple order of its relation.
  std::vector<std::uint32_t> rank;
};

/// Output of the bottom-up phase: reduced relations with sorted join
/// indexes, in rel order.
struct Reduction {
  const EncodedInstance* instance = nullptr;
  Layout layout;
  std::vector<ReducedNode> nodes;
  PreprocessStats stats;

  std::size_t size() const { return nodes.size(); }
  const EncodedAtom& atom(std::size_t pos) const { return instance->atoms[layout.nodes[pos].atom]; }
  bool empty() const { return nodes.empty() || nodes[0].index.group_count() == 0; }
  /// Child group joined by `row` of position `pos`, for the given child slot.
  std::uint32_t child_group(std::size_t pos, std::size_t row, std::size_t slot) const {
    return nodes[pos].child_group[row * layout.nodes[pos].children.size() + slot];
  }
  /// Group at `pos` reached from the parent tuple `parent_row`.
  std::uint32_t group_from_parent(std::size_t pos, std::uint32_t parent_row) const {
    const auto& n = layout.nodes[pos];
    return child_group(static_cast<std::size_t>(n.parent), parent_row, n.slot);
  }
};

template <RankingAlgebra A>
struct WeightedReduction : Reduction {
  A algebra;
  /// w(t) and opt(t) per rel position and row.
  std::vector<std::vector<typename A::Weight>> weight;
  std::vector<std::vector<typename A::Weight>> opt;
};

/// Variable order for lexicographic preprocessing (ids compare like values).
struct LexKey {
  std::vector<std::size_t> variables;
  Direction direction = Direction::Asc;
};

namespace detail {

/// Layout, ranks, all-alive flags and empty child-group tables.
void prepare(Reduction& r, const EncodedInstance& inst, const JoinTree& tree, const RelOrder& rel);
/// Index over the alive tuples of `pos`.
JoinIndex index_alive(const Reduction& r, std::size_t pos);
void collect_stats(Reduction& r);

}  // namespace detail

/// I_{parent -> child}: groups the alive child tuples by their projection
/// on the shared columns.
inline JoinIndex build_join_index(const EncodedInstance& inst, const EncodedAtom& child,
                                  std::span<const std::size_t> key_cols,
                                  std::span<const std::uint8_t> alive) {
  return JoinIndex::build(inst, child, key_cols, alive);
}

/// Bottom-up semijoin reduction with Boolean messages and memoized group
/// values, in reverse rel order. Groups and the root are sorted by the
/// L-projection of their tuples, then by the full tuple. An empty L gives
/// the unranked (full-tuple) order.
Reduction semijoin_reduce_lex(const EncodedInstance& inst, const JoinTree& tree, const RelOrder& rel,
                              const LexKey& order);

/// Atom charged with each variable: the first rel position containing it.
std::vector<std::size_t> charge_positions(const EncodedInstance& inst, const RelOrder& rel);

/// f_x as a table over the ids of variable x.
template <class W>
struct VariableWeights {
  std::size_t variable;
  std::vector<W> by_id;
};

/// w(t) for every tuple, indexed by atom: the combination of f_x(t[x]) over
/// the variables x charged to the tuple's atom. Atoms charged with nothing
/// get the identity.
template <RankingAlgebra A>
std::vector<std::vector<typename A::Weight>> attr_weights_to_tuple_weights(
    const EncodedInstance& inst, const RelOrder& rel,
    const std::vector<VariableWeights<typename A::Weight>>& terms, const A& alg) {
  const auto charged = charge_positions(inst, rel);
  std::vector<std::vector<typename A::Weight>> out(inst.atoms.size());
  for (std::size_t a = 0; a < inst.atoms.size(); ++a) {
    out[a].assign(inst.atoms[a].rows, alg.identity());
  }
  for (const auto& term : terms) {
    const std::size_t atom = rel[charged[term.variable]];
    const auto& ea = inst.atoms[atom];
    const auto col = static_cast<std::size_t>(ea.column_of(term.variable));
    for (std::size_t row = 0; row < ea.rows; ++row) {
      out[atom][row] = alg.combine(out[atom][row], term.by_id[ea.at(row, col)]);
    }
  }
  return out;
}

/// Bottom-up dynamic programming in the (min, combine) semiring:
/// opt(t) = w(t) combined with the minimum opt of every joining child
/// group. Tuples without a joining group in some child are dead. Groups and
/// the root are sorted by opt, then by the full tuple.
template <RankingAlgebra A>
WeightedReduction<A> dp_preprocess(const EncodedInstance& inst, const JoinTree& tree,
                                   const RelOrder& rel,
                                   std::vector<std::vector<typename A::Weight>> tuple_weights,
                                   const A& alg) {
  using W = typename A::Weight;
  WeightedReduction<A> r;
  r.algebra = alg;
  detail::prepare(r, inst, tree, rel);
  const std::size_t l = rel.size();
  r.weight.resize(l);
  r.opt.resize(l);
  for (std::size_t pos = 0; pos < l; ++pos) {
    r.weight[pos] = std::move(tuple_weights[rel[pos]]);
    r.opt[pos] = r.weight[pos];
  }

  auto by_opt = [&](std::size_t pos) {
    return [&r, &alg, pos](std::uint32_t a, std::uint32_t b) {
      const auto& opt = r.opt[pos];
      if (alg.less(opt[a], opt[b])) return true;
      if (alg.less(opt[b], opt[a])) return false;
      return r.nodes[pos].rank[a] < r.nodes[pos].rank[b];
    };
  };

  for (std::size_t pos = l; pos-- > 1;) {
    const auto& lay = r.layout.nodes[pos];
    const auto parent = static_cast<std::size_t>(lay.parent);
    auto& child = r.nodes[pos];
    child.index = detail::index_alive(r, pos);
    child.index.sort_groups(by_opt(pos));

    std::vector<W> memo(child.index.group_count());
    std::vector<std::uint8_t> known(child.index.group_count(), 0);
    const auto& patom = r.atom(parent);
    auto& pnode = r.nodes[parent];
    const std::size_t fanout = r.layout.nodes[parent].children.size();
    for (std::size_t row = 0; row < patom.rows; ++row) {
      if (!pnode.alive[row]) continue;
      const std::uint32_t g = child.index.find(patom, row, lay.parent_key_cols);
      pnode.child_group[row * fanout + lay.slot] = g;
      if (g == kNoGroup) {  // min over the empty group is infinity
        pnode.alive[row] = 0;
        continue;
      }
      if (!known[g]) {
        auto members = child.index.group(g);
        W best = r.opt[pos][members[0]];
        for (std::size_t k = 1; k < members.size(); ++k) {
          if (alg.less(r.opt[pos][members[k]], best)) best = r.opt[pos][members[k]];
        }
        memo[g] = std::move(best);
        known[g] = 1;
        ++r.stats.group_folds;
      }
      r.opt[parent][row] = alg.combine(r.opt[parent][row], memo[g]);
    }
  }
  if (l > 0) {
    r.nodes[0].index = detail::index_alive(r, 0);
    r.nodes[0].index.sort_groups(by_opt(0));
  }
  detail::collect_stats(r);
  return r;
}

/// Weight of the i-th smallest value (1-based rank i) of the variable at
/// 0-based position j of L: i * n^(|L|-1-j).
boost::multiprecision::cpp_int lex_weight(std::size_t rank, std::size_t position, std::size_t l_size,
                                          const boost::multiprecision::cpp_int& n);

/// Exact SUM weights that rank answers by L: each L variable's values are
/// ranked over its dictionary (descending ranks for DESC) and weighted with
/// lex_weight. `n` must bound both relation cardinalities and the number of
/// distinct values of every L variable; lex_separation_bound computes one.
std::vector<VariableWeights<boost::multiprecision::cpp_int>> lex_to_sum_weights(
    const EncodedInstance& inst, const LexKey& order, const boost::multiprecision::cpp_int& n);

std::size_t lex_separation_bound(const EncodedInstance& inst, const LexKey& order);

}  // namespace anyk
