#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "anyk/preprocess.hpp"

namespace anyk {

/// Persistent partial answers. A cell holds the tuple chosen at one rel
/// position and links to the cell of the previous position, so candidates
/// that share a prefix share its cells. Cells are refcounted and recycled.
class CellPool {
 public:
  static constexpr std::uint32_t kNil = std::numeric_limits<std::uint32_t>::max();

  struct Cell {
    std::uint32_t row;
    /// Position of `row` inside its group (0-based).
    std::uint32_t index;
    std::uint32_t group;
    std::uint32_t prev;
    std::uint32_t refs;
  };

  /// New cell with one reference; takes a reference on `prev`.
  std::uint32_t make(std::uint32_t row, std::uint32_t index, std::uint32_t group, std::uint32_t prev) {
    if (prev != kNil) ++cells_[prev].refs;
    const Cell c{row, index, group, prev, 1};
    if (free_.empty()) {
      cells_.push_back(c);
      return static_cast<std::uint32_t>(cells_.size() - 1);
    }
    const std::uint32_t id = free_.back();
    free_.pop_back();
    cells_[id] = c;
    return id;
  }

  void release(std::uint32_t id) {
    while (id != kNil && --cells_[id].refs == 0) {
      free_.push_back(id);
      id = cells_[id].prev;
    }
  }

  const Cell& operator[](std::uint32_t id) const { return cells_[id]; }
  std::size_t live() const { return cells_.size() - free_.size(); }

 private:
  std::vector<Cell> cells_;
  std::vector<std::uint32_t> free_;
};

namespace detail {

/// Shared top-down machinery over a reduction: prefix loading and
/// first-member extension.
class Walker {
 public:
  explicit Walker(const Reduction& r) : r_(&r), rows_(r.size()) {}

  std::size_t size() const { return r_->size(); }

  std::span<const std::uint32_t> members(std::size_t pos, std::uint32_t group) const {
    return r_->nodes[pos].index.group(group);
  }

  /// Group of position `pos` given the rows chosen at earlier positions.
  std::uint32_t group_at(std::size_t pos, std::span<const std::uint32_t> rows) const {
    if (pos == 0) return 0;
    const auto parent = static_cast<std::size_t>(r_->layout.nodes[pos].parent);
    return r_->group_from_parent(pos, rows[parent]);
  }

  /// Rows of the cells on the chain ending at `cell` (length `len`).
  void load(const CellPool& pool, std::uint32_t cell, std::size_t len, std::vector<std::uint32_t>& rows) const {
    rows.resize(size());
    for (std::size_t pos = len; pos-- > 0;) {
      rows[pos] = pool[cell].row;
      cell = pool[cell].prev;
    }
  }

  /// Completes rows[len..) with the first member of every group.
  void extend_first(std::vector<std::uint32_t>& rows, std::size_t len) const {
    for (std::size_t pos = len; pos < size(); ++pos) rows[pos] = members(pos, group_at(pos, rows))[0];
  }

  /// Tie-key comparison: full-tuple ranks in rel order.
  int compare_ranks(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) const {
    for (std::size_t pos = 0; pos < size(); ++pos) {
      const auto& rank = r_->nodes[pos].rank;
      if (rank[a[pos]] != rank[b[pos]]) return rank[a[pos]] < rank[b[pos]] ? -1 : 1;
    }
    return 0;
  }

  const Reduction& reduction() const { return *r_; }

 protected:
  const Reduction* r_;
  std::vector<std::uint32_t> rows_;
};

}  // namespace detail

/// A candidate as seen from outside: the rows of its prefix and, in ranked
/// mode, its priority.
template <class W>
struct FrontierEntry {
  std::vector<std::uint32_t> rows;
  W prio;
};

/// Depth-first enumeration with an explicit stack over groups sorted by L.
class LexEnumerator : private detail::Walker {
 public:
  explicit LexEnumerator(std::shared_ptr<const Reduction> r) : Walker(*r), owner_(std::move(r)) {
    if (!owner_->empty() && size() > 0) stack_.push_back({pool_.make(members(0, 0)[0], 0, 0, CellPool::kNil), 1});
  }
  ~LexEnumerator() {
    for (const auto& c : stack_) pool_.release(c.cell);
  }
  LexEnumerator(const LexEnumerator&) = delete;
  LexEnumerator& operator=(const LexEnumerator&) = delete;

  /// Moves to the next answer; false when exhausted.
  bool next() {
    if (stack_.empty()) return false;
    const Candidate c = stack_.back();
    stack_.pop_back();
    load(pool_, c.cell, c.length, rows_);

    const std::size_t last = c.length - 1;
    const CellPool::Cell cell = pool_[c.cell];
    const auto same = members(last, cell.group);
    if (cell.index + 1 < same.size()) {
      stack_.push_back({pool_.make(same[cell.index + 1], cell.index + 1, cell.group, cell.prev), c.length});
    }
    std::uint32_t cur = c.cell;
    for (std::size_t pos = c.length; pos < size(); ++pos) {
      const std::uint32_t g = group_at(pos, rows_);
      const auto m = members(pos, g);
      rows_[pos] = m[0];
      if (m.size() >= 2) stack_.push_back({pool_.make(m[1], 1, g, cur), static_cast<std::uint32_t>(pos + 1)});
      if (pos + 1 < size()) {
        const std::uint32_t nxt = pool_.make(m[0], 0, g, cur);
        pool_.release(cur);
        cur = nxt;
      }
    }
    pool_.release(cur);
    ++emitted_;
    return true;
  }

  /// Rows of the current answer, per rel position.
  std::span<const std::uint32_t> rows() const { return rows_; }
  std::size_t emitted() const { return emitted_; }
  std::size_t frontier_size() const { return stack_.size(); }
  std::size_t live_cells() const { return pool_.live(); }

  std::vector<FrontierEntry<int>> frontier() const {
    std::vector<FrontierEntry<int>> out;
    for (const auto& c : stack_) {
      FrontierEntry<int> e{{}, 0};
      load(pool_, c.cell, c.length, e.rows);
      e.rows.resize(c.length);
      out.push_back(std::move(e));
    }
    return out;
  }

 private:
  struct Candidate {
    std::uint32_t cell;
    std::uint32_t length;
  };

  std::shared_ptr<const Reduction> owner_;
  CellPool pool_;
  std::vector<Candidate> stack_;
  std::size_t emitted_ = 0;
};

/// Any-k enumeration with a priority queue. A candidate's priority is the
/// weight of its best extension (first member of every open group); ties
/// are broken by the tie-key of that extension.
template <RankingAlgebra A>
class RankedEnumerator : private detail::Walker {
 public:
  using W = typename A::Weight;

  explicit RankedEnumerator(std::shared_ptr<const WeightedReduction<A>> r)
      : Walker(*r), owner_(std::move(r)), alg_(owner_->algebra) {
    if (!owner_->empty() && size() > 0) {
      const std::uint32_t row = members(0, 0)[0];
      push({pool_.make(row, 0, 0, CellPool::kNil), 1, owner_->opt[0][row]});
    }
  }
  ~RankedEnumerator() {
    for (const auto& c : heap_) pool_.release(c.cell);
  }
  RankedEnumerator(const RankedEnumerator&) = delete;
  RankedEnumerator& operator=(const RankedEnumerator&) = delete;

  bool next() {
    if (heap_.empty()) return false;
    std::pop_heap(heap_.begin(), heap_.end(), Worse{this});
    Candidate c = std::move(heap_.back());
    heap_.pop_back();
    load(pool_, c.cell, c.length, rows_);
    const auto& opt = owner_->opt;

    const std::size_t last = c.length - 1;
    const CellPool::Cell cell = pool_[c.cell];
    const auto same = members(last, cell.group);
    if (cell.index + 1 < same.size()) {
      const std::uint32_t row = same[cell.index + 1];
      W prio;
      if constexpr (InvertibleAlgebra<A>) {
        prio = incremental_prio(alg_, c.prio, opt[last][rows_[last]], opt[last][row]);
      } else {
        const std::uint32_t old = rows_[last];
        rows_[last] = row;
        prio = prefix_prio(rows_, c.length);
        rows_[last] = old;
      }
      push({pool_.make(row, cell.index + 1, cell.group, cell.prev), c.length, std::move(prio)});
    }
    std::uint32_t cur = c.cell;
    for (std::size_t pos = c.length; pos < size(); ++pos) {
      const std::uint32_t g = group_at(pos, rows_);
      const auto m = members(pos, g);
      if (m.size() >= 2) {
        W prio;
        if constexpr (InvertibleAlgebra<A>) {
          prio = incremental_prio(alg_, c.prio, opt[pos][m[0]], opt[pos][m[1]]);
        } else {
          rows_[pos] = m[1];
          prio = prefix_prio(rows_, pos + 1);
        }
        push({pool_.make(m[1], 1, g, cur), static_cast<std::uint32_t>(pos + 1), std::move(prio)});
      }
      rows_[pos] = m[0];
      if (pos + 1 < size()) {
        const std::uint32_t nxt = pool_.make(m[0], 0, g, cur);
        pool_.release(cur);
        cur = nxt;
      }
    }
    pool_.release(cur);
    weight_ = std::move(c.prio);
    ++emitted_;
    return true;
  }

  std::span<const std::uint32_t> rows() const { return rows_; }
  /// Weight of the current answer.
  const W& weight() const { return weight_; }
  std::size_t emitted() const { return emitted_; }
  std::size_t frontier_size() const { return heap_.size(); }
  std::size_t live_cells() const { return pool_.live(); }

  /// Best-extension weight of the prefix rows[0..len) recomputed from
  /// scratch: own weights of the prefix tuples combined with the minimum opt
  /// of every group hanging off the prefix.
  W prefix_prio(std::span<const std::uint32_t> rows, std::size_t len) const {
    const auto& r = *owner_;
    W acc = alg_.identity();
    for (std::size_t pos = 0; pos < len; ++pos) acc = alg_.combine(acc, r.weight[pos][rows[pos]]);
    for (std::size_t pos = len; pos < size(); ++pos) {
      const int parent = r.layout.nodes[pos].parent;
      if (parent < 0 || static_cast<std::size_t>(parent) >= len) continue;
      acc = alg_.combine(acc, r.opt[pos][members(pos, group_at(pos, rows))[0]]);
    }
    return acc;
  }

  std::vector<FrontierEntry<W>> frontier() const {
    std::vector<FrontierEntry<W>> out;
    for (const auto& c : heap_) {
      FrontierEntry<W> e{{}, c.prio};
      load(pool_, c.cell, c.length, e.rows);
      e.rows.resize(c.length);
      out.push_back(std::move(e));
    }
    return out;
  }

 private:
  struct Candidate {
    std::uint32_t cell;
    std::uint32_t length;
    W prio;
  };

  // Heap order: true when `a` should come out after `b`.
  struct Worse {
    const RankedEnumerator* e;
    bool operator()(const Candidate& a, const Candidate& b) const {
      if (e->alg_.less(b.prio, a.prio)) return true;
      if (e->alg_.less(a.prio, b.prio)) return false;
      return e->compare_extensions(a, b) > 0;
    }
  };

  int compare_extensions(const Candidate& a, const Candidate& b) const {
    load(pool_, a.cell, a.length, tie_a_);
    extend_first(tie_a_, a.length);
    load(pool_, b.cell, b.length, tie_b_);
    extend_first(tie_b_, b.length);
    return compare_ranks(tie_a_, tie_b_);
  }

  void push(Candidate c) {
    heap_.push_back(std::move(c));
    std::push_heap(heap_.begin(), heap_.end(), Worse{this});
  }

  std::shared_ptr<const WeightedReduction<A>> owner_;
  A alg_;
  CellPool pool_;
  std::vector<Candidate> heap_;
  W weight_{};
  std::size_t emitted_ = 0;
  mutable std::vector<std::uint32_t> tie_a_, tie_b_;
};

}  // namespace anyk
