#include "anyk/preprocess.hpp"

#include <stdexcept>

namespace anyk {

using boost::multiprecision::cpp_int;

JoinIndex JoinIndex::build(const EncodedInstance& inst, const EncodedAtom& child,
                           std::span<const std::size_t> key_cols, std::span<const std::uint8_t> alive) {
  JoinIndex idx;
  const std::size_t width = key_cols.size();
  idx.kind_ = width == 0 ? Kind::Whole : width == 1 ? Kind::Direct : width == 2 ? Kind::Packed : Kind::Bytes;
  if (idx.kind_ == Kind::Direct) {
    idx.direct_.assign(inst.dictionary[child.vars[key_cols[0]]].size(), kNoGroup);
  }

  std::vector<std::uint32_t> group_of(child.rows, kNoGroup);
  std::vector<std::uint32_t> counts;
  std::string scratch;
  for (std::size_t row = 0; row < child.rows; ++row) {
    if (!alive[row]) continue;
    std::uint32_t* slot = nullptr;
    std::uint32_t fresh = static_cast<std::uint32_t>(counts.size());
    switch (idx.kind_) {
      case Kind::Whole:
        if (counts.empty()) counts.push_back(0);
        group_of[row] = 0;
        ++counts[0];
        continue;
      case Kind::Direct:
        slot = &idx.direct_[child.at(row, key_cols[0])];
        break;
      case Kind::Packed: {
        const std::uint64_t key = std::uint64_t{child.at(row, key_cols[0])} << 32 | child.at(row, key_cols[1]);
        slot = &idx.packed_.try_emplace(key, kNoGroup).first->second;
        break;
      }
      case Kind::Bytes: {
        scratch.clear();
        for (auto c : key_cols) {
          const std::uint32_t id = child.at(row, c);
          scratch.append(reinterpret_cast<const char*>(&id), sizeof id);
        }
        slot = &idx.bytes_.try_emplace(scratch, kNoGroup).first->second;
        break;
      }
    }
    if (*slot == kNoGroup) {
      *slot = fresh;
      counts.push_back(0);
    }
    group_of[row] = *slot;
    ++counts[*slot];
  }

  idx.begin_.assign(counts.size() + 1, 0);
  for (std::size_t g = 0; g < counts.size(); ++g) idx.begin_[g + 1] = idx.begin_[g] + counts[g];
  idx.members_.resize(idx.begin_.back());
  std::vector<std::uint32_t> fill(idx.begin_.begin(), idx.begin_.end() - 1);
  for (std::size_t row = 0; row < child.rows; ++row) {
    if (group_of[row] != kNoGroup) idx.members_[fill[group_of[row]]++] = static_cast<std::uint32_t>(row);
  }
  return idx;
}

std::uint32_t JoinIndex::find(const EncodedAtom& parent, std::size_t row,
                              std::span<const std::size_t> parent_key_cols) const {
  switch (kind_) {
    case Kind::Whole:
      return group_count() > 0 ? 0 : kNoGroup;
    case Kind::Direct: {
      const std::uint32_t id = parent.at(row, parent_key_cols[0]);
      return id < direct_.size() ? direct_[id] : kNoGroup;
    }
    case Kind::Packed: {
      const std::uint64_t key =
          std::uint64_t{parent.at(row, parent_key_cols[0])} << 32 | parent.at(row, parent_key_cols[1]);
      auto it = packed_.find(key);
      return it == packed_.end() ? kNoGroup : it->second;
    }
    case Kind::Bytes: {
      std::string key;
      for (auto c : parent_key_cols) {
        const std::uint32_t id = parent.at(row, c);
        key.append(reinterpret_cast<const char*>(&id), sizeof id);
      }
      auto it = bytes_.find(key);
      return it == bytes_.end() ? kNoGroup : it->second;
    }
  }
  return kNoGroup;
}

Layout Layout::make(const EncodedInstance& inst, const JoinTree& tree, const RelOrder& rel) {
  if (!respects(tree, rel)) throw std::invalid_argument("relation order does not respect the join tree");
  Layout layout;
  std::vector<std::size_t> pos_of(rel.size());
  for (std::size_t p = 0; p < rel.size(); ++p) pos_of[rel[p]] = p;
  layout.nodes.resize(rel.size());
  for (std::size_t p = 0; p < rel.size(); ++p) {
    auto& node = layout.nodes[p];
    node.atom = rel[p];
    const int parent_atom = tree.parent[rel[p]];
    if (parent_atom < 0) continue;
    node.parent = static_cast<int>(pos_of[static_cast<std::size_t>(parent_atom)]);
    const auto& child = inst.atoms[rel[p]];
    const auto& par = inst.atoms[static_cast<std::size_t>(parent_atom)];
    for (std::size_t c = 0; c < child.arity(); ++c) {
      const int pc = par.column_of(child.vars[c]);
      if (pc < 0) continue;
      node.key_cols.push_back(c);
      node.parent_key_cols.push_back(static_cast<std::size_t>(pc));
    }
  }
  for (std::size_t p = 1; p < rel.size(); ++p) {
    auto& parent = layout.nodes[static_cast<std::size_t>(layout.nodes[p].parent)];
    layout.nodes[p].slot = parent.children.size();
    parent.children.push_back(p);
  }
  return layout;
}

namespace detail {

void prepare(Reduction& r, const EncodedInstance& inst, const JoinTree& tree, const RelOrder& rel) {
  r.instance = &inst;
  r.layout = Layout::make(inst, tree, rel);
  r.nodes.resize(rel.size());
  for (std::size_t pos = 0; pos < rel.size(); ++pos) {
    const auto& atom = r.atom(pos);
    auto& node = r.nodes[pos];
    node.alive.assign(atom.rows, 1);
    node.child_group.assign(atom.rows * r.layout.nodes[pos].children.size(), kNoGroup);
    // LSD counting sort over the dense ids: linear in rows + dictionaries
    std::vector<std::uint32_t> order(atom.rows), tmp(atom.rows), count;
    std::iota(order.begin(), order.end(), 0u);
    for (std::size_t c = atom.arity(); c-- > 0;) {
      count.assign(inst.dictionary[atom.vars[c]].size() + 1, 0);
      for (std::size_t row = 0; row < atom.rows; ++row) ++count[atom.at(row, c) + 1];
      std::partial_sum(count.begin(), count.end(), count.begin());
      for (auto row : order) tmp[count[atom.at(row, c)]++] = row;
      order.swap(tmp);
    }
    node.rank.resize(atom.rows);
    for (std::uint32_t i = 0; i < order.size(); ++i) node.rank[order[i]] = i;
  }
}

JoinIndex index_alive(const Reduction& r, std::size_t pos) {
  return JoinIndex::build(*r.instance, r.atom(pos), r.layout.nodes[pos].key_cols, r.nodes[pos].alive);
}

void collect_stats(Reduction& r) {
  r.stats.survivors.clear();
  r.stats.groups.clear();
  for (const auto& node : r.nodes) {
    r.stats.survivors.push_back(static_cast<std::size_t>(std::count(node.alive.begin(), node.alive.end(), 1)));
    r.stats.groups.push_back(node.index.group_count());
  }
}

}  // namespace detail

Reduction semijoin_reduce_lex(const EncodedInstance& inst, const JoinTree& tree, const RelOrder& rel,
                              const LexKey& order) {
  Reduction r;
  detail::prepare(r, inst, tree, rel);
  const std::size_t l = rel.size();

  auto by_l = [&](std::size_t pos) {
    const auto& atom = r.atom(pos);
    std::vector<std::size_t> lcols;
    for (auto v : order.variables) {
      const int c = atom.column_of(v);
      if (c >= 0) lcols.push_back(static_cast<std::size_t>(c));
    }
    const bool desc = order.direction == Direction::Desc;
    return [&r, &atom, pos, lcols = std::move(lcols), desc](std::uint32_t a, std::uint32_t b) {
      for (auto c : lcols) {
        const auto x = atom.at(a, c), y = atom.at(b, c);
        if (x != y) return desc ? y < x : x < y;
      }
      return r.nodes[pos].rank[a] < r.nodes[pos].rank[b];
    };
  };

  for (std::size_t pos = l; pos-- > 1;) {
    const auto& lay = r.layout.nodes[pos];
    const auto parent = static_cast<std::size_t>(lay.parent);
    auto& child = r.nodes[pos];
    child.index = detail::index_alive(r, pos);
    child.index.sort_groups(by_l(pos));

    std::vector<std::int8_t> val(child.index.group_count(), -1);
    const auto& patom = r.atom(parent);
    auto& pnode = r.nodes[parent];
    const std::size_t fanout = r.layout.nodes[parent].children.size();
    for (std::size_t row = 0; row < patom.rows; ++row) {
      if (!pnode.alive[row]) continue;
      const std::uint32_t g = child.index.find(patom, row, lay.parent_key_cols);
      pnode.child_group[row * fanout + lay.slot] = g;
      bool ok = false;  // False or ... over an empty group
      if (g != kNoGroup) {
        if (val[g] < 0) {
          bool any = false;
          for (auto m : child.index.group(g)) any = any || child.alive[m];
          val[g] = any ? 1 : 0;
          ++r.stats.group_folds;
        }
        ok = val[g] == 1;
      }
      pnode.alive[row] = pnode.alive[row] && ok;
    }
  }
  if (l > 0) {
    r.nodes[0].index = detail::index_alive(r, 0);
    r.nodes[0].index.sort_groups(by_l(0));
  }
  detail::collect_stats(r);
  return r;
}

std::vector<std::size_t> charge_positions(const EncodedInstance& inst, const RelOrder& rel) {
  std::vector<std::size_t> charged(inst.variables.size(), rel.size());
  for (std::size_t pos = 0; pos < rel.size(); ++pos) {
    for (auto v : inst.atoms[rel[pos]].vars) {
      if (charged[v] == rel.size()) charged[v] = pos;
    }
  }
  return charged;
}

cpp_int lex_weight(std::size_t rank, std::size_t position, std::size_t l_size, const cpp_int& n) {
  if (position >= l_size) throw std::out_of_range("lex_weight: position outside L");
  return cpp_int(rank) * boost::multiprecision::pow(n, static_cast<unsigned>(l_size - 1 - position));
}

std::size_t lex_separation_bound(const EncodedInstance& inst, const LexKey& order) {
  std::size_t n = 1;
  for (const auto& a : inst.atoms) n = std::max(n, a.rows);
  for (auto v : order.variables) n = std::max(n, inst.dictionary[v].size());
  return n;
}

std::vector<VariableWeights<cpp_int>> lex_to_sum_weights(const EncodedInstance& inst, const LexKey& order,
                                                         const cpp_int& n) {
  std::vector<VariableWeights<cpp_int>> out;
  const std::size_t size = order.variables.size();
  for (std::size_t j = 0; j < size; ++j) {
    const auto v = order.variables[j];
    const std::size_t distinct = inst.dictionary[v].size();
    VariableWeights<cpp_int> w{v, {}};
    w.by_id.reserve(distinct);
    for (std::size_t id = 0; id < distinct; ++id) {
      const std::size_t rank = order.direction == Direction::Asc ? id + 1 : distinct - id;
      w.by_id.push_back(lex_weight(rank, j, size, n));
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace anyk
