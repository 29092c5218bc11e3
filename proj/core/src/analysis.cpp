#include "anyk/analysis.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

namespace anyk {

Hypergraph Hypergraph::of(const ConjunctiveQuery& q) {
  Hypergraph h;
  h.vertices = q.variables();
  for (std::size_t a = 0; a < q.body.size(); ++a) {
    std::vector<std::size_t> edge;
    for (const auto& v : q.body[a].variables()) edge.push_back(*h.vertex(v));
    std::sort(edge.begin(), edge.end());
    h.edges.push_back(std::move(edge));
    h.atoms.push_back(a);
  }
  return h;
}

std::optional<std::size_t> Hypergraph::vertex(const std::string& name) const {
  auto it = std::find(vertices.begin(), vertices.end(), name);
  if (it == vertices.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vertices.begin());
}

bool Hypergraph::neighbors(std::size_t a, std::size_t b) const {
  return std::any_of(edges.begin(), edges.end(), [&](const auto& e) {
    return std::binary_search(e.begin(), e.end(), a) && std::binary_search(e.begin(), e.end(), b);
  });
}

std::string Hypergraph::to_string() const {
  std::ostringstream os;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    os << (e ? " " : "") << "{";
    for (std::size_t i = 0; i < edges[e].size(); ++i) {
      os << (i ? "," : "") << vertices[edges[e][i]];
    }
    os << "}";
  }
  return os.str();
}

CyclicError::CyclicError(Hypergraph residual)
    : std::runtime_error("query is cyclic; irreducible residual: " + residual.to_string()),
      residual_(std::move(residual)) {}

JoinTree JoinTree::from_parents(const ConjunctiveQuery& q, std::vector<int> parent) {
  JoinTree t;
  t.parent = std::move(parent);
  t.children.resize(t.parent.size());
  t.join_vars.resize(t.parent.size());
  for (std::size_t i = 0; i < t.parent.size(); ++i) {
    if (t.parent[i] < 0) {
      t.root = i;
      continue;
    }
    const auto p = static_cast<std::size_t>(t.parent[i]);
    t.children[p].push_back(i);
    for (const auto& v : q.body[i].variables()) {
      if (q.body[p].contains(v)) t.join_vars[i].push_back(v);
    }
  }
  return t;
}

namespace {

bool subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// GYO reduction. Returns the parent map, or the residual edges when stuck.
std::vector<int> gyo(const Hypergraph& h, bool keep_first, Hypergraph* residual) {
  const std::size_t m = h.edges.size();
  std::vector<int> parent(m, -1);
  std::vector<bool> active(m, true);
  std::size_t remaining = m;
  while (remaining > 1) {
    bool removed = false;
    for (std::size_t e = keep_first ? 1 : 0; e < m && !removed; ++e) {
      if (!active[e]) continue;
      // vertices of e shared with some other active edge
      std::vector<std::size_t> shared;
      for (auto v : h.edges[e]) {
        for (std::size_t f = 0; f < m; ++f) {
          if (f != e && active[f] && std::binary_search(h.edges[f].begin(), h.edges[f].end(), v)) {
            shared.push_back(v);
            break;
          }
        }
      }
      for (std::size_t f = 0; f < m; ++f) {
        if (f == e || !active[f] || !subset(shared, h.edges[f])) continue;
        parent[e] = static_cast<int>(f);
        active[e] = false;
        --remaining;
        removed = true;
        break;
      }
    }
    if (!removed) {
      if (residual) {
        residual->vertices = h.vertices;
        for (std::size_t e = 0; e < m; ++e) {
          if (!active[e]) continue;
          std::vector<std::size_t> kept;
          for (auto v : h.edges[e]) {
            for (std::size_t f = 0; f < m; ++f) {
              if (f != e && active[f] &&
                  std::binary_search(h.edges[f].begin(), h.edges[f].end(), v)) {
                kept.push_back(v);
                break;
              }
            }
          }
          residual->edges.push_back(std::move(kept));
          residual->atoms.push_back(h.atoms[e]);
        }
      }
      return {};
    }
  }
  return parent;
}

}  // namespace

JoinTree build_join_tree(const ConjunctiveQuery& q) {
  const Hypergraph h = Hypergraph::of(q);
  Hypergraph residual;
  auto parent = gyo(h, /*keep_first=*/true, &residual);
  if (parent.empty() && !q.body.empty()) throw CyclicError(std::move(residual));
  return JoinTree::from_parents(q, std::move(parent));
}

bool is_acyclic(const ConjunctiveQuery& q) {
  if (q.body.empty()) return true;
  return !gyo(Hypergraph::of(q), false, nullptr).empty();
}

bool has_running_intersection(const ConjunctiveQuery& q, const JoinTree& tree) {
  for (const auto& v : q.variables()) {
    // nodes containing v whose parent does not contain v: exactly one
    int tops = 0;
    for (std::size_t i = 0; i < tree.size(); ++i) {
      if (!q.body[i].contains(v)) continue;
      const int p = tree.parent[i];
      if (p < 0 || !q.body[static_cast<std::size_t>(p)].contains(v)) ++tops;
    }
    if (tops != 1) return false;
  }
  return true;
}

RelOrder topological_rel_order(const JoinTree& tree) {
  return topological_rel_order(tree, tree.children);
}

RelOrder topological_rel_order(const JoinTree& tree,
                               const std::vector<std::vector<std::size_t>>& child_order) {
  RelOrder rel;
  if (tree.size() == 0) return rel;
  std::vector<std::size_t> stack{tree.root};
  while (!stack.empty()) {
    const auto node = stack.back();
    stack.pop_back();
    rel.push_back(node);
    const auto& kids = child_order[node];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return rel;
}

bool respects(const JoinTree& tree, const RelOrder& rel) {
  if (rel.size() != tree.size()) return false;
  std::vector<int> pos(tree.size(), -1);
  for (std::size_t i = 0; i < rel.size(); ++i) {
    if (rel[i] >= tree.size() || pos[rel[i]] >= 0) return false;
    pos[rel[i]] = static_cast<int>(i);
  }
  if (rel.empty() || rel[0] != tree.root) return false;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const int p = tree.parent[i];
    if (p >= 0 && pos[static_cast<std::size_t>(p)] > pos[i]) return false;
  }
  return true;
}

std::vector<std::string> introduction_order(const ConjunctiveQuery& q, const RelOrder& rel) {
  std::vector<std::string> out;
  for (auto a : rel) {
    for (auto& v : q.body[a].variables()) {
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
    }
  }
  return out;
}

std::optional<Trio> has_disruptive_trio(const ConjunctiveQuery& q, const std::vector<std::string>& L) {
  const Hypergraph h = Hypergraph::of(q);
  std::vector<std::size_t> ids;
  for (const auto& v : L) {
    auto id = h.vertex(v);
    if (!id) throw std::invalid_argument("order variable " + v + " is not in the query");
    ids.push_back(*id);
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (h.neighbors(ids[i], ids[j])) continue;
      for (std::size_t k = j + 1; k < ids.size(); ++k) {
        if (h.neighbors(ids[i], ids[k]) && h.neighbors(ids[j], ids[k])) {
          return Trio{L[i], L[j], L[k]};
        }
      }
    }
  }
  return std::nullopt;
}

namespace {

// L bookkeeping shared by the search and the post-check.
class LTracker {
 public:
  explicit LTracker(const std::vector<std::string>& L) : L_(L) {}

  // Consumes the variables an atom introduces; false if L is violated.
  bool introduce(const std::vector<std::string>& fresh) {
    std::set<std::string> in_l;
    bool outside = false;
    for (const auto& v : fresh) {
      if (std::find(L_.begin(), L_.end(), v) != L_.end()) {
        in_l.insert(v);
      } else {
        outside = true;
      }
    }
    if (next_ + in_l.size() > L_.size()) return false;
    const std::set<std::string> block(L_.begin() + static_cast<long>(next_),
                                      L_.begin() + static_cast<long>(next_ + in_l.size()));
    if (block != in_l) return false;
    next_ += in_l.size();
    return !(outside && next_ < L_.size());
  }

  std::size_t bound() const { return next_; }
  void reset(std::size_t bound) { next_ = bound; }

 private:
  const std::vector<std::string>& L_;
  std::size_t next_ = 0;
};

}  // namespace

bool is_l_consistent(const ConjunctiveQuery& q, const OrderedJoinTree& plan,
                     const std::vector<std::string>& L) {
  if (!respects(plan.tree, plan.rel) || !has_running_intersection(q, plan.tree)) return false;
  LTracker tracker(L);
  std::set<std::string> bound;
  for (auto a : plan.rel) {
    std::vector<std::string> fresh;
    for (const auto& v : q.body[a].variables()) {
      if (bound.insert(v).second) fresh.push_back(v);
    }
    if (!tracker.introduce(fresh)) return false;
  }
  return tracker.bound() == L.size();
}

std::optional<OrderedJoinTree> l_consistent_join_tree(const ConjunctiveQuery& q,
                                                      const std::vector<std::string>& L) {
  const std::size_t m = q.body.size();
  if (m == 0 || m > 63) return std::nullopt;
  std::vector<std::vector<std::string>> vars(m);
  for (std::size_t a = 0; a < m; ++a) vars[a] = q.body[a].variables();

  RelOrder rel;
  std::vector<int> parent(m, -1);
  std::multiset<std::string> bound;
  LTracker tracker(L);
  std::unordered_set<std::uint64_t> dead_ends;
  std::uint64_t placed = 0;

  std::function<bool()> search = [&]() -> bool {
    if (rel.size() == m) return true;
    if (dead_ends.contains(placed)) return false;
    for (std::size_t a = 0; a < m; ++a) {
      if (placed >> a & 1) continue;
      std::vector<std::string> overlap, fresh;
      for (const auto& v : vars[a]) (bound.contains(v) ? overlap : fresh).push_back(v);
      int par = -1;
      if (!rel.empty()) {
        for (auto p : rel) {
          if (std::all_of(overlap.begin(), overlap.end(),
                          [&](const auto& v) { return q.body[p].contains(v); })) {
            par = static_cast<int>(p);
            break;
          }
        }
        if (par < 0) continue;
      }
      const std::size_t saved = tracker.bound();
      if (tracker.introduce(fresh)) {
        rel.push_back(a);
        parent[a] = par;
        placed |= std::uint64_t{1} << a;
        for (const auto& v : vars[a]) bound.insert(v);
        if (search()) return true;
        for (const auto& v : vars[a]) bound.erase(bound.find(v));
        placed &= ~(std::uint64_t{1} << a);
        parent[a] = -1;
        rel.pop_back();
      }
      tracker.reset(saved);
    }
    dead_ends.insert(placed);
    return false;
  };

  if (!search()) return std::nullopt;
  OrderedJoinTree plan{JoinTree::from_parents(q, parent), rel};
  if (!is_l_consistent(q, plan, L)) return std::nullopt;
  return plan;
}

bool is_free_connex(const ConjunctiveQuery& q) {
  if (!is_acyclic(q)) return false;
  ConjunctiveQuery extended = q;
  Atom head_atom;
  head_atom.relation = "__head";
  for (const auto& v : q.head) head_atom.terms.push_back(Term::variable(v));
  extended.body.push_back(std::move(head_atom));
  return is_acyclic(extended);
}

}  // namespace anyk
