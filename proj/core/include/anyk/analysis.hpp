#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anyk/query.hpp"

namespace anyk {

/// Vertices are query variables, one hyperedge per atom.
struct Hypergraph {
  std::vector<std::string> vertices;
  std::vector<std::vector<std::size_t>> edges;
  /// Atom index of each edge.
  std::vector<std::size_t> atoms;

  static Hypergraph of(const ConjunctiveQuery& q);
  std::optional<std::size_t> vertex(const std::string& name) const;
  bool neighbors(std::size_t a, std::size_t b) const;
  std::string to_string() const;
};

/// No join tree exists. Carries what is left after GYO reduction.
class CyclicError : public std::runtime_error {
 public:
  explicit CyclicError(Hypergraph residual);
  const Hypergraph& residual() const { return residual_; }

 private:
  Hypergraph residual_;
};

/// Rooted tree over the atoms of a query. Node i is atom i.
struct JoinTree {
  std::size_t root = 0;
  /// -1 for the root.
  std::vector<int> parent;
  /// Children in atom-declaration order.
  std::vector<std::vector<std::size_t>> children;
  /// Variables shared with the parent (empty for the root).
  std::vector<std::vector<std::string>> join_vars;

  std::size_t size() const { return parent.size(); }

  /// Builds children and join variables from a parent map.
  static JoinTree from_parents(const ConjunctiveQuery& q, std::vector<int> parent);
};

/// rel(i): atom visited at position i (0-based here; rel(0) is the root).
using RelOrder = std::vector<std::size_t>;

/// Alpha-acyclicity test and join tree by GYO ear removal. Atom 0 is never
/// removed as an ear, so it becomes the root. Throws CyclicError.
JoinTree build_join_tree(const ConjunctiveQuery& q);

bool is_acyclic(const ConjunctiveQuery& q);

/// For every variable, the nodes containing it form a connected subtree.
bool has_running_intersection(const ConjunctiveQuery& q, const JoinTree& tree);

/// Preorder from the root, children in declaration order.
RelOrder topological_rel_order(const JoinTree& tree);
/// Preorder where `child_order(node)` lists the children of `node` to visit.
RelOrder topological_rel_order(const JoinTree& tree,
                               const std::vector<std::vector<std::size_t>>& child_order);

/// rel is a permutation with every parent before its children.
bool respects(const JoinTree& tree, const RelOrder& rel);

/// Variables in order of first introduction along rel (column order within
/// an atom). This is the order of the deterministic tie-key.
std::vector<std::string> introduction_order(const ConjunctiveQuery& q, const RelOrder& rel);

/// Witness a -> b -> c in L: a, b not neighbours, c a neighbour of both.
struct Trio {
  std::string a, b, c;
  friend bool operator==(const Trio&, const Trio&) = default;
};

/// First trio in scan order over (position of a, position of b, position
/// of c), or nullopt. Depends only on the query structure and L.
std::optional<Trio> has_disruptive_trio(const ConjunctiveQuery& q, const std::vector<std::string>& L);

struct OrderedJoinTree {
  JoinTree tree;
  RelOrder rel;
};

/// Scanning atoms in rel order meets the L variables in L sequence: L
/// variables are introduced in L order, and no variable outside L is
/// introduced before the position introducing the last L variable.
bool is_l_consistent(const ConjunctiveQuery& q, const OrderedJoinTree& plan,
                     const std::vector<std::string>& L);

/// Searches running-intersection orders of the atoms (every new atom's
/// overlap with earlier atoms lies inside one earlier atom, its parent) for
/// one that is L-consistent. Roots and atoms are tried in declaration order.
/// nullopt means NotAchievable.
std::optional<OrderedJoinTree> l_consistent_join_tree(const ConjunctiveQuery& q,
                                                      const std::vector<std::string>& L);

/// Acyclic, and still acyclic with an extra atom over the head variables.
bool is_free_connex(const ConjunctiveQuery& q);

}  // namespace anyk
