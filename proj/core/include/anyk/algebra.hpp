#pragma once

#include <algorithm>
#include <concepts>
#include <iterator>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace anyk {

/// Weight domain of a subset-monotone ranking: `combine` aggregates the
/// weights of joined tuples, `less` is the ranking order (smaller first),
/// and `identity` is the unit of `combine`. Group aggregates take the
/// `less`-minimum, so (min, combine) plays the role of (or, and) in the
/// semijoin reduction.
template <class A>
concept RankingAlgebra = requires(const A& a, const typename A::Weight& x) {
  { a.identity() } -> std::convertible_to<typename A::Weight>;
  { a.combine(x, x) } -> std::convertible_to<typename A::Weight>;
  { a.less(x, x) } -> std::convertible_to<bool>;
};

/// Algebras whose `combine` can be undone, so a candidate's priority is
/// base - removed subtree + new subtree.
template <class A>
concept InvertibleAlgebra = RankingAlgebra<A> && requires(const A& a, const typename A::Weight& x) {
  { a.remove(x, x) } -> std::convertible_to<typename A::Weight>;
};

template <class Num>
struct SumAlgebra {
  using Weight = Num;
  Weight identity() const { return Weight(0); }
  Weight combine(const Weight& a, const Weight& b) const { return a + b; }
  Weight remove(const Weight& a, const Weight& b) const { return a - b; }
  bool less(const Weight& a, const Weight& b) const { return a < b; }
};

using DoubleSum = SumAlgebra<double>;
/// Exact weights for the lexicographic-to-SUM reduction.
using ExactSum = SumAlgebra<boost::multiprecision::cpp_int>;

/// MAX refined by the remaining weights: a weight is the multiset of term
/// weights sorted in descending order, compared lexicographically. The
/// first element is the MAX. Unlike plain MAX with an external tie-break,
/// the refinement is cancellative, so the best answer of every candidate
/// is its first-member extension. `descending` ranks larger MAX first.
struct LeximaxAlgebra {
  using Weight = std::vector<double>;
  bool descending = false;

  Weight identity() const { return {}; }
  Weight lift(double x) const { return {x}; }
  Weight combine(const Weight& a, const Weight& b) const {
    Weight out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out), std::greater<>{});
    return out;
  }
  bool less(const Weight& a, const Weight& b) const {
    return descending ? std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end())
                      : std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

/// Priority of a candidate that swaps `old_opt` for `new_opt` inside an
/// answer of weight `base`.
template <InvertibleAlgebra A>
typename A::Weight incremental_prio(const A& alg, const typename A::Weight& base,
                                    const typename A::Weight& old_opt,
                                    const typename A::Weight& new_opt) {
  return alg.combine(alg.remove(base, old_opt), new_opt);
}

}  // namespace anyk
