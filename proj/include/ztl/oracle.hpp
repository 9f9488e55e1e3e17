#pragma once

// Independent brute-force oracles for property tests: type enumeration by
// window search, tiny Rabin-tree emptiness by strategy enumeration, and
// bounded CTL(Z) model search.

#include "ztl/emptiness.hpp"

namespace ztl {

// All satisfiable region/relation combinations, witnessed by assignments in
// the window [d1 - 2 beta - 1, dalpha + 2 beta + 1]. Scale-guarded.
std::vector<TypeConstraint> brute_types(const ConstantContext& ctx);

// Positional-strategy enumeration: a map from reachable locations to
// transitions is accepting when every reachable cyclic strongly connected
// vertex set of the induced graph satisfies some pair. Scale-guarded.
bool brute_rabin_emptiness(const FiniteTreeAutomaton& a);

// Enumerate small regular data trees; returns the first model found.
struct BoundedSearchResult {
  bool found = false;
  RegularDataTree witness;
};
BoundedSearchResult bounded_ctl_search(const FormulaPtr& phi, int state_budget, Int lo, Int hi,
                                       int beta, int degree = 2);

}  // namespace ztl
