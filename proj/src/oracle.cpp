#include "ztl/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ztl {

std::vector<TypeConstraint> brute_types(const ConstantContext& ctx) {
  if (ctx.beta > 3 || ctx.dalpha() - ctx.d1() > 4)
    throw std::invalid_argument("brute_types: scale guard (beta <= 3, window <= 4)");
  const int n = ctx.term_count();
  const Int lo = ctx.d1() - 2 * ctx.beta - 1;
  const Int hi = ctx.dalpha() + 2 * ctx.beta + 1;

  // Walk every assignment of the 2 beta terms over the window and record the
  // region/relation combination it witnesses. Any combination witnessed by
  // some integer assignment has a witness inside the window: values between
  // consecutive constants are pinned, and at most 2 beta distinct values sit
  // below d1 or above dalpha.
  std::set<std::string> seen;
  std::vector<TypeConstraint> out;
  std::vector<Int> vals(static_cast<std::size_t>(n), lo);
  while (true) {
    TypeConstraint t;
    t.regions.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      t.regions[static_cast<std::size_t>(i)] = Region::of(vals[static_cast<std::size_t>(i)], ctx);
    t.rel.resize(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        t.rel[TypeConstraint::rel_index(i, j, n)] =
            cmp_of(vals[static_cast<std::size_t>(i)], vals[static_cast<std::size_t>(j)]);
    std::string key;
    for (const auto& r : t.regions)
      key += std::to_string(static_cast<int>(r.kind)) + ":" + std::to_string(r.d) + ",";
    for (auto c : t.rel) key += static_cast<char>('0' + static_cast<int>(c));
    if (seen.insert(std::move(key)).second) out.push_back(std::move(t));
    // advance odometer
    int k = n - 1;
    while (k >= 0) {
      if (++vals[static_cast<std::size_t>(k)] <= hi) break;
      vals[static_cast<std::size_t>(k)] = lo;
      --k;
    }
    if (k < 0) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool brute_rabin_emptiness(const FiniteTreeAutomaton& a) {
  if (a.num_states > 5 || a.pairs.size() > 2 || a.degree > 2)
    throw std::invalid_argument("brute_rabin_emptiness: scale guard");
  if (a.initial.empty()) return false;

  std::vector<std::vector<std::size_t>> by_src(static_cast<std::size_t>(a.num_states));
  for (std::size_t i = 0; i < a.transitions.size(); ++i)
    by_src[static_cast<std::size_t>(a.transitions[i].src)].push_back(i);

  // Enumerate maps from locations to one of their transitions.
  std::vector<std::size_t> pick(static_cast<std::size_t>(a.num_states), 0);
  auto has_pick = [&](int q) { return !by_src[static_cast<std::size_t>(q)].empty(); };

  auto accepting_under = [&](int init) {
    // induced graph on locations
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(a.num_states));
    std::vector<bool> reach(static_cast<std::size_t>(a.num_states), false);
    std::vector<int> stack{init};
    reach[static_cast<std::size_t>(init)] = true;
    while (!stack.empty()) {
      int q = stack.back();
      stack.pop_back();
      if (!has_pick(q)) return false;  // stuck: no run continues
      const auto& t = a.transitions[by_src[static_cast<std::size_t>(q)][pick[static_cast<std::size_t>(q)]]];
      for (int c : t.children) {
        adj[static_cast<std::size_t>(q)].push_back(c);
        if (!reach[static_cast<std::size_t>(c)]) {
          reach[static_cast<std::size_t>(c)] = true;
          stack.push_back(c);
        }
      }
    }
    // every strongly connected vertex set with an internal edge, within the
    // reachable part, must satisfy some pair
    std::vector<int> rs;
    for (int q = 0; q < a.num_states; ++q)
      if (reach[static_cast<std::size_t>(q)]) rs.push_back(q);
    for (std::uint32_t mask = 1; mask < (1u << rs.size()); ++mask) {
      std::set<int> s;
      for (std::size_t i = 0; i < rs.size(); ++i)
        if ((mask >> i) & 1) s.insert(rs[i]);
      // strongly connected with an internal edge?
      bool internal_edge = false;
      bool connected = true;
      for (int q : s) {
        std::set<int> r2;
        std::vector<int> st{q};
        std::set<int> vis{q};
        while (!st.empty()) {
          int v = st.back();
          st.pop_back();
          for (int w : adj[static_cast<std::size_t>(v)]) {
            if (!s.count(w)) continue;
            internal_edge = true;
            if (vis.insert(w).second) st.push_back(w);
          }
        }
        for (int w : s)
          if (!vis.count(w)) connected = false;
        // vis must cover s (reachability inside s from q)
      }
      if (!internal_edge || !connected) continue;
      bool ok = false;
      for (const auto& pr : a.pairs) {
        bool l = false, u = false;
        for (int q : s) {
          if (pr.L.test(static_cast<std::size_t>(q))) l = true;
          if (pr.U.test(static_cast<std::size_t>(q))) u = true;
        }
        if (l && !u) {
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
    return true;
  };

  while (true) {
    for (int init : a.initial)
      if (has_pick(init) && accepting_under(init)) return true;
    int k = a.num_states - 1;
    while (k >= 0) {
      if (by_src[static_cast<std::size_t>(k)].empty()) {
        --k;
        continue;
      }
      if (++pick[static_cast<std::size_t>(k)] < by_src[static_cast<std::size_t>(k)].size()) break;
      pick[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return false;
}

BoundedSearchResult bounded_ctl_search(const FormulaPtr& phi, int state_budget, Int lo, Int hi,
                                       int beta, int degree) {
  if (state_budget > 4 || hi - lo > 6)
    throw std::invalid_argument("bounded_ctl_search: scale guard");
  BoundedSearchResult res;

  const Int width = hi - lo + 1;
  // label tuples over the window
  std::vector<std::vector<Int>> labels;
  {
    std::vector<Int> cur(static_cast<std::size_t>(beta), lo);
    while (true) {
      labels.push_back(cur);
      int k = beta - 1;
      while (k >= 0) {
        if (++cur[static_cast<std::size_t>(k)] <= hi) break;
        cur[static_cast<std::size_t>(k)] = lo;
        --k;
      }
      if (k < 0) break;
    }
  }
  (void)width;

  for (int n = 1; n <= state_budget; ++n) {
    // enumerate label choices and successor tables
    std::vector<std::size_t> lab(static_cast<std::size_t>(n), 0);
    while (true) {
      // successor tables: degree successors per state
      std::vector<int> succ(static_cast<std::size_t>(n) * degree, 0);
      while (true) {
        RegularDataTree t;
        t.degree = degree;
        t.beta = beta;
        t.initial = 0;
        t.states.resize(static_cast<std::size_t>(n));
        for (int s = 0; s < n; ++s) {
          t.states[static_cast<std::size_t>(s)].values = labels[lab[static_cast<std::size_t>(s)]];
          for (int d = 0; d < degree; ++d)
            t.states[static_cast<std::size_t>(s)].succ.push_back(
                succ[static_cast<std::size_t>(s * degree + d)]);
        }
        if (eval_ctl_regular_tree(phi, t)) {
          res.found = true;
          res.witness = std::move(t);
          return res;
        }
        int k = n * degree - 1;
        while (k >= 0) {
          if (++succ[static_cast<std::size_t>(k)] < n) break;
          succ[static_cast<std::size_t>(k)] = 0;
          --k;
        }
        if (k < 0) break;
      }
      int k = n - 1;
      while (k >= 0) {
        if (++lab[static_cast<std::size_t>(k)] < labels.size()) break;
        lab[static_cast<std::size_t>(k)] = 0;
        --k;
      }
      if (k < 0) break;
    }
  }
  return res;
}

}  // namespace ztl
