#include "ztl/word_automata.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <set>

#include "ztl/graph.hpp"

namespace ztl {

bool guard_is_type(const Guard& g) { return std::holds_alternative<TypeId>(g); }

std::string guard_to_string(const Guard& g, const TypeUniverse& u) {
  if (guard_is_type(g)) return u.render(std::get<TypeId>(g));
  return to_string(std::get<Constraint>(g));
}

bool guard_holds(const Guard& g, TypeUniverse& u, std::span<const Int> z,
                 std::span<const Int> zp) {
  if (guard_is_type(g)) return u.type_of(z, zp) == std::get<TypeId>(g);
  return eval_constraint(std::get<Constraint>(g), z, zp);
}

std::vector<std::vector<std::size_t>> WordAutomaton::transitions_by_src() const {
  std::vector<std::vector<std::size_t>> by(static_cast<std::size_t>(num_states));
  for (std::size_t i = 0; i < transitions.size(); ++i)
    by[static_cast<std::size_t>(transitions[i].src)].push_back(i);
  return by;
}

// --- LTL(Z) -> generalized Buchi WCA -------------------------------------

WordAutomaton ltl_to_gbwca(const FormulaPtr& phi, TypeUniversePtr types,
                           const BuildLimits& limits) {
  if (!is_simple_form(phi))
    throw std::invalid_argument("ltl_to_gbwca: formula not in simple form");
  Closure cl = closure(phi, LogicTag::Ltl);
  const std::size_t n = cl.size();
  if (n > 24) throw LimitError("ltl_to_gbwca: closure too large");

  // All propositionally consistent subsets.
  std::vector<Bitset> consistent;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Bitset xs(n);
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1) xs.set(i);
    if (propositionally_consistent(cl, xs, LogicTag::Ltl)) consistent.push_back(xs);
    limits.check(consistent.size(), "ltl_to_gbwca");
  }

  int phi_idx = cl.find(phi);
  assert(phi_idx >= 0);

  // Restrict to sets reachable from the initial ones.
  auto core_of = [&](const Bitset& xs) {
    Bitset core(n);
    xs.for_each([&](std::size_t i) {
      const FormulaPtr& f = cl.items[i];
      if (f->kind == Formula::Next) {
        int j = cl.find(f->a);
        assert(j >= 0);
        core.set(static_cast<std::size_t>(j));
      }
    });
    return core;
  };

  std::map<std::string, int> id_of;
  std::vector<Bitset> states;
  auto encode = [&](const Bitset& b) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += b.test(i) ? '1' : '0';
    return s;
  };
  auto intern = [&](const Bitset& b) {
    auto key = encode(b);
    auto it = id_of.find(key);
    if (it != id_of.end()) return it->second;
    int id = static_cast<int>(states.size());
    states.push_back(b);
    id_of.emplace(std::move(key), id);
    return id;
  };

  WordAutomaton a;
  a.types = std::move(types);
  std::deque<int> work;
  for (const auto& xs : consistent)
    if (xs.test(static_cast<std::size_t>(phi_idx))) {
      int id = intern(xs);
      a.initial.push_back(id);
      work.push_back(id);
    }
  std::vector<bool> expanded;
  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    if (static_cast<std::size_t>(id) < expanded.size() && expanded[static_cast<std::size_t>(id)])
      continue;
    if (expanded.size() <= static_cast<std::size_t>(id)) expanded.resize(static_cast<std::size_t>(id) + 1, false);
    expanded[static_cast<std::size_t>(id)] = true;

    Bitset xs = states[static_cast<std::size_t>(id)];
    // Guard: conjunction of the constraint members of X.
    std::vector<Constraint> parts;
    xs.for_each([&](std::size_t i) {
      if (cl.items[i]->kind == Formula::Leaf) parts.push_back(to_constraint(cl.items[i]->cons));
    });
    Constraint guard = Constraint::conj(std::move(parts));
    Bitset core = core_of(xs);
    for (const auto& target : consistent) {
      if (!target.contains(core)) continue;
      int tid = intern(target);
      limits.check(states.size(), "ltl_to_gbwca");
      a.transitions.push_back({id, 0, guard, tid});
      if (static_cast<std::size_t>(tid) >= expanded.size() ||
          !expanded[static_cast<std::size_t>(tid)])
        work.push_back(tid);
    }
  }
  a.num_states = static_cast<int>(states.size());
  a.acc.kind = Acceptance::GenBuchi;
  for (std::size_t i = 0; i < n; ++i) {
    if (cl.items[i]->kind != Formula::Until) continue;
    Bitset f(states.size());
    int bi = cl.find(cl.items[i]->b);
    for (std::size_t s = 0; s < states.size(); ++s)
      if (!states[s].test(i) || states[s].test(static_cast<std::size_t>(bi))) f.set(s);
    a.acc.sets.push_back(std::move(f));
  }
  a.state_names.reserve(states.size());
  for (const auto& xs : states) {
    std::string name = "{";
    bool first = true;
    xs.for_each([&](std::size_t i) {
      if (!first) name += ", ";
      first = false;
      name += to_string(cl.items[i]);
    });
    a.state_names.push_back(name + "}");
  }
  return a;
}

WordAutomaton degeneralize_word(const WordAutomaton& a) {
  if (a.acc.kind != Acceptance::GenBuchi) return a;
  const std::size_t k = a.acc.sets.size();
  WordAutomaton out = a;
  if (k == 0) {
    out.acc.kind = Acceptance::Buchi;
    Bitset all(static_cast<std::size_t>(a.num_states));
    for (int q = 0; q < a.num_states; ++q) all.set(static_cast<std::size_t>(q));
    out.acc.sets = {all};
    return out;
  }
  if (k == 1) {
    out.acc.kind = Acceptance::Buchi;
    out.acc.sets = {a.acc.sets[0]};
    return out;
  }
  const int copies = static_cast<int>(k) + 1;
  auto nid = [&](int copy, int q) { return copy * a.num_states + q; };
  auto next_copy = [&](int copy, int q) {
    if (copy == 0) return 1;
    return a.acc.sets[static_cast<std::size_t>(copy - 1)].test(static_cast<std::size_t>(q))
               ? (copy + 1) % copies
               : copy;
  };
  out = WordAutomaton{};
  out.types = a.types;
  out.letters = a.letters;
  out.num_states = copies * a.num_states;
  for (int q0 : a.initial) out.initial.push_back(nid(0, q0));
  for (const auto& t : a.transitions)
    for (int c = 0; c < copies; ++c)
      out.transitions.push_back({nid(c, t.src), t.letter, t.guard, nid(next_copy(c, t.dst), t.dst)});
  out.acc.kind = Acceptance::Buchi;
  Bitset f(static_cast<std::size_t>(out.num_states));
  for (int q = 0; q < a.num_states; ++q) f.set(static_cast<std::size_t>(nid(0, q)));
  out.acc.sets = {f};
  if (!a.state_names.empty()) {
    out.state_names.resize(static_cast<std::size_t>(out.num_states));
    for (int c = 0; c < copies; ++c)
      for (int q = 0; q < a.num_states; ++q)
        out.state_names[static_cast<std::size_t>(nid(c, q))] =
            std::to_string(c) + ":" + a.state_names[static_cast<std::size_t>(q)];
  }
  return out;
}

WordAutomaton normalize_to_types(const WordAutomaton& a) {
  WordAutomaton out = a;
  out.transitions.clear();
  for (const auto& t : a.transitions) {
    if (guard_is_type(t.guard)) {
      out.transitions.push_back(t);
      continue;
    }
    for (TypeId ty : a.types->expansion(std::get<Constraint>(t.guard)))
      out.transitions.push_back({t.src, t.letter, Guard{ty}, t.dst});
  }
  return out;
}

// --- Lasso membership ----------------------------------------------------

namespace {

struct ProductGraph {
  std::size_t positions = 0;
  int states = 0;
  std::vector<std::vector<int>> adj;  // vertex = p * states + q
  std::vector<int> init;              // vertices
  int vertex(std::size_t p, int q) const { return static_cast<int>(p) * states + q; }
  int loc(int v) const { return v % states; }
};

// Acceptance of some cycle within the reachable product, per kind.
bool accepting_cycle(const ProductGraph& g, const Acceptance& acc) {
  const int n = static_cast<int>(g.adj.size());
  std::vector<bool> reach(static_cast<std::size_t>(n), false);
  std::deque<int> bfs(g.init.begin(), g.init.end());
  for (int v : g.init) reach[static_cast<std::size_t>(v)] = true;
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop_front();
    for (int w : g.adj[static_cast<std::size_t>(v)])
      if (!reach[static_cast<std::size_t>(w)]) {
        reach[static_cast<std::size_t>(w)] = true;
        bfs.push_back(w);
      }
  }
  auto restricted_sccs = [&](const std::vector<bool>& keep) {
    std::vector<std::vector<int>> adj2(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
      if (keep[static_cast<std::size_t>(v)])
        for (int w : g.adj[static_cast<std::size_t>(v)])
          if (keep[static_cast<std::size_t>(w)]) adj2[static_cast<std::size_t>(v)].push_back(w);
    return std::pair(strongly_connected_components(adj2), std::move(adj2));
  };
  auto cyclic_components = [&](const SccResult& scc, const std::vector<std::vector<int>>& adj2,
                               const std::vector<bool>& keep) {
    std::vector<char> cyc(static_cast<std::size_t>(scc.count), 0);
    std::vector<int> size(static_cast<std::size_t>(scc.count), 0);
    for (int v = 0; v < n; ++v)
      if (keep[static_cast<std::size_t>(v)]) ++size[static_cast<std::size_t>(scc.comp[static_cast<std::size_t>(v)])];
    for (int v = 0; v < n; ++v)
      if (keep[static_cast<std::size_t>(v)])
        for (int w : adj2[static_cast<std::size_t>(v)])
          if (scc.comp[static_cast<std::size_t>(v)] == scc.comp[static_cast<std::size_t>(w)] &&
              (v != w || true))
            cyc[static_cast<std::size_t>(scc.comp[static_cast<std::size_t>(v)])] = 1;
    (void)size;
    return cyc;
  };

  switch (acc.kind) {
    case Acceptance::Buchi:
    case Acceptance::GenBuchi: {
      auto [scc, adj2] = restricted_sccs(reach);
      auto cyc = cyclic_components(scc, adj2, reach);
      std::size_t k = acc.sets.size();
      std::vector<std::vector<char>> hits(static_cast<std::size_t>(scc.count),
                                          std::vector<char>(std::max<std::size_t>(k, 1), 0));
      for (int v = 0; v < n; ++v) {
        if (!reach[static_cast<std::size_t>(v)]) continue;
        int c = scc.comp[static_cast<std::size_t>(v)];
        for (std::size_t i = 0; i < k; ++i)
          if (acc.sets[i].test(static_cast<std::size_t>(g.loc(v)))) hits[static_cast<std::size_t>(c)][i] = 1;
      }
      for (int c = 0; c < scc.count; ++c) {
        if (!cyc[static_cast<std::size_t>(c)]) continue;
        bool all = true;
        for (std::size_t i = 0; i < k; ++i) all = all && hits[static_cast<std::size_t>(c)][i];
        if (all) return true;
      }
      return false;
    }
    case Acceptance::Rabin: {
      for (const auto& pr : acc.pairs) {
        std::vector<bool> keep = reach;
        for (int v = 0; v < n; ++v)
          if (keep[static_cast<std::size_t>(v)] && pr.U.test(static_cast<std::size_t>(g.loc(v))))
            keep[static_cast<std::size_t>(v)] = false;
        auto [scc, adj2] = restricted_sccs(keep);
        auto cyc = cyclic_components(scc, adj2, keep);
        for (int v = 0; v < n; ++v)
          if (keep[static_cast<std::size_t>(v)] && cyc[static_cast<std::size_t>(scc.comp[static_cast<std::size_t>(v)])] &&
              pr.L.test(static_cast<std::size_t>(g.loc(v))))
            return true;
      }
      return false;
    }
    case Acceptance::Streett: {
      // Recursive good-component search.
      std::vector<int> verts;
      for (int v = 0; v < n; ++v)
        if (reach[static_cast<std::size_t>(v)]) verts.push_back(v);
      auto good = [&](auto&& self, std::vector<bool> keep) -> bool {
        auto [scc, adj2] = restricted_sccs(keep);
        auto cyc = cyclic_components(scc, adj2, keep);
        for (int c = 0; c < scc.count; ++c) {
          if (!cyc[static_cast<std::size_t>(c)]) continue;
          // Component vertex set.
          std::vector<bool> inc(static_cast<std::size_t>(n), false);
          bool nonempty = false;
          for (int v = 0; v < n; ++v)
            if (keep[static_cast<std::size_t>(v)] && scc.comp[static_cast<std::size_t>(v)] == c) {
              inc[static_cast<std::size_t>(v)] = true;
              nonempty = true;
            }
          if (!nonempty) continue;
          // Violated pairs force removal of their L-vertices.
          std::vector<bool> next = inc;
          bool violated = false;
          for (const auto& pr : acc.pairs) {
            bool hasL = false, hasU = false;
            for (int v = 0; v < n; ++v)
              if (inc[static_cast<std::size_t>(v)]) {
                if (pr.L.test(static_cast<std::size_t>(g.loc(v)))) hasL = true;
                if (pr.U.test(static_cast<std::size_t>(g.loc(v)))) hasU = true;
              }
            if (hasL && !hasU) {
              violated = true;
              for (int v = 0; v < n; ++v)
                if (next[static_cast<std::size_t>(v)] && pr.L.test(static_cast<std::size_t>(g.loc(v))))
                  next[static_cast<std::size_t>(v)] = false;
            }
          }
          if (!violated) return true;
          bool changed = false;
          for (int v = 0; v < n; ++v) changed = changed || (inc[static_cast<std::size_t>(v)] != next[static_cast<std::size_t>(v)]);
          if (changed && self(self, next)) return true;
        }
        return false;
      };
      std::vector<bool> keep = reach;
      return good(good, keep);
    }
  }
  return false;
}

}  // namespace

bool lasso_membership(const WordAutomaton& a, const LassoDataWord& w) {
  if (w.loop.empty()) throw std::invalid_argument("lasso loop must be nonempty");
  for (const auto& v : w.prefix)
    if (static_cast<int>(v.size()) != a.ctx().beta)
      throw std::invalid_argument("lasso dimension mismatch");
  for (const auto& v : w.loop)
    if (static_cast<int>(v.size()) != a.ctx().beta)
      throw std::invalid_argument("lasso dimension mismatch");
  const std::size_t P = w.total();
  ProductGraph g;
  g.positions = P;
  g.states = a.num_states;
  g.adj.assign(P * static_cast<std::size_t>(a.num_states), {});
  for (std::size_t p = 0; p < P; ++p) {
    std::size_t np = w.next(p);
    for (const auto& t : a.transitions) {
      if (guard_holds(t.guard, *a.types, w.at(p), w.at(np)))
        g.adj[static_cast<std::size_t>(g.vertex(p, t.src))].push_back(g.vertex(np, t.dst));
    }
  }
  for (int q0 : a.initial) g.init.push_back(g.vertex(0, q0));
  return accepting_cycle(g, a.acc);
}

bool lasso_membership_symbolic(const WordAutomaton& a, const SymbolicLasso& w) {
  if (w.loop.empty()) throw std::invalid_argument("lasso loop must be nonempty");
  const std::size_t P = w.total();
  ProductGraph g;
  g.positions = P;
  g.states = a.num_states;
  g.adj.assign(P * static_cast<std::size_t>(a.num_states), {});
  for (std::size_t p = 0; p < P; ++p) {
    std::size_t np = w.next(p);
    const auto& sym = w.at(p);
    for (const auto& t : a.transitions) {
      if (!guard_is_type(t.guard))
        throw std::invalid_argument("symbolic membership requires type guards");
      if (t.letter == sym.letter && std::get<TypeId>(t.guard) == sym.type)
        g.adj[static_cast<std::size_t>(g.vertex(p, t.src))].push_back(g.vertex(np, t.dst));
    }
  }
  for (int q0 : a.initial) g.init.push_back(g.vertex(0, q0));
  return accepting_cycle(g, a.acc);
}

// --- Acceptance conversions ----------------------------------------------

WordAutomaton rabin_as_streett_complement(const WordAutomaton& a) {
  if (a.acc.kind != Acceptance::Rabin)
    throw std::invalid_argument("rabin_as_streett_complement: Rabin input required");
  if (!a.deterministic)
    throw std::invalid_argument("rabin_as_streett_complement: deterministic input required");
  WordAutomaton out = a;
  // Complete with a rejecting sink where needed; the sink sits in no L, so
  // the complement reading accepts everything routed through it.
  std::set<std::string> covered;
  for (const auto& t : a.transitions) {
    if (!guard_is_type(t.guard))
      throw std::invalid_argument("rabin_as_streett_complement: type guards required");
    covered.insert(std::to_string(t.src) + "|" + std::to_string(t.letter) + "|" +
                   std::to_string(std::get<TypeId>(t.guard)));
  }
  bool need_sink = false;
  for (int q = 0; q < a.num_states && !need_sink; ++q)
    for (std::size_t l = 0; l < a.letters.size() && !need_sink; ++l)
      for (TypeId ty : a.types->all())
        if (!covered.count(std::to_string(q) + "|" + std::to_string(l) + "|" + std::to_string(ty))) {
          need_sink = true;
          break;
        }
  if (need_sink) {
    int sink = out.num_states++;
    out.state_names.resize(static_cast<std::size_t>(out.num_states), "sink");
    for (int q = 0; q < out.num_states; ++q)
      for (std::size_t l = 0; l < out.letters.size(); ++l)
        for (TypeId ty : out.types->all()) {
          if (q != sink &&
              covered.count(std::to_string(q) + "|" + std::to_string(l) + "|" + std::to_string(ty)))
            continue;
          out.transitions.push_back({q, static_cast<int>(l), Guard{ty}, sink});
        }
    for (auto& pr : out.acc.pairs) {
      pr.L.resize(static_cast<std::size_t>(out.num_states));
      pr.U.resize(static_cast<std::size_t>(out.num_states));
    }
  }
  out.acc.kind = Acceptance::Streett;
  return out;
}

void prune_vacuous_pairs(WordAutomaton& a) {
  if (a.acc.kind != Acceptance::Rabin && a.acc.kind != Acceptance::Streett) return;
  Bitset reach(static_cast<std::size_t>(a.num_states));
  std::deque<int> work(a.initial.begin(), a.initial.end());
  for (int q : a.initial) reach.set(static_cast<std::size_t>(q));
  auto by = a.transitions_by_src();
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    for (std::size_t ti : by[static_cast<std::size_t>(q)]) {
      int d = a.transitions[ti].dst;
      if (!reach.test(static_cast<std::size_t>(d))) {
        reach.set(static_cast<std::size_t>(d));
        work.push_back(d);
      }
    }
  }
  std::vector<RabinPair> kept;
  std::vector<std::string> seen;
  for (const auto& pr : a.acc.pairs) {
    bool l_reachable = pr.L.intersects(reach);
    bool u_covers = pr.U.contains(reach);
    if (a.acc.kind == Acceptance::Streett) {
      // Conjunct is vacuously true when L is unreachable or U covers
      // everything a run can visit.
      if (!l_reachable || u_covers) continue;
    } else {
      // A Rabin disjunct without reachable L can never fire.
      if (!l_reachable) continue;
    }
    std::string key;
    for (int q = 0; q < a.num_states; ++q)
      key += pr.L.test(static_cast<std::size_t>(q)) ? (pr.U.test(static_cast<std::size_t>(q)) ? 'B' : 'L')
                                                    : (pr.U.test(static_cast<std::size_t>(q)) ? 'U' : '.');
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(std::move(key));
    kept.push_back(pr);
  }
  a.acc.pairs = std::move(kept);
}

WordAutomaton rabin_word_to_buchi(const WordAutomaton& a) {
  if (a.acc.kind != Acceptance::Rabin)
    throw std::invalid_argument("rabin_word_to_buchi: Rabin input required");
  const int N = static_cast<int>(a.acc.pairs.size());
  const int Q = a.num_states;
  WordAutomaton out;
  out.types = a.types;
  out.letters = a.letters;
  out.num_states = Q * (N + 1);
  auto base = [&](int q) { return q; };
  auto copy = [&](int i, int q) { return (i + 1) * Q + q; };
  out.initial = a.initial;
  for (const auto& t : a.transitions) {
    out.transitions.push_back({base(t.src), t.letter, t.guard, base(t.dst)});
    for (int i = 0; i < N; ++i) {
      const auto& pr = a.acc.pairs[static_cast<std::size_t>(i)];
      bool src_ok = !pr.U.test(static_cast<std::size_t>(t.src));
      bool dst_ok = !pr.U.test(static_cast<std::size_t>(t.dst));
      if (dst_ok) out.transitions.push_back({base(t.src), t.letter, t.guard, copy(i, t.dst)});
      if (src_ok && dst_ok)
        out.transitions.push_back({copy(i, t.src), t.letter, t.guard, copy(i, t.dst)});
    }
  }
  out.acc.kind = Acceptance::Buchi;
  Bitset f(static_cast<std::size_t>(out.num_states));
  for (int i = 0; i < N; ++i) {
    const auto& pr = a.acc.pairs[static_cast<std::size_t>(i)];
    for (int q = 0; q < Q; ++q)
      if (pr.L.test(static_cast<std::size_t>(q)) && !pr.U.test(static_cast<std::size_t>(q)))
        f.set(static_cast<std::size_t>(copy(i, q)));
  }
  out.acc.sets = {f};
  return out;
}

}  // namespace ztl
