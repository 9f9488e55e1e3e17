#include "ztl/symbolic.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <set>

#include "ztl/graph.hpp"

namespace ztl {

// --- Abstraction -----------------------------------------------------------

RegularSymbolicTree abstract_tree(const RegularDataTree& t, TypeUniversePtr types) {
  if (t.beta != types->beta())
    throw std::invalid_argument("abstract_tree: variable count mismatch");
  RegularSymbolicTree out;
  out.types = types;
  out.degree = t.degree;
  std::map<std::pair<int, int>, int> id_of;  // (parent state or -1, state)
  std::deque<std::pair<int, int>> work;
  std::vector<Int> zero(static_cast<std::size_t>(t.beta), 0);

  auto intern = [&](int parent, int state) {
    auto key = std::make_pair(parent, state);
    auto it = id_of.find(key);
    if (it != id_of.end()) return it->second;
    int id = static_cast<int>(out.states.size());
    id_of.emplace(key, id);
    const auto& parent_vals = parent < 0 ? zero : t.states[static_cast<std::size_t>(parent)].values;
    RegularSymbolicTree::State s;
    s.label.letter = t.states[static_cast<std::size_t>(state)].letter;
    s.label.type = types->type_of(parent_vals, t.states[static_cast<std::size_t>(state)].values);
    s.succ.assign(static_cast<std::size_t>(t.degree), -1);
    out.states.push_back(std::move(s));
    work.emplace_back(parent, state);
    return id;
  };
  out.initial = intern(-1, t.initial);
  while (!work.empty()) {
    auto [parent, state] = work.front();
    work.pop_front();
    int id = id_of.at({parent, state});
    for (int d = 0; d < t.degree; ++d) {
      int child = t.states[static_cast<std::size_t>(state)].succ[static_cast<std::size_t>(d)];
      out.states[static_cast<std::size_t>(id)].succ[static_cast<std::size_t>(d)] =
          intern(state, child);
    }
  }
  return out;
}

bool locally_consistent(const RegularSymbolicTree& t) {
  for (const auto& s : t.states)
    for (int child : s.succ)
      if (!t.types->agrees(s.label.type, t.states[static_cast<std::size_t>(child)].label.type))
        return false;
  return true;
}

std::vector<SymbolicLasso> machine_lassos(const RegularSymbolicTree& t, std::size_t cap) {
  // Enumerate simple paths initial ->* v plus simple cycles at v.
  std::vector<SymbolicLasso> out;
  std::vector<int> path;
  std::vector<bool> on_path(t.states.size(), false);

  auto label_of = [&](int s) {
    return SymbolicLasso::Letter{t.states[static_cast<std::size_t>(s)].label.letter,
                                 t.states[static_cast<std::size_t>(s)].label.type};
  };

  auto cycle_from = [&](auto&& self, int v, int cur, std::vector<int>& cyc,
                        std::vector<bool>& on_cyc) -> void {
    if (out.size() >= cap) return;
    for (int d = 0; d < t.degree; ++d) {
      int nxt = t.states[static_cast<std::size_t>(cur)].succ[static_cast<std::size_t>(d)];
      if (nxt == v) {
        SymbolicLasso w;
        for (int s : path) w.prefix.push_back(label_of(s));
        for (int s : cyc) w.loop.push_back(label_of(s));
        out.push_back(std::move(w));
        if (out.size() >= cap) return;
      } else if (!on_cyc[static_cast<std::size_t>(nxt)] && !on_path[static_cast<std::size_t>(nxt)]) {
        on_cyc[static_cast<std::size_t>(nxt)] = true;
        cyc.push_back(nxt);
        self(self, v, nxt, cyc, on_cyc);
        cyc.pop_back();
        on_cyc[static_cast<std::size_t>(nxt)] = false;
      }
    }
  };

  auto walk = [&](auto&& self, int v) -> void {
    if (out.size() >= cap) return;
    // cycles rooted at v (v not in prefix)
    std::vector<int> cyc{v};
    std::vector<bool> on_cyc(t.states.size(), false);
    on_cyc[static_cast<std::size_t>(v)] = true;
    cycle_from(cycle_from, v, v, cyc, on_cyc);
    // extend the simple prefix
    on_path[static_cast<std::size_t>(v)] = true;
    path.push_back(v);
    for (int d = 0; d < t.degree; ++d) {
      int nxt = t.states[static_cast<std::size_t>(v)].succ[static_cast<std::size_t>(d)];
      if (!on_path[static_cast<std::size_t>(nxt)]) self(self, nxt);
    }
    path.pop_back();
    on_path[static_cast<std::size_t>(v)] = false;
  };
  walk(walk, t.initial);
  return out;
}

// --- A_B -------------------------------------------------------------------

namespace {

// Thread slot encoding over DVAR = variables plus the constant anchors
// (one anchor when d1 = dalpha: DVAR is a set).
struct AbLayout {
  int beta;
  bool merged_anchors;
  explicit AbLayout(const ConstantContext& ctx)
      : beta(ctx.beta), merged_anchors(ctx.d1() == ctx.dalpha()) {}
  int dvar() const { return beta + (merged_anchors ? 1 : 2); }
  int threads() const { return dvar() * dvar() * 4; }
  int states() const { return threads() + 1; }  // + q_in (id 0)
  int thread_id(int u, int v, int d, int strict) const {
    return 1 + ((u * dvar() + v) * 2 + d) * 2 + strict;
  }
  // slot for the type-level atom helper; primed selects the primed copy
  int slot(int xd, bool primed) const {
    if (xd < beta) return primed ? beta + xd : xd;
    return xd == beta ? TypeUniverse::kSlotD1 : TypeUniverse::kSlotDalpha;
  }
  std::string name(int xd) const {
    if (xd < beta) return "x" + std::to_string(xd + 1);
    return xd == beta ? "d1" : "da";
  }
  std::string state_name(int q) const {
    if (q == 0) return "init";
    int rest = q - 1;
    int strict = rest & 1;
    int d = (rest >> 1) & 1;
    int v = (rest >> 2) % dvar();
    int u = (rest >> 2) / dvar();
    return "(" + name(u) + "," + name(v) + (d ? ",rp," : ",p,") + (strict ? "<" : "=") + ")";
  }
};

}  // namespace

// Language-preserving trim: keep locations that are reachable and lie on a
// path to an accepting cycle.
WordAutomaton trim_buchi(const WordAutomaton& a) {
  if (a.acc.kind != Acceptance::Buchi)
    throw std::invalid_argument("trim_buchi: Buchi input required");
  const int n = a.num_states;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n)), radj(static_cast<std::size_t>(n));
  for (const auto& t : a.transitions) {
    adj[static_cast<std::size_t>(t.src)].push_back(t.dst);
    radj[static_cast<std::size_t>(t.dst)].push_back(t.src);
  }
  std::vector<bool> reach(static_cast<std::size_t>(n), false);
  std::deque<int> work(a.initial.begin(), a.initial.end());
  for (int q : a.initial) reach[static_cast<std::size_t>(q)] = true;
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    for (int w : adj[static_cast<std::size_t>(q)])
      if (!reach[static_cast<std::size_t>(w)]) {
        reach[static_cast<std::size_t>(w)] = true;
        work.push_back(w);
      }
  }
  // accepting states on cycles: F-state in a cyclic SCC
  SccResult scc = strongly_connected_components(adj);
  std::vector<char> cyclic(static_cast<std::size_t>(scc.count), 0);
  for (int v = 0; v < n; ++v)
    for (int w : adj[static_cast<std::size_t>(v)])
      if (scc.comp[static_cast<std::size_t>(v)] == scc.comp[static_cast<std::size_t>(w)])
        cyclic[static_cast<std::size_t>(scc.comp[static_cast<std::size_t>(v)])] = 1;
  std::vector<bool> live(static_cast<std::size_t>(n), false);
  std::deque<int> back;
  for (int q = 0; q < n; ++q)
    if (a.acc.sets[0].test(static_cast<std::size_t>(q)) &&
        cyclic[static_cast<std::size_t>(scc.comp[static_cast<std::size_t>(q)])]) {
      live[static_cast<std::size_t>(q)] = true;
      back.push_back(q);
    }
  while (!back.empty()) {
    int q = back.front();
    back.pop_front();
    for (int w : radj[static_cast<std::size_t>(q)])
      if (!live[static_cast<std::size_t>(w)]) {
        live[static_cast<std::size_t>(w)] = true;
        back.push_back(w);
      }
  }
  std::vector<int> remap(static_cast<std::size_t>(n), -1);
  WordAutomaton out;
  out.types = a.types;
  out.letters = a.letters;
  int next = 0;
  for (int q = 0; q < n; ++q)
    if (reach[static_cast<std::size_t>(q)] && live[static_cast<std::size_t>(q)]) remap[static_cast<std::size_t>(q)] = next++;
  out.num_states = std::max(next, 1);
  for (int q : a.initial)
    if (remap[static_cast<std::size_t>(q)] >= 0) out.initial.push_back(remap[static_cast<std::size_t>(q)]);
  if (out.initial.empty()) out.initial = {0};  // empty language, single dead state
  for (const auto& t : a.transitions)
    if (remap[static_cast<std::size_t>(t.src)] >= 0 && remap[static_cast<std::size_t>(t.dst)] >= 0)
      out.transitions.push_back(
          {remap[static_cast<std::size_t>(t.src)], t.letter, t.guard, remap[static_cast<std::size_t>(t.dst)]});
  out.acc.kind = Acceptance::Buchi;
  Bitset f(static_cast<std::size_t>(out.num_states));
  for (int q = 0; q < n; ++q)
    if (remap[static_cast<std::size_t>(q)] >= 0 && a.acc.sets[0].test(static_cast<std::size_t>(q)))
      f.set(static_cast<std::size_t>(remap[static_cast<std::size_t>(q)]));
  out.acc.sets = {f};
  if (!a.state_names.empty()) {
    out.state_names.resize(static_cast<std::size_t>(out.num_states));
    for (int q = 0; q < n; ++q)
      if (remap[static_cast<std::size_t>(q)] >= 0)
        out.state_names[static_cast<std::size_t>(remap[static_cast<std::size_t>(q)])] =
            a.state_names[static_cast<std::size_t>(q)];
  }
  return out;
}

WordAutomaton build_AB(TypeUniversePtr types, int num_letters) {
  AbLayout lay(types->ctx());
  WordAutomaton a;
  a.types = types;
  a.letters.assign(static_cast<std::size_t>(num_letters), "#");
  for (int i = 0; i < num_letters; ++i) a.letters[static_cast<std::size_t>(i)] = "a" + std::to_string(i);
  if (num_letters == 1) a.letters[0] = "#";
  a.num_states = lay.states();
  a.initial = {0};
  a.state_names.resize(static_cast<std::size_t>(a.num_states));
  for (int q = 0; q < a.num_states; ++q) a.state_names[static_cast<std::size_t>(q)] = lay.state_name(q);

  const int D = lay.dvar();
  auto holds = [&](TypeId ty, int xd_a, bool pa, Cmp c, int xd_b, bool pb) {
    return types->holds_slot_atom(ty, lay.slot(xd_a, pa), c, lay.slot(xd_b, pb));
  };
  for (TypeId ty : types->all()) {
    for (int letter = 0; letter < num_letters; ++letter) {
      a.transitions.push_back({0, letter, Guard{ty}, 0});
      // initialization of a violating thread
      for (int u = 0; u < D; ++u)
        for (int v = 0; v < D; ++v) {
          if (!holds(ty, u, true, Cmp::Lt, v, true)) continue;
          for (int d = 0; d < 2; ++d)
            for (int s = 0; s < 2; ++s)
              a.transitions.push_back({0, letter, Guard{ty}, lay.thread_id(u, v, d, s)});
        }
      // thread steps
      for (int u = 0; u < D; ++u)
        for (int v = 0; v < D; ++v)
          for (int u3 = 0; u3 < D; ++u3)
            for (int v4 = 0; v4 < D; ++v4) {
              if (!holds(ty, u3, true, Cmp::Lt, v4, true)) continue;
              // path-map thread: p advances via u ~' u3', rp side must not increase
              bool rp_ok = holds(ty, v4, true, Cmp::Eq, v, false) ||
                           holds(ty, v4, true, Cmp::Lt, v, false);
              if (rp_ok) {
                for (int s2 = 0; s2 < 2; ++s2) {
                  Cmp step = s2 ? Cmp::Lt : Cmp::Eq;
                  if (!holds(ty, u, false, step, u3, true)) continue;
                  for (int s = 0; s < 2; ++s)
                    a.transitions.push_back(
                        {lay.thread_id(u, v, 0, s), letter, Guard{ty}, lay.thread_id(u3, v4, 0, s2)});
                }
              }
              // reverse-path-map thread: rp advances via v4' ~' v, p side must not decrease
              bool p_ok = holds(ty, u, false, Cmp::Eq, u3, true) ||
                          holds(ty, u, false, Cmp::Lt, u3, true);
              if (p_ok) {
                for (int s2 = 0; s2 < 2; ++s2) {
                  Cmp step = s2 ? Cmp::Lt : Cmp::Eq;
                  if (!holds(ty, v4, true, step, v, false)) continue;
                  for (int s = 0; s < 2; ++s)
                    a.transitions.push_back(
                        {lay.thread_id(u, v, 1, s), letter, Guard{ty}, lay.thread_id(u3, v4, 1, s2)});
                }
              }
            }
    }
  }
  a.acc.kind = Acceptance::Buchi;
  Bitset f(static_cast<std::size_t>(a.num_states));
  for (int u = 0; u < D; ++u)
    for (int v = 0; v < D; ++v)
      for (int d = 0; d < 2; ++d) f.set(static_cast<std::size_t>(lay.thread_id(u, v, d, 1)));
  a.acc.sets = {f};
  return a;
}

bool classed_lasso_accepts(const ClassedDetAutomaton& a, const SymbolicLasso& w) {
  // Deterministic run; find the loop of (position, state) pairs.
  std::map<std::pair<std::size_t, int>, std::size_t> seen;
  std::vector<int> states_on_run;
  std::size_t pos = 0;
  int s = a.initial;
  std::size_t step = 0;
  while (true) {
    auto key = std::make_pair(pos, s);
    auto it = seen.find(key);
    if (it != seen.end()) {
      // states visited infinitely often: run suffix from it->second
      Bitset inf_pairs_L(a.pair_count), inf_pairs_U(a.pair_count);
      for (std::size_t i = it->second; i < step; ++i) {
        inf_pairs_L |= a.state_L[static_cast<std::size_t>(states_on_run[i])];
        inf_pairs_U |= a.state_U[static_cast<std::size_t>(states_on_run[i])];
      }
      if (a.reading == Acceptance::Rabin) {
        for (std::size_t p = 0; p < a.pair_count; ++p)
          if (inf_pairs_L.test(p) && !inf_pairs_U.test(p)) return true;
        return false;
      }
      for (std::size_t p = 0; p < a.pair_count; ++p)
        if (inf_pairs_L.test(p) && !inf_pairs_U.test(p)) return false;
      return true;
    }
    seen.emplace(key, step);
    states_on_run.push_back(s);
    const auto& sym = w.at(pos);
    s = a.step(s, sym.letter, sym.type);
    pos = w.next(pos);
    ++step;
  }
}

WordAutomaton expand_classed(const ClassedDetAutomaton& a) {
  WordAutomaton out;
  out.types = a.types;
  out.letters.assign(static_cast<std::size_t>(a.num_letters), "#");
  out.num_states = a.num_states;
  out.initial = {a.initial};
  out.deterministic = true;
  out.state_names = a.state_names;
  for (int s = 0; s < a.num_states; ++s)
    for (int letter = 0; letter < a.num_letters; ++letter)
      for (TypeId ty : a.types->all())
        out.transitions.push_back({s, letter, Guard{ty}, a.step(s, letter, ty)});
  out.acc.kind = a.reading == Acceptance::Rabin ? Acceptance::Rabin : Acceptance::Streett;
  out.acc.pairs.resize(a.pair_count);
  for (auto& pr : out.acc.pairs) {
    pr.L.resize(static_cast<std::size_t>(a.num_states));
    pr.U.resize(static_cast<std::size_t>(a.num_states));
  }
  for (int s = 0; s < a.num_states; ++s)
    for (std::size_t p = 0; p < a.pair_count; ++p) {
      if (a.state_L[static_cast<std::size_t>(s)].test(p)) out.acc.pairs[p].L.set(static_cast<std::size_t>(s));
      if (a.state_U[static_cast<std::size_t>(s)].test(p)) out.acc.pairs[p].U.set(static_cast<std::size_t>(s));
    }
  return out;
}

// --- The star chain --------------------------------------------------------

ClassedDetAutomaton streett_to_rabin_classed(const ClassedDetAutomaton& st,
                                             const BuildLimits& limits) {
  if (st.reading != Acceptance::Streett)
    throw std::invalid_argument("streett_to_rabin_classed: Streett reading required");
  const int N = static_cast<int>(st.pair_count);  // plus the appended (Q,Q) pair
  const int M = N + 1;

  struct IarState {
    int q;
    std::vector<std::uint8_t> sigma;  // permutation of [1..M], 0-based values
    int e, f;                         // 1-based positions
  };
  auto encode = [&](const IarState& s) {
    std::string k = std::to_string(s.q) + "|" + std::to_string(s.e) + "," + std::to_string(s.f) + "|";
    for (auto b : s.sigma) k += static_cast<char>('0' + b);
    return k;
  };
  auto in_L = [&](int q, int idx0) {  // idx0 in [0..M-1]; M-1 is the (Q,Q) pair
    return idx0 == N || st.state_L[static_cast<std::size_t>(q)].test(static_cast<std::size_t>(idx0));
  };
  auto in_U = [&](int q, int idx0) {
    return idx0 == N || st.state_U[static_cast<std::size_t>(q)].test(static_cast<std::size_t>(idx0));
  };

  std::map<std::string, int> id_of;
  std::vector<IarState> states;
  auto intern = [&](IarState s) {
    auto key = encode(s);
    auto it = id_of.find(key);
    if (it != id_of.end()) return it->second;
    int id = static_cast<int>(states.size());
    id_of.emplace(std::move(key), id);
    states.push_back(std::move(s));
    limits.check(states.size(), "streett_to_rabin");
    return id;
  };

  IarState init;
  init.q = st.initial;
  init.sigma.resize(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) init.sigma[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
  init.e = M;
  init.f = M;
  int init_id = intern(init);

  ClassedDetAutomaton out;
  out.types = st.types;
  out.num_letters = st.num_letters;
  out.num_classes = st.num_classes;
  out.class_of = st.class_of;
  out.num_types = st.num_types;
  out.initial = init_id;
  out.reading = Acceptance::Rabin;
  out.pair_count = static_cast<std::size_t>(M);

  std::deque<int> work{init_id};
  std::vector<bool> done;
  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    if (static_cast<std::size_t>(id) < done.size() && done[static_cast<std::size_t>(id)]) continue;
    if (done.size() <= static_cast<std::size_t>(id)) done.resize(static_cast<std::size_t>(id) + 1, false);
    done[static_cast<std::size_t>(id)] = true;
    if (out.succ.size() <= static_cast<std::size_t>(id)) out.succ.resize(states.size());
    IarState cur = states[static_cast<std::size_t>(id)];  // copy: states may grow
    out.succ[static_cast<std::size_t>(id)].assign(static_cast<std::size_t>(st.num_classes), -1);
    for (int c = 0; c < st.num_classes; ++c) {
      int q2 = st.succ[static_cast<std::size_t>(cur.q)][static_cast<std::size_t>(c)];
      // g1/g2: minimal sigma-positions whose pair's U (resp. L) contains q2
      int e2 = 0, f2 = 0;
      for (int i = 0; i < M; ++i)
        if (in_U(q2, cur.sigma[static_cast<std::size_t>(i)])) {
          e2 = i + 1;
          break;
        }
      for (int i = 0; i < M; ++i)
        if (in_L(q2, cur.sigma[static_cast<std::size_t>(i)])) {
          f2 = i + 1;
          break;
        }
      assert(e2 >= 1 && f2 >= 1);
      IarState nxt;
      nxt.q = q2;
      nxt.e = e2;
      nxt.f = f2;
      nxt.sigma = cur.sigma;
      // move sigma(e2) to the rightmost position
      std::uint8_t moved = nxt.sigma[static_cast<std::size_t>(e2 - 1)];
      nxt.sigma.erase(nxt.sigma.begin() + (e2 - 1));
      nxt.sigma.push_back(moved);
      int nid = intern(std::move(nxt));
      if (out.succ.size() <= static_cast<std::size_t>(nid)) out.succ.resize(states.size());
      out.succ[static_cast<std::size_t>(id)][static_cast<std::size_t>(c)] = nid;
      if (static_cast<std::size_t>(nid) >= done.size() || !done[static_cast<std::size_t>(nid)])
        work.push_back(nid);
    }
  }
  out.num_states = static_cast<int>(states.size());
  out.succ.resize(states.size());
  out.state_L.assign(states.size(), Bitset(out.pair_count));
  out.state_U.assign(states.size(), Bitset(out.pair_count));
  out.state_names.resize(states.size());
  for (std::size_t s = 0; s < states.size(); ++s) {
    // L'_i = {e = i}, U'_i = {f < i}, positions 1-based
    out.state_L[s].set(static_cast<std::size_t>(states[s].e - 1));
    for (int i = states[s].f + 1; i <= M; ++i) out.state_U[s].set(static_cast<std::size_t>(i - 1));
    out.state_names[s] =
        (states[s].q < static_cast<int>(st.state_names.size()) ? st.state_names[static_cast<std::size_t>(states[s].q)]
                                                               : std::to_string(states[s].q)) +
        " e=" + std::to_string(states[s].e) + " f=" + std::to_string(states[s].f);
  }
  return out;
}

StarChain build_Astar(TypeUniversePtr types, int num_letters, int degree,
                      const BuildLimits& limits) {
  WordAutomaton ab = trim_buchi(build_AB(types, num_letters));
  StarChain chain;
  chain.types = types;
  chain.num_letters = num_letters;
  chain.degree = degree;
  chain.ab_states = static_cast<std::size_t>(ab.num_states);
  chain.safra = std::make_shared<LazySafra>(ab, limits);
  return chain;
}

void StarChain::prepare() {
  std::vector<int> kept = safra->marked_names();
  star = std::make_shared<LazyStar>(safra, std::move(kept));
  if (star->num_pairs() > pair_bound())
    throw std::logic_error("star chain: pair bound exceeded");
}

bool star_word_accepts(TypeUniversePtr types, int num_letters, const SymbolicLasso& w,
                       const BuildLimits& limits) {
  StarChain chain = build_Astar(types, num_letters, 1, limits);
  // Discovery pass: walk the lasso far enough for the deterministic Safra
  // run to close its loop, so every live name shows up.
  {
    int s = chain.safra->initial();
    std::set<std::pair<std::size_t, int>> seen;
    std::size_t pos = 0;
    while (seen.insert({pos, s}).second) {
      const auto& sym = w.at(pos);
      s = chain.safra->succ(s, sym.letter, sym.type);
      pos = w.next(pos);
    }
  }
  chain.prepare();
  // Deterministic IAR run with exact acceptance over the loop.
  LazyStar& star = *chain.star;
  int s = star.initial();
  std::map<std::pair<std::size_t, int>, std::size_t> seen;
  std::vector<int> run;
  std::size_t pos = 0, step = 0;
  while (true) {
    auto it = seen.find({pos, s});
    if (it != seen.end()) {
      for (std::size_t p = 0; p < star.num_pairs(); ++p) {
        bool l = false, u = false;
        for (std::size_t i = it->second; i < step; ++i) {
          l = l || star.in_L(run[i], p);
          u = u || star.in_U(run[i], p);
        }
        if (l && !u) return true;
      }
      return false;
    }
    seen.emplace(std::make_pair(pos, s), step);
    run.push_back(s);
    const auto& sym = w.at(pos);
    s = star.succ(s, sym.letter, sym.type);
    pos = w.next(pos);
    ++step;
  }
}

// --- Finite Rabin tree automata -------------------------------------------

FiniteTreeAutomaton intersect_finite_rabin(const std::vector<FiniteTreeAutomaton>& as,
                                           const BuildLimits& limits) {
  if (as.empty()) throw std::invalid_argument("intersect_finite_rabin: empty family");
  const int n = static_cast<int>(as.size());
  const int D = as[0].degree;
  for (const auto& a : as)
    if (a.degree != D || a.num_letters != as[0].num_letters)
      throw std::invalid_argument("intersect_finite_rabin: alphabet/degree mismatch");
  if (n == 1) return as[0];

  std::vector<std::size_t> npairs;
  for (const auto& a : as) npairs.push_back(std::max<std::size_t>(a.pairs.size(), 1));
  std::size_t total_pairs = 1;
  for (auto k : npairs) total_pairs *= k;

  struct State {
    std::vector<int> qs;
    std::vector<std::uint8_t> f;  // one entry per pair tuple, values in [0, 2n)
  };
  auto encode = [](const State& s) {
    std::string k;
    for (int q : s.qs) k += std::to_string(q) + ",";
    k += "|";
    for (auto v : s.f) k += static_cast<char>('0' + v);
    return k;
  };
  std::map<std::string, int> id_of;
  std::vector<State> states;
  auto intern = [&](State s) {
    auto key = encode(s);
    auto it = id_of.find(key);
    if (it != id_of.end()) return it->second;
    int id = static_cast<int>(states.size());
    id_of.emplace(std::move(key), id);
    states.push_back(std::move(s));
    limits.check(states.size(), "intersect_finite_rabin");
    return id;
  };

  // Round-robin update for one child tuple.
  auto update_f = [&](const std::vector<std::uint8_t>& f, const std::vector<int>& child_qs) {
    std::vector<std::uint8_t> g(f.size());
    for (std::size_t ti = 0; ti < f.size(); ++ti) {
      // decode the pair tuple for index ti
      std::size_t rest = ti;
      std::vector<std::size_t> gamma(static_cast<std::size_t>(n));
      for (int k = n - 1; k >= 0; --k) {
        gamma[static_cast<std::size_t>(k)] = rest % npairs[static_cast<std::size_t>(k)];
        rest /= npairs[static_cast<std::size_t>(k)];
      }
      std::uint8_t v = f[ti];
      if (v % 2 == 1) {
        g[ti] = static_cast<std::uint8_t>((v + 1) % (2 * n));
      } else {
        int k = v / 2;  // waiting for L_k^{gamma_k}
        bool hit = false;
        const auto& a = as[static_cast<std::size_t>(k)];
        if (!a.pairs.empty())
          hit = a.pairs[gamma[static_cast<std::size_t>(k)]].L.test(
              static_cast<std::size_t>(child_qs[static_cast<std::size_t>(k)]));
        g[ti] = hit ? static_cast<std::uint8_t>(v + 1) : v;
      }
    }
    return g;
  };

  FiniteTreeAutomaton out;
  out.types = as[0].types;
  out.num_letters = as[0].num_letters;
  out.degree = D;

  std::vector<std::vector<std::vector<std::size_t>>> by_src;  // [k][q] -> transition ids
  for (const auto& a : as) {
    std::vector<std::vector<std::size_t>> by(static_cast<std::size_t>(a.num_states));
    for (std::size_t i = 0; i < a.transitions.size(); ++i)
      by[static_cast<std::size_t>(a.transitions[i].src)].push_back(i);
    by_src.push_back(std::move(by));
  }

  std::deque<int> work;
  // initial states: all combinations with the zero map
  {
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    while (true) {
      State s;
      bool ok = true;
      for (int k = 0; k < n; ++k) {
        const auto& inits = as[static_cast<std::size_t>(k)].initial;
        if (idx[static_cast<std::size_t>(k)] >= static_cast<int>(inits.size())) {
          ok = false;
          break;
        }
        s.qs.push_back(inits[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])]);
      }
      if (ok) {
        s.f.assign(total_pairs, 0);
        int id = intern(std::move(s));
        out.initial.push_back(id);
        work.push_back(id);
      }
      int k = n - 1;
      while (k >= 0) {
        ++idx[static_cast<std::size_t>(k)];
        if (idx[static_cast<std::size_t>(k)] <
            static_cast<int>(as[static_cast<std::size_t>(k)].initial.size()))
          break;
        idx[static_cast<std::size_t>(k)] = 0;
        --k;
      }
      if (k < 0) break;
    }
  }
  std::sort(out.initial.begin(), out.initial.end());
  out.initial.erase(std::unique(out.initial.begin(), out.initial.end()), out.initial.end());

  std::vector<bool> done;
  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    if (static_cast<std::size_t>(id) < done.size() && done[static_cast<std::size_t>(id)]) continue;
    if (done.size() <= static_cast<std::size_t>(id)) done.resize(static_cast<std::size_t>(id) + 1, false);
    done[static_cast<std::size_t>(id)] = true;
    State cur = states[static_cast<std::size_t>(id)];

    // joint transitions: same sym in every factor
    std::vector<std::vector<std::size_t>> options(static_cast<std::size_t>(n));
    auto join = [&](auto&& self, int k, std::vector<std::size_t>& picked) -> void {
      if (k == n) {
        const auto& sym0 = as[0].transitions[picked[0]].sym;
        std::vector<int> child_qs(static_cast<std::size_t>(n));
        FiniteTreeAutomaton::Transition t;
        t.src = id;
        t.sym = sym0;
        t.children.resize(static_cast<std::size_t>(D));
        for (int dir = 0; dir < D; ++dir) {
          for (int kk = 0; kk < n; ++kk)
            child_qs[static_cast<std::size_t>(kk)] =
                as[static_cast<std::size_t>(kk)].transitions[picked[static_cast<std::size_t>(kk)]]
                    .children[static_cast<std::size_t>(dir)];
          State child;
          child.qs = child_qs;
          child.f = update_f(cur.f, child_qs);
          int cid = intern(std::move(child));
          t.children[static_cast<std::size_t>(dir)] = cid;
          if (static_cast<std::size_t>(cid) >= done.size() || !done[static_cast<std::size_t>(cid)])
            work.push_back(cid);
        }
        out.transitions.push_back(std::move(t));
        return;
      }
      const auto& a = as[static_cast<std::size_t>(k)];
      for (std::size_t ti : by_src[static_cast<std::size_t>(k)][static_cast<std::size_t>(
               cur.qs[static_cast<std::size_t>(k)])]) {
        if (k > 0) {
          const auto& sym0 = as[0].transitions[picked[0]].sym;
          if (!(a.transitions[ti].sym == sym0)) continue;
        }
        picked.push_back(ti);
        self(self, k + 1, picked);
        picked.pop_back();
      }
    };
    std::vector<std::size_t> picked;
    join(join, 0, picked);
  }

  out.num_states = static_cast<int>(states.size());
  out.pairs.resize(total_pairs);
  for (auto& pr : out.pairs) {
    pr.L.resize(states.size());
    pr.U.resize(states.size());
  }
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (std::size_t ti = 0; ti < total_pairs; ++ti) {
      if (states[s].f[ti] == 1) out.pairs[ti].L.set(s);
      std::size_t rest = ti;
      for (int k = n - 1; k >= 0; --k) {
        std::size_t gk = rest % npairs[static_cast<std::size_t>(k)];
        rest /= npairs[static_cast<std::size_t>(k)];
        const auto& a = as[static_cast<std::size_t>(k)];
        if (!a.pairs.empty() &&
            a.pairs[gk].U.test(static_cast<std::size_t>(states[s].qs[static_cast<std::size_t>(k)])))
          out.pairs[ti].U.set(s);
      }
    }
  }
  out.state_names.resize(states.size());
  for (std::size_t s = 0; s < states.size(); ++s) {
    std::string nm = "(";
    for (int k = 0; k < n; ++k) {
      if (k) nm += ",";
      nm += std::to_string(states[s].qs[static_cast<std::size_t>(k)]);
    }
    out.state_names[s] = nm + ")";
  }
  return out;
}

// --- Constraint graph prefix ------------------------------------------------

GctGraph build_gct_prefix(const RegularSymbolicTree& t, int depth, bool with_virtual_root) {
  GctGraph g;
  g.beta = t.types->beta();
  const auto& ctx = t.types->ctx();
  const int beta = g.beta;

  // Unfold the machine into prefix nodes.
  struct Node {
    int state;
    int parent;  // -1 for root
    std::string name;
  };
  std::vector<Node> nodes;
  nodes.push_back({t.initial, -1, "eps"});
  std::size_t frontier_begin = 0;
  for (int d = 0; d < depth; ++d) {
    std::size_t end = nodes.size();
    for (std::size_t i = frontier_begin; i < end; ++i)
      for (int dir = 0; dir < t.degree; ++dir) {
        std::string nm = nodes[i].parent == -1 && nodes[i].name == "eps" ? "" : nodes[i].name;
        nodes.push_back({t.states[static_cast<std::size_t>(nodes[i].state)].succ[static_cast<std::size_t>(dir)],
                         static_cast<int>(i), nm + std::to_string(dir)});
      }
    frontier_begin = end;
  }
  for (const auto& nd : nodes) g.node_names.push_back(nd.name);

  // Elements: per node, beta variables + the two constant anchors; plus the
  // virtual parent's variables pinned to zero when requested.
  auto elem_id = [&](int node, int slot) {
    // slot: 0..beta-1, -1 (d1), -2 (dalpha)
    int per = beta + 2;
    int idx = slot >= 0 ? slot : (slot == TypeUniverse::kSlotD1 ? beta : beta + 1);
    return node * per + idx;
  };
  for (int nd = 0; nd < static_cast<int>(nodes.size()); ++nd) {
    for (int v = 0; v < beta; ++v) g.elements.push_back({nd, v});
    g.elements.push_back({nd, TypeUniverse::kSlotD1});
    g.elements.push_back({nd, TypeUniverse::kSlotDalpha});
  }
  int virtual_base = -1;
  if (with_virtual_root) {
    virtual_base = static_cast<int>(g.elements.size());
    for (int v = 0; v < beta; ++v) g.elements.push_back({-1, v});
  }

  // Regions: (P1)-(P4); variables take the region of their primed copy in
  // the node's own type, anchors are pinned.
  g.region.resize(g.elements.size());
  for (int nd = 0; nd < static_cast<int>(nodes.size()); ++nd) {
    const TypeConstraint& ty = t.types->get(
        t.states[static_cast<std::size_t>(nodes[static_cast<std::size_t>(nd)].state)].label.type);
    for (int v = 0; v < beta; ++v)
      g.region[static_cast<std::size_t>(elem_id(nd, v))] =
          ty.regions[static_cast<std::size_t>(beta + v)];
    g.region[static_cast<std::size_t>(elem_id(nd, TypeUniverse::kSlotD1))] = Region::exactly(ctx.d1());
    g.region[static_cast<std::size_t>(elem_id(nd, TypeUniverse::kSlotDalpha))] =
        Region::exactly(ctx.dalpha());
  }
  if (with_virtual_root)
    for (int v = 0; v < beta; ++v)
      g.region[static_cast<std::size_t>(virtual_base + v)] = Region::of(0, ctx);

  auto add_edge = [&](int a, Cmp c, int b) {
    if (c == Cmp::Gt) {
      std::swap(a, b);
      c = Cmp::Lt;
    }
    g.edges.push_back({a, b, c});
  };

  // (VAR) plus the region-derived mixed and (CONS) constant edges, between
  // neighbour nodes only.
  auto type_of_node = [&](int nd) {
    return t.states[static_cast<std::size_t>(nodes[static_cast<std::size_t>(nd)].state)].label.type;
  };
  auto relate_same_node = [&](int nd) {
    TypeId ty = type_of_node(nd);
    // primed-primed variable pairs
    for (int i = 0; i < beta; ++i)
      for (int j = i + 1; j < beta; ++j) {
        Cmp c = t.types->get(ty).rel_at(beta + i, beta + j);
        add_edge(elem_id(nd, i), c, elem_id(nd, j));
      }
    // variable vs anchors and anchor vs anchor, from regions
    std::vector<int> slots;
    for (int v = 0; v < beta; ++v) slots.push_back(v);
    slots.push_back(TypeUniverse::kSlotD1);
    slots.push_back(TypeUniverse::kSlotDalpha);
    for (std::size_t i = 0; i < slots.size(); ++i)
      for (std::size_t j = i + 1; j < slots.size(); ++j) {
        if (slots[i] >= 0 && slots[j] >= 0) continue;  // handled above
        const Region& ra = g.region[static_cast<std::size_t>(elem_id(nd, slots[i]))];
        const Region& rb = g.region[static_cast<std::size_t>(elem_id(nd, slots[j]))];
        if (auto c = ra.compare(rb)) add_edge(elem_id(nd, slots[i]), *c, elem_id(nd, slots[j]));
      }
  };
  auto relate_parent_child = [&](int pa, int ch) {
    TypeId ty = type_of_node(ch);
    const TypeConstraint& tc = t.types->get(ty);
    // unprimed (parent) vs primed (child) variables
    for (int i = 0; i < beta; ++i)
      for (int j = 0; j < beta; ++j) {
        Cmp c = tc.rel_at(i, beta + j);
        add_edge(elem_id(pa, i), c, elem_id(ch, j));
      }
    // cross-node constant/region comparisons for mixed and constant pairs
    std::vector<int> slots;
    for (int v = 0; v < beta; ++v) slots.push_back(v);
    slots.push_back(TypeUniverse::kSlotD1);
    slots.push_back(TypeUniverse::kSlotDalpha);
    for (int sa : slots)
      for (int sb : slots) {
        if (sa >= 0 && sb >= 0) continue;
        const Region& ra = g.region[static_cast<std::size_t>(elem_id(pa, sa))];
        const Region& rb = g.region[static_cast<std::size_t>(elem_id(ch, sb))];
        if (auto c = ra.compare(rb)) add_edge(elem_id(pa, sa), *c, elem_id(ch, sb));
      }
  };

  for (int nd = 0; nd < static_cast<int>(nodes.size()); ++nd) {
    relate_same_node(nd);
    int pa = nodes[static_cast<std::size_t>(nd)].parent;
    if (pa >= 0) relate_parent_child(pa, nd);
  }
  if (with_virtual_root) {
    // root type relates the virtual zero parent (unprimed) to the root.
    TypeId ty = type_of_node(0);
    const TypeConstraint& tc = t.types->get(ty);
    for (int i = 0; i < beta; ++i)
      for (int j = 0; j < beta; ++j)
        add_edge(virtual_base + i, tc.rel_at(i, beta + j), elem_id(0, j));
    for (int i = 0; i < beta; ++i)
      for (int j = i + 1; j < beta; ++j)
        add_edge(virtual_base + i, tc.rel_at(i, j), virtual_base + j);
  }
  return g;
}

std::string gct_to_dot(const GctGraph& g) {
  std::string out = "digraph gct {\n  rankdir=TB;\n";
  auto elem_name = [&](std::size_t i) {
    const auto& e = g.elements[i];
    std::string node = e.node < 0 ? "nu" : g.node_names[static_cast<std::size_t>(e.node)];
    if (node.empty()) node = "eps";
    std::string slot = e.slot >= 0 ? "x" + std::to_string(e.slot + 1)
                                   : (e.slot == TypeUniverse::kSlotD1 ? "d1" : "da");
    return "<" + node + "," + slot + ">";
  };
  for (std::size_t i = 0; i < g.elements.size(); ++i) {
    out += "  n" + std::to_string(i) + " [label=\"" + elem_name(i) + "\"";
    if (g.region[i].kind == Region::Exactly)
      out += ",style=filled,fillcolor=lightgray";
    out += "];\n";
  }
  for (const auto& e : g.edges) {
    out += "  n" + std::to_string(e.a) + " -> n" + std::to_string(e.b) + " [label=\"" +
           (e.cmp == Cmp::Lt ? "<" : "=") + "\"";
    if (e.cmp == Cmp::Eq) out += ",dir=none";
    out += "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace ztl
