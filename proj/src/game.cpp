#include "ztl/emptiness.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <deque>
#include <map>

namespace ztl {

// --- Zielonka on min-parity games --------------------------------------------

namespace {

// Attractor of `target` for player `even` within `alive`; fills strategy for
// the attracting player's vertices.
std::vector<bool> attractor(const ParityGame& g, const std::vector<bool>& alive,
                            std::vector<bool> target, bool even, std::vector<int>* strategy,
                            const std::vector<std::vector<int>>& preds,
                            const std::vector<int>& out_degree_alive) {
  const std::size_t n = g.vertices.size();
  std::vector<int> cnt = out_degree_alive;
  std::deque<int> work;
  for (std::size_t v = 0; v < n; ++v)
    if (target[v] && alive[v]) work.push_back(static_cast<int>(v));
  std::vector<bool> in = target;
  for (std::size_t v = 0; v < n; ++v) in[v] = in[v] && alive[v];
  while (!work.empty()) {
    int v = work.front();
    work.pop_front();
    for (int u : preds[static_cast<std::size_t>(v)]) {
      if (!alive[static_cast<std::size_t>(u)] || in[static_cast<std::size_t>(u)]) continue;
      bool u_even = g.vertices[static_cast<std::size_t>(u)].even_owns;
      if (u_even == even) {
        in[static_cast<std::size_t>(u)] = true;
        if (strategy && (*strategy)[static_cast<std::size_t>(u)] < 0)
          (*strategy)[static_cast<std::size_t>(u)] = v;
        work.push_back(u);
      } else {
        if (--cnt[static_cast<std::size_t>(u)] == 0) {
          in[static_cast<std::size_t>(u)] = true;
          work.push_back(u);
        }
      }
    }
  }
  return in;
}

void zielonka(const ParityGame& g, std::vector<bool>& alive, ParitySolution& sol,
              const std::vector<std::vector<int>>& preds) {
  // find the minimal priority among alive vertices
  int m = -1;
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (alive[v]) m = m < 0 ? g.vertices[v].priority : std::min(m, g.vertices[v].priority);
  if (m < 0) return;
  bool even = m % 2 == 0;

  std::vector<int> out_degree(g.vertices.size(), 0);
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (alive[v])
      for (int w : g.vertices[v].succ)
        if (alive[static_cast<std::size_t>(w)]) ++out_degree[v];

  std::vector<bool> target(g.vertices.size(), false);
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (alive[v] && g.vertices[v].priority == m) target[v] = true;

  std::vector<int> attr_strategy(g.vertices.size(), -1);
  std::vector<bool> a = attractor(g, alive, target, even, &attr_strategy, preds, out_degree);

  // recurse on the subgame without A
  std::vector<bool> sub = alive;
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (a[v]) sub[v] = false;
  ParitySolution inner;
  inner.even_wins.assign(g.vertices.size(), false);
  inner.strategy.assign(g.vertices.size(), -1);
  zielonka(g, sub, inner, preds);

  // W = vertices in the subgame won by the opponent of `even`
  std::vector<bool> opp_w(g.vertices.size(), false);
  bool opp_nonempty = false;
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (sub[v] && (inner.even_wins[v] != even)) {
      opp_w[v] = true;
      opp_nonempty = true;
    }
  if (!opp_nonempty) {
    // `even` wins everything alive
    for (std::size_t v = 0; v < g.vertices.size(); ++v)
      if (alive[v]) {
        sol.even_wins[v] = even;
        if (g.vertices[v].even_owns == even) {
          if (sub[v] && inner.strategy[v] >= 0)
            sol.strategy[v] = inner.strategy[v];
          else if (a[v] && attr_strategy[v] >= 0)
            sol.strategy[v] = attr_strategy[v];
          else {
            // vertex with priority m (or attracted frontier): any successor
            // inside the winning region works; prefer one inside `a` or alive
            for (int w : g.vertices[v].succ)
              if (alive[static_cast<std::size_t>(w)]) {
                sol.strategy[v] = w;
                break;
              }
          }
        }
      }
    return;
  }
  // opponent attracts to its winning set; recurse on the rest
  std::vector<int> opp_strategy(g.vertices.size(), -1);
  std::vector<bool> b = attractor(g, alive, opp_w, !even, &opp_strategy, preds, out_degree);
  std::vector<bool> rest = alive;
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (b[v]) rest[v] = false;
  ParitySolution outer;
  outer.even_wins.assign(g.vertices.size(), false);
  outer.strategy.assign(g.vertices.size(), -1);
  zielonka(g, rest, outer, preds);
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (!alive[v]) continue;
    if (rest[v]) {
      sol.even_wins[v] = outer.even_wins[v];
      sol.strategy[v] = outer.strategy[v];
    } else {
      // v in B: opponent of `even` wins
      sol.even_wins[v] = !even;
      if (g.vertices[v].even_owns != even) {
        if (opp_w[v] && inner.strategy[v] >= 0)
          sol.strategy[v] = inner.strategy[v];
        else if (opp_strategy[v] >= 0)
          sol.strategy[v] = opp_strategy[v];
        else
          for (int w : g.vertices[v].succ)
            if (alive[static_cast<std::size_t>(w)] && b[static_cast<std::size_t>(w)]) {
              sol.strategy[v] = w;
              break;
            }
      }
    }
  }
}

}  // namespace

ParitySolution solve_parity(const ParityGame& g) {
  ParitySolution sol;
  sol.even_wins.assign(g.vertices.size(), false);
  sol.strategy.assign(g.vertices.size(), -1);
  std::vector<std::vector<int>> preds(g.vertices.size());
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    for (int w : g.vertices[v].succ) preds[static_cast<std::size_t>(w)].push_back(static_cast<int>(v));
  std::vector<bool> alive(g.vertices.size(), true);
  zielonka(g, alive, sol, preds);
  return sol;
}

// Reference solver: enumerate Eve's positional strategies; for each, check
// whether Adam has a bad cycle. Exponential; small games only.
ParitySolution solve_parity_brute(const ParityGame& g) {
  const std::size_t n = g.vertices.size();
  if (n > 12) throw std::invalid_argument("solve_parity_brute: game too large");
  std::vector<int> eve_vertices;
  for (std::size_t v = 0; v < n; ++v)
    if (g.vertices[v].even_owns && !g.vertices[v].succ.empty())
      eve_vertices.push_back(static_cast<int>(v));

  ParitySolution sol;
  sol.even_wins.assign(n, false);
  sol.strategy.assign(n, -1);

  std::vector<std::size_t> pick(eve_vertices.size(), 0);
  std::vector<bool> win_any(n, false);
  std::vector<std::vector<int>> best_choice;

  while (true) {
    // induced graph: eve vertices follow pick, adam vertices keep all edges
    std::vector<std::vector<int>> adj(n);
    for (std::size_t v = 0; v < n; ++v) {
      if (g.vertices[v].even_owns) {
        auto it = std::find(eve_vertices.begin(), eve_vertices.end(), static_cast<int>(v));
        if (it != eve_vertices.end()) {
          std::size_t i = static_cast<std::size_t>(it - eve_vertices.begin());
          adj[v].push_back(g.vertices[v].succ[pick[i]]);
        }
      } else {
        adj[v] = g.vertices[v].succ;
      }
    }
    // Eve wins from v iff every cycle reachable from v has even min priority
    // and Adam can never reach a dead Eve vertex.
    // check each start vertex: DFS over adj, every reachable cycle analyzed
    for (std::size_t start = 0; start < n; ++start) {
      if (win_any[start]) continue;
      // reachable set
      std::vector<bool> reach(n, false);
      std::deque<int> work{static_cast<int>(start)};
      reach[start] = true;
      bool dead = false;
      while (!work.empty()) {
        int v = work.front();
        work.pop_front();
        if (adj[static_cast<std::size_t>(v)].empty()) {
          if (g.vertices[static_cast<std::size_t>(v)].even_owns) dead = true;
          // Adam dead-end: Adam stuck, fine for Eve
        }
        for (int w : adj[static_cast<std::size_t>(v)])
          if (!reach[static_cast<std::size_t>(w)]) {
            reach[static_cast<std::size_t>(w)] = true;
            work.push_back(w);
          }
      }
      if (dead) continue;
      // enumerate all simple cycles via DFS (tiny graphs)
      bool bad = false;
      std::vector<int> stack;
      std::vector<bool> on_stack(n, false);
      auto dfs = [&](auto&& self, int v) -> void {
        if (bad) return;
        for (int w : adj[static_cast<std::size_t>(v)]) {
          if (!reach[static_cast<std::size_t>(w)]) continue;
          auto it = std::find(stack.begin(), stack.end(), w);
          if (it != stack.end()) {
            int m = g.vertices[static_cast<std::size_t>(w)].priority;
            for (auto jt = it; jt != stack.end(); ++jt)
              m = std::min(m, g.vertices[static_cast<std::size_t>(*jt)].priority);
            if (m % 2 == 1) bad = true;
          } else if (!on_stack[static_cast<std::size_t>(w)]) {
            stack.push_back(w);
            on_stack[static_cast<std::size_t>(w)] = true;
            self(self, w);
            stack.pop_back();
            on_stack[static_cast<std::size_t>(w)] = false;
          }
        }
      };
      // Note: on_stack prevents revisiting only within one path; to cover all
      // cycles in tiny graphs, run DFS from every reachable vertex.
      for (std::size_t s2 = 0; s2 < n && !bad; ++s2) {
        if (!reach[s2]) continue;
        stack = {static_cast<int>(s2)};
        on_stack.assign(n, false);
        on_stack[s2] = true;
        dfs(dfs, static_cast<int>(s2));
      }
      if (!bad) win_any[start] = true;
    }
    // next strategy
    std::size_t k = 0;
    while (k < pick.size()) {
      ++pick[k];
      if (pick[k] < g.vertices[static_cast<std::size_t>(eve_vertices[k])].succ.size()) break;
      pick[k] = 0;
      ++k;
    }
    if (k == pick.size()) break;
    if (eve_vertices.empty()) break;
  }
  sol.even_wins = win_any;
  return sol;
}

// --- Rabin emptiness game over a lazy arena ----------------------------------

namespace {

struct GameBuild {
  ParityGame game;
  // vertex payloads
  struct SV {  // Eve: automaton state + record
    int state;
    int mem;
  };
  std::vector<SV> svs;                       // for S vertices
  std::vector<int> v_kind;                   // 0 = S, 1 = C(choice), 2 = D(direction)
  std::vector<std::pair<int, int>> c_info;   // (s_vertex, move index)
  std::vector<std::array<int, 3>> d_info;    // (s_vertex, move index, dir)
  std::map<std::pair<int, int>, int> s_id;   // (state, mem) -> vertex
  std::vector<std::vector<std::uint8_t>> mems;
  std::map<std::string, int> mem_id;
  std::vector<std::vector<ArenaMove>> moves_of;  // per S vertex
  int root = -1;
};

int intern_mem(GameBuild& b, std::vector<std::uint8_t> m) {
  std::string key(m.begin(), m.end());
  auto it = b.mem_id.find(key);
  if (it != b.mem_id.end()) return it->second;
  int id = static_cast<int>(b.mems.size());
  b.mem_id.emplace(std::move(key), id);
  b.mems.push_back(std::move(m));
  return id;
}

}  // namespace

EmptinessResult rabin_tree_emptiness(TreeArena& arena, TypeUniversePtr types,
                                     const BuildLimits& limits, std::size_t arena_cap) {
  const std::size_t NP = arena.num_pairs();
  const int M = static_cast<int>(NP) + 1;  // sentinel (Q,Q) pair appended
  GameBuild b;

  // IAR record: permutation of [0..M-1] (pair indices, M-1 = sentinel).
  std::vector<std::uint8_t> id_perm(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) id_perm[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
  int mem0 = intern_mem(b, id_perm);

  auto in_L = [&](int state, int idx0) {
    return idx0 == M - 1 || arena.in_L(state, static_cast<std::size_t>(idx0));
  };
  auto in_U = [&](int state, int idx0) {
    return idx0 == M - 1 || arena.in_U(state, static_cast<std::size_t>(idx0));
  };

  // Build the reachable arena.
  std::deque<int> work;
  auto new_vertex = [&](bool eve, int prio) {
    b.game.vertices.push_back({eve, prio, {}});
    limits.check(b.game.vertices.size(), "emptiness game");
    return static_cast<int>(b.game.vertices.size()) - 1;
  };
  auto s_vertex = [&](int state, int mem) {
    auto key = std::make_pair(state, mem);
    auto it = b.s_id.find(key);
    if (it != b.s_id.end()) return it->second;
    // priority from the record BEFORE processing; evaluating (e, f) against
    // the permutation and emitting the Rabin-IAR parity value
    const auto& sigma = b.mems[static_cast<std::size_t>(mem)];
    int e = M, f = M;
    for (int i = 0; i < M; ++i)
      if (in_U(state, sigma[static_cast<std::size_t>(i)])) {
        e = i + 1;
        break;
      }
    for (int i = 0; i < M; ++i)
      if (in_L(state, sigma[static_cast<std::size_t>(i)])) {
        f = i + 1;
        break;
      }
    int prio = f < e ? 2 * f : 2 * e + 1;
    int v = new_vertex(true, prio);
    b.s_id.emplace(key, v);
    b.svs.resize(b.game.vertices.size());
    b.svs[static_cast<std::size_t>(v)] = {state, mem};
    b.v_kind.resize(b.game.vertices.size(), 0);
    b.v_kind[static_cast<std::size_t>(v)] = 0;
    work.push_back(v);
    return v;
  };

  std::vector<int> init_vertices;
  for (int s0 : arena.initials()) init_vertices.push_back(s_vertex(s0, mem0));
  if (init_vertices.empty()) {
    EmptinessResult r;
    r.nonempty = false;
    return r;
  }
  // super root, Eve picks the initial state
  int neutral = 2 * M + 3;
  int root = new_vertex(true, neutral);
  b.v_kind.resize(b.game.vertices.size(), -1);
  b.svs.resize(b.game.vertices.size());
  b.root = root;
  for (int v : init_vertices) b.game.vertices[static_cast<std::size_t>(root)].succ.push_back(v);

  b.moves_of.resize(b.game.vertices.size());
  bool complete = true;
  std::size_t expanded = 0;
  while (!work.empty()) {
    int v = work.front();
    work.pop_front();
    if (++expanded > arena_cap) {
      complete = false;
      break;  // remaining frontier vertices stay unexpanded and lose
    }
    int state = b.svs[static_cast<std::size_t>(v)].state;
    int mem = b.svs[static_cast<std::size_t>(v)].mem;
    // successor record sigma' after processing `state`
    std::vector<std::uint8_t> sigma = b.mems[static_cast<std::size_t>(mem)];
    int e = M;
    for (int i = 0; i < M; ++i)
      if (in_U(state, sigma[static_cast<std::size_t>(i)])) {
        e = i + 1;
        break;
      }
    std::uint8_t moved = sigma[static_cast<std::size_t>(e - 1)];
    sigma.erase(sigma.begin() + (e - 1));
    sigma.push_back(moved);
    int mem2 = intern_mem(b, std::move(sigma));

    auto moves = arena.moves(state);
    if (b.moves_of.size() <= static_cast<std::size_t>(v)) b.moves_of.resize(b.game.vertices.size());
    b.moves_of[static_cast<std::size_t>(v)] = moves;
    for (std::size_t mi = 0; mi < moves.size(); ++mi) {
      const auto& mv = moves[mi];
      bool legal = static_cast<int>(mv.cand.size()) == arena.degree();
      for (const auto& lst : mv.cand) legal = legal && !lst.empty();
      if (!legal) continue;
      int cv = new_vertex(false, neutral);
      b.v_kind.resize(b.game.vertices.size(), 1);
      b.v_kind[static_cast<std::size_t>(cv)] = 1;
      b.c_info.resize(b.game.vertices.size());
      b.c_info[static_cast<std::size_t>(cv)] = {v, static_cast<int>(mi)};
      b.svs.resize(b.game.vertices.size());
      b.moves_of.resize(b.game.vertices.size());
      b.game.vertices[static_cast<std::size_t>(v)].succ.push_back(cv);
      for (int dir = 0; dir < arena.degree(); ++dir) {
        int dv = new_vertex(true, neutral);
        b.v_kind.resize(b.game.vertices.size(), 2);
        b.v_kind[static_cast<std::size_t>(dv)] = 2;
        b.d_info.resize(b.game.vertices.size());
        b.d_info[static_cast<std::size_t>(dv)] = {v, static_cast<int>(mi), dir};
        b.svs.resize(b.game.vertices.size());
        b.moves_of.resize(b.game.vertices.size());
        b.game.vertices[static_cast<std::size_t>(cv)].succ.push_back(dv);
        for (int child : mv.cand[static_cast<std::size_t>(dir)]) {
          int sv = s_vertex(child, mem2);
          b.game.vertices[static_cast<std::size_t>(dv)].succ.push_back(sv);
        }
      }
    }
    // Eve loses at states with no legal move: leave succ empty (dead Eve
    // vertex is losing in the parity solver by convention below).
  }

  // Dead Eve vertices lose; give them a self-loop with odd priority.
  for (std::size_t v = 0; v < b.game.vertices.size(); ++v)
    if (b.game.vertices[v].succ.empty()) {
      bool eve = b.game.vertices[v].even_owns;
      b.game.vertices[v].priority = eve ? 2 * M + 5 : 2 * M + 4;  // odd loses for Eve owner
      b.game.vertices[v].succ.push_back(static_cast<int>(v));
      // Adam dead vertex: even self-loop priority means Eve wins there.
    }

  ParitySolution sol = solve_parity(b.game);
  EmptinessResult res;
  res.arena_vertices = b.game.vertices.size();
  res.memory_values = b.mems.size();
  res.complete = complete;
  res.nonempty = sol.even_wins[static_cast<std::size_t>(b.root)];
  if (!res.nonempty) return res;

  // Extract the witness machine from Eve's strategy.
  RegularSymbolicTree& wt = res.witness;
  wt.types = types;
  wt.degree = arena.degree();
  std::map<int, int> state_of_vertex;  // S vertex -> machine state
  std::deque<int> frontier;
  auto machine_state = [&](int sv) {
    auto it = state_of_vertex.find(sv);
    if (it != state_of_vertex.end()) return it->second;
    int id = static_cast<int>(wt.states.size());
    state_of_vertex.emplace(sv, id);
    wt.states.push_back({});
    wt.states[static_cast<std::size_t>(id)].succ.assign(static_cast<std::size_t>(arena.degree()), -1);
    frontier.push_back(sv);
    return id;
  };
  int first = sol.strategy[static_cast<std::size_t>(b.root)];
  assert(first >= 0);
  wt.initial = machine_state(first);
  while (!frontier.empty()) {
    int sv = frontier.front();
    frontier.pop_front();
    int mid = state_of_vertex.at(sv);
    int cv = sol.strategy[static_cast<std::size_t>(sv)];
    assert(cv >= 0 && b.v_kind[static_cast<std::size_t>(cv)] == 1);
    auto [sows, mi] = b.c_info[static_cast<std::size_t>(cv)];
    const ArenaMove& mv = b.moves_of[static_cast<std::size_t>(sows)][static_cast<std::size_t>(mi)];
    wt.states[static_cast<std::size_t>(mid)].label = mv.sym;
    for (int dv : b.game.vertices[static_cast<std::size_t>(cv)].succ) {
      int dir = b.d_info[static_cast<std::size_t>(dv)][2];
      int child_sv = sol.strategy[static_cast<std::size_t>(dv)];
      assert(child_sv >= 0 && b.v_kind[static_cast<std::size_t>(child_sv)] == 0);
      wt.states[static_cast<std::size_t>(mid)].succ[static_cast<std::size_t>(dir)] =
          machine_state(child_sv);
    }
  }
  return res;
}

}  // namespace ztl
