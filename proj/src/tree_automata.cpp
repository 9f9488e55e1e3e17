#include "ztl/tree_automata.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <set>

namespace ztl {

void Tca::add_transition(int src, int letter, const std::vector<std::pair<Constraint, int>>& arms) {
  Move mv;
  mv.letter = letter;
  for (const auto& [g, target] : arms) {
    int gid = add_guard(g);
    mv.cand.push_back({{gid, target}});
  }
  if (static_cast<int>(mv.cand.size()) != degree)
    throw std::invalid_argument("add_transition: arity mismatch");
  moves[static_cast<std::size_t>(src)].push_back(std::move(mv));
}

std::size_t Tca::move_count() const {
  std::size_t total = 0;
  for (const auto& ms : moves)
    for (const auto& mv : ms) {
      std::size_t combos = 1;
      for (const auto& lst : mv.cand) combos *= lst.size();
      total += combos;
    }
  return total;
}

namespace {
std::size_t constraint_size(const Constraint& c) {
  switch (c.kind) {
    case Constraint::True:
    case Constraint::False: return 1;
    case Constraint::Atom: return 3;
    default: {
      std::size_t s = 1;
      for (const auto& k : c.kids) s += constraint_size(k);
      return s;
    }
  }
}
}  // namespace

std::size_t Tca::max_constraint_size() const {
  std::size_t m = 0;
  for (const auto& g : guard_pool) m = std::max(m, constraint_size(g));
  return m;
}

// --- Degeneralization ---------------------------------------------------------

Tca degeneralize_gtca(const Tca& a) {
  if (a.acc.kind != Acceptance::GenBuchi) return a;
  const std::size_t k = a.acc.sets.size();
  Tca out = a;
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
  out = Tca{};
  out.types = a.types;
  out.letters = a.letters;
  out.degree = a.degree;
  out.num_states = copies * a.num_states;
  out.guard_pool = a.guard_pool;
  for (int q : a.initial) out.initial.push_back(nid(0, q));
  out.moves.resize(static_cast<std::size_t>(out.num_states));
  for (int q = 0; q < a.num_states; ++q)
    for (const auto& mv : a.moves[static_cast<std::size_t>(q)])
      for (int c = 0; c < copies; ++c) {
        Tca::Move m2;
        m2.letter = mv.letter;
        m2.cand.resize(mv.cand.size());
        for (std::size_t dir = 0; dir < mv.cand.size(); ++dir)
          for (const auto& [gid, target] : mv.cand[dir])
            m2.cand[dir].push_back({gid, nid(next_copy(c, target), target)});
        out.moves[static_cast<std::size_t>(nid(c, q))].push_back(std::move(m2));
      }
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

// --- Intersection --------------------------------------------------------------

Tca intersect_rabin_tca(const std::vector<Tca>& as, const BuildLimits& limits) {
  if (as.empty()) throw std::invalid_argument("intersect_rabin_tca: empty family");
  const int n = static_cast<int>(as.size());
  const int D = as[0].degree;
  for (const auto& a : as) {
    if (a.degree != D || a.letters.size() != as[0].letters.size())
      throw std::invalid_argument("intersect_rabin_tca: alphabet or degree mismatch");
    if (a.acc.kind != Acceptance::Rabin && a.acc.kind != Acceptance::Buchi)
      throw std::invalid_argument("intersect_rabin_tca: Buchi or Rabin factors required");
  }
  if (n == 1) return as[0];

  auto pairs_of = [&](const Tca& a) -> std::size_t {
    return a.acc.kind == Acceptance::Buchi ? 1 : a.acc.pairs.size();
  };
  auto in_L = [&](const Tca& a, int q, std::size_t g) {
    return a.acc.kind == Acceptance::Buchi ? a.acc.sets[0].test(static_cast<std::size_t>(q))
                                           : a.acc.pairs[g].L.test(static_cast<std::size_t>(q));
  };
  auto in_U = [&](const Tca& a, int q, std::size_t g) {
    return a.acc.kind == Acceptance::Buchi ? false
                                           : a.acc.pairs[g].U.test(static_cast<std::size_t>(q));
  };

  std::vector<std::size_t> npairs;
  for (const auto& a : as) npairs.push_back(std::max<std::size_t>(pairs_of(a), 1));
  std::size_t total_pairs = 1;
  for (auto x : npairs) total_pairs *= x;

  struct State {
    std::vector<int> qs;
    std::vector<std::uint8_t> f;
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
    limits.check(states.size(), "intersect_rabin_tca");
    return id;
  };
  auto update_f = [&](const std::vector<std::uint8_t>& f, const std::vector<int>& child_qs) {
    std::vector<std::uint8_t> g(f.size());
    for (std::size_t ti = 0; ti < f.size(); ++ti) {
      std::uint8_t v = f[ti];
      if (v % 2 == 1) {
        g[ti] = static_cast<std::uint8_t>((v + 1) % (2 * n));
        continue;
      }
      int kf = v / 2;
      std::size_t rest = ti, gk = 0;
      for (int j = n - 1; j >= 0; --j) {
        std::size_t d = rest % npairs[static_cast<std::size_t>(j)];
        rest /= npairs[static_cast<std::size_t>(j)];
        if (j == kf) gk = d;
      }
      bool hit = in_L(as[static_cast<std::size_t>(kf)], child_qs[static_cast<std::size_t>(kf)], gk);
      g[ti] = hit ? static_cast<std::uint8_t>(v + 1) : v;
    }
    return g;
  };

  Tca out;
  out.types = as[0].types;
  out.letters = as[0].letters;
  out.degree = D;

  std::deque<int> work;
  {
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    bool done = false;
    while (!done) {
      State s;
      for (int kf = 0; kf < n; ++kf)
        s.qs.push_back(as[static_cast<std::size_t>(kf)].initial[idx[static_cast<std::size_t>(kf)]]);
      s.f.assign(total_pairs, 0);
      int id = intern(std::move(s));
      out.initial.push_back(id);
      work.push_back(id);
      done = true;
      for (std::size_t kf = static_cast<std::size_t>(n); kf-- > 0;) {
        if (++idx[kf] < as[kf].initial.size()) {
          done = false;
          break;
        }
        idx[kf] = 0;
      }
    }
  }
  std::sort(out.initial.begin(), out.initial.end());
  out.initial.erase(std::unique(out.initial.begin(), out.initial.end()), out.initial.end());

  std::vector<bool> expanded;
  out.moves.resize(states.size());
  std::map<std::string, int> guard_ids;
  auto conj_guard = [&](const std::vector<int>& gids) {
    std::string key;
    for (std::size_t kf = 0; kf < gids.size(); ++kf)
      key += std::to_string(kf) + ":" + std::to_string(gids[kf]) + ";";
    auto it = guard_ids.find(key);
    if (it != guard_ids.end()) return it->second;
    std::vector<Constraint> parts;
    for (std::size_t kf = 0; kf < gids.size(); ++kf)
      parts.push_back(as[kf].guard_pool[static_cast<std::size_t>(gids[kf])]);
    int gid = out.add_guard(Constraint::conj(std::move(parts)));
    guard_ids.emplace(key, gid);
    return gid;
  };

  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    if (static_cast<std::size_t>(id) < expanded.size() && expanded[static_cast<std::size_t>(id)])
      continue;
    if (expanded.size() <= static_cast<std::size_t>(id))
      expanded.resize(static_cast<std::size_t>(id) + 1, false);
    expanded[static_cast<std::size_t>(id)] = true;
    State cur = states[static_cast<std::size_t>(id)];

    // joint moves: one move per factor, same letter
    std::vector<std::vector<const Tca::Move*>> opts(static_cast<std::size_t>(n));
    for (int letter = 0; letter < static_cast<int>(out.letters.size()); ++letter) {
      bool dead = false;
      for (int kf = 0; kf < n && !dead; ++kf) {
        opts[static_cast<std::size_t>(kf)].clear();
        for (const auto& mv :
             as[static_cast<std::size_t>(kf)].moves[static_cast<std::size_t>(cur.qs[static_cast<std::size_t>(kf)])])
          if (mv.letter == letter) opts[static_cast<std::size_t>(kf)].push_back(&mv);
        dead = opts[static_cast<std::size_t>(kf)].empty();
      }
      if (dead) continue;
      std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
      bool done = false;
      while (!done) {
        // explicit tuples only: every factor arm must be a singleton list;
        // general factored moves expand to their combinations
        Tca::Move m2;
        m2.letter = letter;
        m2.cand.assign(static_cast<std::size_t>(D), {});
        // per direction, the candidate combinations across factors
        bool legal = true;
        for (int dir = 0; dir < D && legal; ++dir) {
          std::vector<std::size_t> ci(static_cast<std::size_t>(n), 0);
          bool cdone = false;
          while (!cdone) {
            std::vector<int> gids, targets;
            for (int kf = 0; kf < n; ++kf) {
              const auto& lst =
                  opts[static_cast<std::size_t>(kf)][pick[static_cast<std::size_t>(kf)]]->cand[static_cast<std::size_t>(dir)];
              const auto& [gid, target] = lst[ci[static_cast<std::size_t>(kf)]];
              gids.push_back(gid);
              targets.push_back(target);
            }
            State child;
            child.qs = targets;
            child.f = update_f(cur.f, targets);
            int cid = intern(std::move(child));
            if (out.moves.size() < states.size()) out.moves.resize(states.size());
            if (expanded.size() <= static_cast<std::size_t>(cid) ||
                !expanded[static_cast<std::size_t>(cid)])
              work.push_back(cid);
            m2.cand[static_cast<std::size_t>(dir)].push_back({conj_guard(gids), cid});
            cdone = true;
            for (std::size_t kf = static_cast<std::size_t>(n); kf-- > 0;) {
              const auto& lst = opts[kf][pick[kf]]->cand[static_cast<std::size_t>(dir)];
              if (++ci[kf] < lst.size()) {
                cdone = false;
                break;
              }
              ci[kf] = 0;
            }
          }
          legal = !m2.cand[static_cast<std::size_t>(dir)].empty();
        }
        if (legal) {
          if (out.moves.size() < states.size()) out.moves.resize(states.size());
          out.moves[static_cast<std::size_t>(id)].push_back(std::move(m2));
        }
        done = true;
        for (std::size_t kf = static_cast<std::size_t>(n); kf-- > 0;) {
          if (++pick[kf] < opts[kf].size()) {
            done = false;
            break;
          }
          pick[kf] = 0;
        }
      }
    }
  }

  out.num_states = static_cast<int>(states.size());
  out.moves.resize(states.size());
  out.acc.kind = Acceptance::Rabin;
  out.acc.pairs.resize(total_pairs);
  for (auto& pr : out.acc.pairs) {
    pr.L.resize(states.size());
    pr.U.resize(states.size());
  }
  for (std::size_t s = 0; s < states.size(); ++s)
    for (std::size_t ti = 0; ti < total_pairs; ++ti) {
      if (states[s].f[ti] == 1) out.acc.pairs[ti].L.set(s);
      std::size_t rest = ti;
      for (int kf = n - 1; kf >= 0; --kf) {
        std::size_t gk = rest % npairs[static_cast<std::size_t>(kf)];
        rest /= npairs[static_cast<std::size_t>(kf)];
        if (in_U(as[static_cast<std::size_t>(kf)], states[s].qs[static_cast<std::size_t>(kf)], gk))
          out.acc.pairs[ti].U.set(s);
      }
    }
  return out;
}

// --- CTL(Z) -> GTCA -------------------------------------------------------------

Tca ctl_to_gtca(const FormulaPtr& phi, const DirectionMap& iota, TypeUniversePtr types,
                const BuildLimits& limits) {
  if (!is_simple_form(phi))
    throw std::invalid_argument("ctl_to_gtca: formula not in simple form");
  Closure cl = closure(phi, LogicTag::Ctl);
  const std::size_t nc = cl.size();
  if (nc > 24) throw LimitError("ctl_to_gtca: closure too large");
  const int D = iota.degree();
  const int degree = D + 1;

  // all propositionally consistent subsets
  std::vector<Bitset> consistent;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nc); ++mask) {
    Bitset xs(nc);
    for (std::size_t i = 0; i < nc; ++i)
      if ((mask >> i) & 1) xs.set(i);
    if (propositionally_consistent(cl, xs, LogicTag::Ctl)) consistent.push_back(xs);
    limits.check(consistent.size(), "ctl_to_gtca");
  }

  // location = (incoming direction, X); reachable subsets only
  struct Loc {
    int dir;
    std::size_t set_index;
  };
  std::map<std::pair<int, std::size_t>, int> id_of;
  std::vector<Loc> locs;
  auto intern = [&](int dir, std::size_t si) {
    auto key = std::make_pair(dir, si);
    auto it = id_of.find(key);
    if (it != id_of.end()) return it->second;
    int id = static_cast<int>(locs.size());
    id_of.emplace(key, id);
    locs.push_back({dir, si});
    limits.check(locs.size(), "ctl_to_gtca");
    return id;
  };

  Tca out;
  out.types = std::move(types);
  out.degree = degree;

  int phi_idx = cl.find(phi);
  std::deque<int> work;
  for (std::size_t si = 0; si < consistent.size(); ++si)
    if (consistent[si].test(static_cast<std::size_t>(phi_idx))) {
      int id = intern(0, si);
      out.initial.push_back(id);
      work.push_back(id);
    }

  // per direction j in [0..D]: cores and guards from X
  auto ax_core = [&](const Bitset& xs) {
    Bitset core(nc);
    xs.for_each([&](std::size_t i) {
      const FormulaPtr& f = cl.items[i];
      if (f->kind == Formula::Forall && f->a->kind == Formula::Next) {
        int j = cl.find(f->a->a);
        assert(j >= 0);
        core.set(static_cast<std::size_t>(j));
      }
    });
    return core;
  };

  std::vector<bool> expanded;
  std::map<std::string, int> guard_cache;
  auto guard_id = [&](Constraint c) {
    std::string key = to_string(c);
    auto it = guard_cache.find(key);
    if (it != guard_cache.end()) return it->second;
    int gid = out.add_guard(std::move(c));
    guard_cache.emplace(std::move(key), gid);
    return gid;
  };

  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    if (static_cast<std::size_t>(id) < expanded.size() && expanded[static_cast<std::size_t>(id)])
      continue;
    if (expanded.size() <= static_cast<std::size_t>(id))
      expanded.resize(static_cast<std::size_t>(id) + 1, false);
    expanded[static_cast<std::size_t>(id)] = true;
    Loc cur = locs[static_cast<std::size_t>(id)];
    const Bitset& xs = consistent[cur.set_index];

    // universal constraint conjunct
    std::vector<Constraint> univ;
    xs.for_each([&](std::size_t i) {
      const FormulaPtr& f = cl.items[i];
      if (f->kind == Formula::Forall && f->a->kind == Formula::Leaf)
        univ.push_back(to_constraint(f->a->cons));
    });

    Tca::Move mv;
    mv.letter = 0;
    mv.cand.assign(static_cast<std::size_t>(degree), {});
    bool legal = true;
    for (int dir = 0; dir <= D && legal; ++dir) {
      // guard for this direction
      std::vector<Constraint> parts = univ;
      xs.for_each([&](std::size_t i) {
        const FormulaPtr& f = cl.items[i];
        if (f->kind == Formula::Exists && f->a->kind == Formula::Leaf &&
            iota.direction(f) == dir)
          parts.push_back(to_constraint(f->a->cons));
      });
      int gid = guard_id(Constraint::conj(std::move(parts)));
      // forced subformulas for this direction
      Bitset core = ax_core(xs);
      xs.for_each([&](std::size_t i) {
        const FormulaPtr& f = cl.items[i];
        if (f->kind == Formula::Exists && f->a->kind == Formula::Next &&
            iota.direction(f) == dir) {
          int j = cl.find(f->a->a);
          assert(j >= 0);
          core.set(static_cast<std::size_t>(j));
        }
      });
      for (std::size_t si = 0; si < consistent.size(); ++si) {
        if (!consistent[si].contains(core)) continue;
        int tid = intern(dir, si);
        mv.cand[static_cast<std::size_t>(dir)].push_back({gid, tid});
        if (expanded.size() <= static_cast<std::size_t>(tid) ||
            !expanded[static_cast<std::size_t>(tid)])
          work.push_back(tid);
      }
      legal = !mv.cand[static_cast<std::size_t>(dir)].empty();
    }
    if (out.moves.size() < locs.size()) out.moves.resize(locs.size());
    if (legal) out.moves[static_cast<std::size_t>(id)].push_back(std::move(mv));
  }

  out.num_states = static_cast<int>(locs.size());
  out.moves.resize(locs.size());
  out.acc.kind = Acceptance::GenBuchi;
  for (std::size_t i = 0; i < nc; ++i) {
    const FormulaPtr& f = cl.items[i];
    if (f->kind != Formula::Exists && f->kind != Formula::Forall) continue;
    if (f->a->kind != Formula::Until) continue;
    bool existential = f->kind == Formula::Exists;
    FormulaPtr expand = make_unary(f->kind, make_unary(Formula::Next, f));
    int designated = existential ? iota.direction(expand) : -1;
    int b_idx = cl.find(f->a->b);
    Bitset fs(locs.size());
    for (std::size_t s = 0; s < locs.size(); ++s) {
      const Bitset& xs = consistent[locs[s].set_index];
      bool sat = xs.test(static_cast<std::size_t>(b_idx)) || !xs.test(i);
      if (existential) sat = sat || locs[s].dir != designated;
      if (sat) fs.set(s);
    }
    out.acc.sets.push_back(std::move(fs));
  }
  out.state_names.resize(locs.size());
  for (std::size_t s = 0; s < locs.size(); ++s) {
    std::string nm = "<" + std::to_string(locs[s].dir) + ",{";
    bool first = true;
    consistent[locs[s].set_index].for_each([&](std::size_t i) {
      if (!first) nm += ", ";
      first = false;
      nm += to_string(cl.items[i]);
    });
    out.state_names[s] = nm + "}>";
  }
  return out;
}

// --- CTL*(Z) component automata --------------------------------------------------

Tca build_A0(TypeUniversePtr types, int degree) {
  Tca out;
  out.types = std::move(types);
  out.degree = degree;
  out.num_states = 2;
  out.initial = {0};
  out.moves.resize(2);
  Constraint x1_zero =
      Constraint::make_atom(AtomicConstraint::term_const(Term{1, 0}, Cmp::Eq, 0));
  std::vector<std::pair<Constraint, int>> arms;
  arms.push_back({x1_zero, 1});
  for (int d = 1; d < degree; ++d) arms.push_back({Constraint::tru(), 1});
  out.add_transition(0, 0, arms);
  std::vector<std::pair<Constraint, int>> loop;
  for (int d = 0; d < degree; ++d) loop.push_back({Constraint::tru(), 1});
  out.add_transition(1, 0, loop);
  out.acc.kind = Acceptance::Buchi;
  Bitset f(2);
  f.set(1);
  out.acc.sets = {f};
  out.state_names = {"q", "q'"};
  return out;
}

Tca build_AGE(const FormulaPtr& phi, int direction, int degree, TypeUniversePtr types,
              const BuildLimits& limits) {
  if (direction < 1 || direction >= degree)
    throw std::invalid_argument("build_AGE: direction out of range");
  WordAutomaton w = degeneralize_word(ltl_to_gbwca(phi, types, limits));
  const int Q = w.num_states;
  auto by_src = w.transitions_by_src();

  // locations: (incoming direction, word state or bottom); bottom = Q
  Tca out;
  out.types = types;
  out.degree = degree;
  out.num_states = degree * (Q + 1);
  auto nid = [&](int dir, int q) { return dir * (Q + 1) + q; };
  out.initial = {nid(0, Q)};
  out.moves.resize(static_cast<std::size_t>(out.num_states));

  int top_guard = out.add_guard(Constraint::tru());
  std::map<std::string, int> guard_cache;
  auto gid_of = [&](const Guard& g) {
    const Constraint& c = std::get<Constraint>(g);
    std::string key = to_string(c);
    auto it = guard_cache.find(key);
    if (it != guard_cache.end()) return it->second;
    int gid = out.add_guard(c);
    guard_cache.emplace(std::move(key), gid);
    return gid;
  };

  for (int dir = 0; dir < degree; ++dir)
    for (int q = 0; q <= Q; ++q) {
      Tca::Move mv;
      mv.letter = 0;
      mv.cand.assign(static_cast<std::size_t>(degree), {});
      // child `direction`: fresh copies of the word automaton
      for (int q0 : w.initial)
        for (std::size_t ti : by_src[static_cast<std::size_t>(q0)]) {
          const auto& t = w.transitions[ti];
          mv.cand[static_cast<std::size_t>(direction)].push_back({gid_of(t.guard), nid(direction, t.dst)});
        }
      // child 0: continuation (or bottom)
      if (q == Q) {
        mv.cand[0].push_back({top_guard, nid(0, Q)});
      } else {
        for (std::size_t ti : by_src[static_cast<std::size_t>(q)]) {
          const auto& t = w.transitions[ti];
          mv.cand[0].push_back({gid_of(t.guard), nid(0, t.dst)});
        }
      }
      // other children: bottom
      for (int d = 0; d < degree; ++d) {
        if (d == 0 || d == direction) continue;
        mv.cand[static_cast<std::size_t>(d)].push_back({top_guard, nid(d, Q)});
      }
      bool legal = true;
      for (const auto& lst : mv.cand) legal = legal && !lst.empty();
      if (legal) out.moves[static_cast<std::size_t>(nid(dir, q))].push_back(std::move(mv));
    }

  out.acc.kind = Acceptance::Buchi;
  Bitset f(static_cast<std::size_t>(out.num_states));
  for (int dir = 0; dir < degree; ++dir)
    for (int q = 0; q <= Q; ++q)
      if (dir != 0 || q == Q || w.acc.sets[0].test(static_cast<std::size_t>(q)))
        f.set(static_cast<std::size_t>(nid(dir, q)));
  // bottom states on direction 0 carry no obligation either
  out.acc.sets = {f};
  return out;
}

ApathAutomaton build_Apath(const FormulaPtr& phi, int degree, TypeUniversePtr types,
                           const BuildLimits& limits) {
  WordAutomaton w = normalize_to_types(degeneralize_word(ltl_to_gbwca(phi, types, limits)));
  ApathAutomaton out;
  out.word_states = static_cast<std::size_t>(w.num_states);
  out.degree = degree;
  std::vector<SafraTree> trees;
  ClassedDetAutomaton det = safra_determinize_classed(w, limits, &trees);
  // prune Rabin pairs that are vacuous on the reachable automaton
  Bitset live(det.pair_count);
  for (int s = 0; s < det.num_states; ++s) live |= det.state_L[static_cast<std::size_t>(s)];
  std::vector<std::size_t> kept;
  for (std::size_t p = 0; p < det.pair_count; ++p)
    if (live.test(p)) kept.push_back(p);
  ClassedDetAutomaton pruned = det;
  pruned.pair_count = kept.size();
  for (int s = 0; s < det.num_states; ++s) {
    Bitset l(kept.size()), u(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (det.state_L[static_cast<std::size_t>(s)].test(kept[i])) l.set(i);
      if (det.state_U[static_cast<std::size_t>(s)].test(kept[i])) u.set(i);
    }
    pruned.state_L[static_cast<std::size_t>(s)] = std::move(l);
    pruned.state_U[static_cast<std::size_t>(s)] = std::move(u);
  }
  out.det = std::move(pruned);
  return out;
}

Tca apath_to_tca(const ApathAutomaton& a) {
  Tca out;
  out.types = a.det.types;
  out.degree = a.degree;
  out.num_states = a.det.num_states;
  out.initial = {a.det.initial};
  out.moves.resize(static_cast<std::size_t>(out.num_states));
  // one factored move per state: per direction, all (type, successor) arms
  std::vector<int> type_guard(out.types->all().size(), -1);
  for (int q = 0; q < out.num_states; ++q) {
    Tca::Move mv;
    mv.letter = 0;
    mv.cand.assign(static_cast<std::size_t>(a.degree), {});
    for (TypeId ty : out.types->all()) {
      if (type_guard[static_cast<std::size_t>(ty)] < 0) {
        // the type as a guard constraint: conjunction of its atoms
        const TypeConstraint& tc = out.types->get(ty);
        std::vector<Constraint> parts;
        const auto& ctx = out.types->ctx();
        int n = ctx.term_count();
        auto term_of = [&](int flat) { return Term{(flat % ctx.beta) + 1, flat >= ctx.beta ? 1 : 0}; };
        for (int i = 0; i < n; ++i) {
          const Region& r = tc.regions[static_cast<std::size_t>(i)];
          if (r.kind == Region::Exactly)
            parts.push_back(Constraint::make_atom(AtomicConstraint::term_const(term_of(i), Cmp::Eq, r.d)));
          else if (r.kind == Region::BelowMin)
            parts.push_back(Constraint::make_atom(AtomicConstraint::term_const(term_of(i), Cmp::Lt, ctx.d1())));
          else
            parts.push_back(Constraint::make_atom(AtomicConstraint::term_const(term_of(i), Cmp::Gt, ctx.dalpha())));
        }
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            parts.push_back(Constraint::make_atom(
                AtomicConstraint::term_term(term_of(i), tc.rel_at(i, j), term_of(j))));
        type_guard[static_cast<std::size_t>(ty)] = out.add_guard(Constraint::conj(std::move(parts)));
      }
      int succ = a.det.step(q, 0, ty);
      for (int d = 0; d < a.degree; ++d)
        mv.cand[static_cast<std::size_t>(d)].push_back({type_guard[static_cast<std::size_t>(ty)], succ});
    }
    out.moves[static_cast<std::size_t>(q)].push_back(std::move(mv));
  }
  out.acc.kind = Acceptance::Rabin;
  out.acc.pairs.resize(a.det.pair_count);
  for (auto& pr : out.acc.pairs) {
    pr.L.resize(static_cast<std::size_t>(out.num_states));
    pr.U.resize(static_cast<std::size_t>(out.num_states));
  }
  for (int s = 0; s < out.num_states; ++s)
    for (std::size_t p = 0; p < a.det.pair_count; ++p) {
      if (a.det.state_L[static_cast<std::size_t>(s)].test(p)) out.acc.pairs[p].L.set(static_cast<std::size_t>(s));
      if (a.det.state_U[static_cast<std::size_t>(s)].test(p)) out.acc.pairs[p].U.set(static_cast<std::size_t>(s));
    }
  return out;
}

CtlStarComponents ctlstar_components(const SpecialForm& sf, const BuildLimits& limits) {
  CtlStarComponents out;
  // One universe for all parts: constants from every path formula plus the
  // anchor constant 0.
  std::vector<Int> consts{0};
  auto harvest = [&](const FormulaPtr& f) {
    auto rec = [&](auto&& self, const FormulaPtr& g) -> void {
      if (g->kind == Formula::Leaf) {
        for (Int d : collect_constants(g->cons)) consts.push_back(d);
        return;
      }
      if (g->a) self(self, g->a);
      if (g->b) self(self, g->b);
    };
    rec(rec, f);
  };
  for (const auto& f : sf.age) harvest(f);
  for (const auto& f : sf.apath) harvest(f);
  out.types = std::make_shared<TypeUniverse>(ConstantContext(sf.beta, std::move(consts)));
  out.degree = sf.degree();
  out.buchi_parts.push_back(build_A0(out.types, out.degree));
  for (std::size_t i = 0; i < sf.age.size(); ++i)
    out.buchi_parts.push_back(
        build_AGE(sf.age[i], static_cast<int>(i) + 1, out.degree, out.types, limits));
  for (const auto& f : sf.apath) out.apaths.push_back(build_Apath(f, out.degree, out.types, limits));
  return out;
}

Tca ctlstar_to_rabin_tca(const SpecialForm& sf, const BuildLimits& limits) {
  CtlStarComponents parts = ctlstar_components(sf, limits);
  std::vector<Tca> factors;
  for (auto& b : parts.buchi_parts) factors.push_back(degeneralize_gtca(b));
  for (auto& ap : parts.apaths) factors.push_back(apath_to_tca(ap));
  return intersect_rabin_tca(factors, limits);
}

}  // namespace ztl
