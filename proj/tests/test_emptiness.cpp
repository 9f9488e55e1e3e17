#include "doctest.h"

#include <random>

#include "ztl/emptiness.hpp"
#include "ztl/oracle.hpp"

using namespace ztl;

namespace {

TypeUniversePtr universe(int beta, std::vector<Int> consts = {0}) {
  return std::make_shared<TypeUniverse>(ConstantContext(beta, std::move(consts)));
}

ParityGame random_game(std::mt19937& rng, int n, int max_prio) {
  ParityGame g;
  g.vertices.resize(static_cast<std::size_t>(n));
  for (auto& v : g.vertices) {
    v.even_owns = rng() % 2 == 0;
    v.priority = static_cast<int>(rng() % static_cast<unsigned>(max_prio + 1));
    int degree = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < degree; ++i)
      v.succ.push_back(static_cast<int>(rng() % static_cast<unsigned>(n)));
  }
  return g;
}

FiniteTreeAutomaton random_fta(std::mt19937& rng, TypeUniversePtr types, int max_states,
                               int max_pairs) {
  FiniteTreeAutomaton a;
  a.types = types;
  a.degree = 2;
  a.num_states = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_states));
  a.initial = {0};
  const auto& all = types->all();
  std::uniform_int_distribution<std::size_t> ty(0, all.size() - 1);
  std::uniform_int_distribution<int> st(0, a.num_states - 1);
  int transitions = 1 + static_cast<int>(rng() % static_cast<unsigned>(2 * a.num_states + 1));
  for (int i = 0; i < transitions; ++i) {
    FiniteTreeAutomaton::Transition t;
    t.src = st(rng);
    t.sym = {0, all[ty(rng)]};
    t.children = {st(rng), st(rng)};
    a.transitions.push_back(std::move(t));
  }
  int pairs = static_cast<int>(rng() % static_cast<unsigned>(max_pairs + 1));
  a.pairs.resize(static_cast<std::size_t>(pairs));
  for (auto& pr : a.pairs) {
    pr.L.resize(static_cast<std::size_t>(a.num_states));
    pr.U.resize(static_cast<std::size_t>(a.num_states));
    for (int q = 0; q < a.num_states; ++q) {
      if (rng() % 2) pr.L.set(static_cast<std::size_t>(q));
      if (rng() % 4 == 0) pr.U.set(static_cast<std::size_t>(q));
    }
  }
  return a;
}

// Plain-alphabet emptiness arena over an explicit finite tree automaton:
// Eve resolves transitions, Adam picks directions. No type layer involved.
class FtaArena : public TreeArena {
 public:
  explicit FtaArena(const FiniteTreeAutomaton& a) : a_(a) {
    by_src_.resize(static_cast<std::size_t>(a_.num_states));
    for (std::size_t i = 0; i < a_.transitions.size(); ++i)
      by_src_[static_cast<std::size_t>(a_.transitions[i].src)].push_back(i);
  }
  int degree() const override { return a_.degree; }
  std::vector<int> initials() override { return a_.initial; }
  std::vector<ArenaMove> moves(int state) override {
    std::vector<ArenaMove> out;
    for (std::size_t ti : by_src_[static_cast<std::size_t>(state)]) {
      const auto& t = a_.transitions[ti];
      ArenaMove mv;
      mv.sym = t.sym;
      for (int c : t.children) mv.cand.push_back({c});
      out.push_back(std::move(mv));
    }
    return out;
  }
  std::size_t num_pairs() const override { return a_.pairs.size(); }
  bool in_L(int state, std::size_t pair) override {
    return a_.pairs[pair].L.test(static_cast<std::size_t>(state));
  }
  bool in_U(int state, std::size_t pair) override {
    return a_.pairs[pair].U.test(static_cast<std::size_t>(state));
  }
  std::size_t discovered() const override { return static_cast<std::size_t>(a_.num_states); }

 private:
  FiniteTreeAutomaton a_;
  std::vector<std::vector<std::size_t>> by_src_;
};

bool fta_nonempty(const FiniteTreeAutomaton& a) {
  FtaArena arena(a);
  return rabin_tree_emptiness(arena, a.types).nonempty;
}

}  // namespace

TEST_CASE("zielonka agrees with the strategy-enumeration solver on tiny games") {
  std::mt19937 rng(3);
  for (int round = 0; round < 400; ++round) {
    ParityGame g = random_game(rng, 2 + static_cast<int>(rng() % 7), 5);
    ParitySolution a = solve_parity(g);
    ParitySolution b = solve_parity_brute(g);
    for (std::size_t v = 0; v < g.vertices.size(); ++v) CHECK(a.even_wins[v] == b.even_wins[v]);
  }
}

TEST_CASE("rabin emptiness: trivial cases") {
  auto types = universe(1);
  const auto& all = types->all();
  FiniteTreeAutomaton a;
  a.types = types;
  a.degree = 2;
  a.num_states = 1;
  a.initial = {0};
  FiniteTreeAutomaton::Transition t;
  t.src = 0;
  t.sym = {0, all[0]};
  t.children = {0, 0};
  a.transitions.push_back(t);
  a.pairs.resize(1);
  a.pairs[0].L.resize(1);
  a.pairs[0].U.resize(1);
  a.pairs[0].L.set(0);
  CHECK(fta_nonempty(a));
  CHECK(brute_rabin_emptiness(a));
  // unreachable L
  FiniteTreeAutomaton b = a;
  b.pairs[0].L.reset(0);
  CHECK_FALSE(fta_nonempty(b));
  CHECK_FALSE(brute_rabin_emptiness(b));
}

TEST_CASE("rabin emptiness differential against the brute oracle") {
  std::mt19937 rng(7);
  auto types = universe(1);
  int agreements = 0;
  for (int round = 0; round < 200; ++round) {
    FiniteTreeAutomaton a = random_fta(rng, types, 4, 2);
    bool fast = fta_nonempty(a);
    bool slow = brute_rabin_emptiness(a);
    CHECK(fast == slow);
    if (fast == slow) ++agreements;
  }
  CHECK(agreements == 200);
}

TEST_CASE("fta membership through the game matches the intersection semantics") {
  std::mt19937 rng(11);
  auto types = universe(1);
  auto random_symtree = [&](int max_states) {
    const auto& all = types->all();
    RegularSymbolicTree t;
    t.types = types;
    t.degree = 2;
    t.initial = 0;
    int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_states));
    t.states.resize(static_cast<std::size_t>(n));
    for (auto& s : t.states) {
      s.label = {0, all[rng() % all.size()]};
      s.succ = {static_cast<int>(rng() % static_cast<unsigned>(n)),
                static_cast<int>(rng() % static_cast<unsigned>(n))};
    }
    return t;
  };
  int rounds = 0;
  for (int round = 0; round < 40; ++round) {
    FiniteTreeAutomaton a = random_fta(rng, types, 3, 1);
    FiniteTreeAutomaton b = random_fta(rng, types, 3, 1);
    FiniteTreeAutomaton p = intersect_finite_rabin({a, b});
    CHECK(p.pairs.size() == std::max<std::size_t>(a.pairs.size(), 1) *
                                std::max<std::size_t>(b.pairs.size(), 1));
    for (int i = 0; i < 4; ++i) {
      RegularSymbolicTree t = random_symtree(2);
      bool pa = fta_membership(a, t);
      bool pb = fta_membership(b, t);
      bool pp = fta_membership(p, t);
      CHECK(pp == (pa && pb));
      ++rounds;
    }
  }
  CHECK(rounds == 160);
}

TEST_CASE("intersection with a universal automaton preserves membership") {
  auto types = universe(1);
  const auto& all = types->all();
  std::mt19937 rng(13);
  FiniteTreeAutomaton uni;
  uni.types = types;
  uni.degree = 2;
  uni.num_states = 1;
  uni.initial = {0};
  for (TypeId ty : all) {
    FiniteTreeAutomaton::Transition t;
    t.src = 0;
    t.sym = {0, ty};
    t.children = {0, 0};
    uni.transitions.push_back(std::move(t));
  }
  uni.pairs.resize(1);
  uni.pairs[0].L.resize(1);
  uni.pairs[0].U.resize(1);
  uni.pairs[0].L.set(0);
  for (int round = 0; round < 15; ++round) {
    FiniteTreeAutomaton a = random_fta(rng, types, 3, 1);
    FiniteTreeAutomaton p = intersect_finite_rabin({a, uni});
    RegularSymbolicTree t;
    t.types = types;
    t.degree = 2;
    t.initial = 0;
    t.states.resize(1);
    t.states[0].label = {0, all[rng() % all.size()]};
    t.states[0].succ = {0, 0};
    CHECK(fta_membership(p, t) == fta_membership(a, t));
  }
}

TEST_CASE("concretize_prefix on a constant symbolic tree") {
  auto types = universe(1, {4});
  std::vector<Int> v4 = {4};
  // all values pinned to the constant 4; the virtual root is 0
  std::vector<Int> zero = {0};
  RegularSymbolicTree t;
  t.types = types;
  t.degree = 2;
  t.initial = 0;
  t.states.resize(2);
  t.states[0].label = {0, types->type_of(zero, v4)};
  t.states[0].succ = {1, 1};
  t.states[1].label = {0, types->type_of(v4, v4)};
  t.states[1].succ = {1, 1};
  ConcretePrefix p = concretize_prefix(t, 2);
  for (const auto& node : p.nodes) CHECK(node.values[0] == 4);
}

TEST_CASE("concretize_prefix round trips the running example abstraction") {
  auto types = universe(2);
  std::vector<Int> zero = {0, 0}, root = {3, 7}, right = {2, 7}, b = {0, 0};
  RegularSymbolicTree t;
  t.types = types;
  t.degree = 2;
  t.initial = 0;
  TypeId theta = types->type_of(zero, root);
  TypeId theta0 = types->type_of(root, b);
  TypeId theta1 = types->type_of(root, right);
  TypeId tau00 = types->type_of(zero, zero);
  TypeId theta0p = types->type_of(right, b);
  // like the running example but the rightmost branch resets to zero
  t.states.resize(4);
  t.states[0] = {{0, theta}, {1, 3}};
  t.states[1] = {{1, theta0}, {2, 2}};
  t.states[2] = {{1, tau00}, {2, 2}};
  t.states[3] = {{0, theta1}, {1, 1}};
  (void)theta0p;
  ConcretePrefix p = concretize_prefix(t, 2);
  // retype every edge
  std::vector<int> mstate(p.nodes.size(), -1);
  mstate[0] = t.initial;
  TypeId rt = types->type_of(zero, p.nodes[0].values);
  CHECK(rt == theta);
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    if (mstate[i] < 0) continue;
    for (int d = 0; d < 2; ++d) {
      int c = p.nodes[i].children[static_cast<std::size_t>(d)];
      if (c < 0) continue;
      int cs = t.states[static_cast<std::size_t>(mstate[i])].succ[static_cast<std::size_t>(d)];
      mstate[static_cast<std::size_t>(c)] = cs;
      CHECK(types->type_of(p.nodes[i].values, p.nodes[static_cast<std::size_t>(c)].values) ==
            t.states[static_cast<std::size_t>(cs)].label.type);
    }
  }
}

TEST_CASE("solve: the running-example style automaton is satisfiable") {
  // guards as in the two-transition automaton of the worked example
  auto types = universe(2);
  Tca a;
  a.types = types;
  a.degree = 2;
  a.letters = {"a", "b"};
  a.num_states = 1;
  a.initial = {0};
  a.moves.resize(1);
  Constraint theta0p = Constraint::make_atom(AtomicConstraint::term_const(Term{1, 1}, Cmp::Eq, 0));
  Constraint theta1p = Constraint::conj(
      {Constraint::make_atom(AtomicConstraint::term_term(Term{1, 1}, Cmp::Lt, Term{1, 0})),
       Constraint::make_atom(AtomicConstraint::term_term(Term{1, 0}, Cmp::Lt, Term{2, 0})),
       Constraint::make_atom(AtomicConstraint::term_term(Term{2, 0}, Cmp::Eq, Term{2, 1}))});
  Constraint theta2 = Constraint::conj(
      {Constraint::make_atom(AtomicConstraint::term_term(Term{1, 0}, Cmp::Eq, Term{2, 0})),
       Constraint::make_atom(AtomicConstraint::term_const(Term{1, 0}, Cmp::Eq, 0))});
  a.add_transition(0, 0, {{theta0p, 0}, {theta1p, 0}});
  a.add_transition(0, 1, {{theta2, 0}, {theta2, 0}});
  a.acc.kind = Acceptance::Buchi;
  Bitset f(1);
  f.set(0);
  a.acc.sets = {f};
  SolveResult r = solve(a);
  CHECK(r.sat);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->validated);
}

TEST_CASE("solve: forcing the strict-descent type forever is unsatisfiable") {
  auto types = universe(2);
  Tca a;
  a.types = types;
  a.degree = 2;
  a.letters = {"a"};
  a.num_states = 1;
  a.initial = {0};
  a.moves.resize(1);
  Constraint theta1p = Constraint::conj(
      {Constraint::make_atom(AtomicConstraint::term_const(Term{1, 1}, Cmp::Gt, 0)),
       Constraint::make_atom(AtomicConstraint::term_term(Term{1, 1}, Cmp::Lt, Term{1, 0})),
       Constraint::make_atom(AtomicConstraint::term_term(Term{1, 0}, Cmp::Lt, Term{2, 0})),
       Constraint::make_atom(AtomicConstraint::term_term(Term{2, 0}, Cmp::Eq, Term{2, 1}))});
  a.add_transition(0, 0, {{theta1p, 0}, {theta1p, 0}});
  a.acc.kind = Acceptance::Buchi;
  Bitset f(1);
  f.set(0);
  a.acc.sets = {f};
  SolveResult r = solve(a);
  CHECK_FALSE(r.sat);
}

TEST_CASE("solve monotonicity: adding transitions never flips SAT to UNSAT") {
  std::mt19937 rng(17);
  auto types = universe(1);
  for (int round = 0; round < 8; ++round) {
    Tca a;
    a.types = types;
    a.degree = 2;
    a.num_states = 2;
    a.initial = {0};
    a.moves.resize(2);
    auto rnd_guard = [&]() {
      switch (rng() % 3) {
        case 0: return Constraint::tru();
        case 1:
          return Constraint::make_atom(AtomicConstraint::term_term(Term{1, 0}, Cmp::Lt, Term{1, 1}));
        default:
          return Constraint::make_atom(AtomicConstraint::term_const(Term{1, 1}, Cmp::Eq, 0));
      }
    };
    auto rnd_state = [&]() { return static_cast<int>(rng() % 2); };
    int k = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < k; ++i)
      a.add_transition(rnd_state(), 0, {{rnd_guard(), rnd_state()}, {rnd_guard(), rnd_state()}});
    a.acc.kind = Acceptance::Buchi;
    Bitset f(2);
    f.set(static_cast<std::size_t>(rng() % 2));
    a.acc.sets = {f};
    SolveResult before = solve(a);
    Tca b = a;
    b.add_transition(rnd_state(), 0, {{rnd_guard(), rnd_state()}, {rnd_guard(), rnd_state()}});
    SolveResult after = solve(b);
    if (before.sat) CHECK(after.sat);
  }
}
