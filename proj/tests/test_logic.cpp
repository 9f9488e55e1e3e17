#include "doctest.h"

#include <random>

#include "ztl/logic.hpp"

using namespace ztl;

TEST_CASE("parser accepts the documented shapes") {
  auto f1 = parse_formula("E G (x1 < X x1)", LogicTag::CtlStar);
  CHECK(f1.f->kind == Formula::Exists);
  CHECK(f1.f->a->kind == Formula::Release);  // G desugars to false R .

  auto f2 = parse_formula("E (x1 = 0)", LogicTag::Ctl);
  CHECK(f2.f->kind == Formula::Exists);
  CHECK(f2.f->a->kind == Formula::Leaf);

  CHECK_THROWS_AS(parse_formula("x1 U x2", LogicTag::Ctl), ParseError);
  CHECK_THROWS_AS(parse_formula("E (x1 = 0)", LogicTag::Ltl), ParseError);
  CHECK_THROWS_AS(parse_formula("x1 < x2 (", LogicTag::Ltl), ParseError);
  CHECK_THROWS_AS(parse_formula("x1 < 5", LogicTag::Ltl), ParseError);
  CHECK_THROWS_AS(parse_formula("x1 = 99999999999999999999999", LogicTag::Ltl), ParseError);
}

TEST_CASE("X prefixes bind to terms inside atoms and to paths elsewhere") {
  auto f = parse_formula("G (x1 = X x1)", LogicTag::Ltl);
  CHECK(f.f->kind == Formula::Release);
  const FormulaPtr& leaf = f.f->b;
  REQUIRE(leaf->kind == Formula::Leaf);
  CHECK(leaf->cons.kind == GConstraint::Atom);
  CHECK(leaf->cons.atom.t2.prefixes == 1);

  auto g = parse_formula("X (x1 = 0)", LogicTag::Ltl);
  CHECK(g.f->kind == Formula::Next);
}

TEST_CASE("operator precedence: unary over U/R over & over |") {
  auto f = parse_formula("F (x1 = 0) & G (x2 = 0) | X (x1 = 0)", LogicTag::Ltl);
  CHECK(f.f->kind == Formula::Or);
  CHECK(f.f->a->kind == Formula::And);
  auto g = parse_formula("x1 = 0 U x2 = 0 U x1 < x2", LogicTag::Ltl);
  CHECK(g.f->kind == Formula::Until);      // right-assoc
  CHECK(g.f->b->kind == Formula::Until);
}

TEST_CASE("'>' is flipped at parse time") {
  auto f = parse_formula("x1 > x2", LogicTag::Ltl);
  REQUIRE(f.f->kind == Formula::Leaf);
  CHECK(f.f->cons.atom.cmp == Cmp::Lt);
  CHECK(f.f->cons.atom.t1.var == 2);
  CHECK(f.f->cons.atom.t2.var == 1);
}

TEST_CASE("nnf pushes negation into constraints") {
  auto f = parse_formula("! E ((x1 = 0) U (x2 = 0))", LogicTag::CtlStar);
  auto n = to_nnf(f.f);
  CHECK(n->kind == Formula::Forall);
  CHECK(n->a->kind == Formula::Release);
  CHECK(is_simple_form(n));
}

TEST_CASE("jump matches the worked instance") {
  // jump((X x1 < XXX x2) & (x1 = x2), 3) = (x1^{-2} < x2^0) & (x1^{-3} = x2^{-3})
  const int beta = 2;
  GAtom a1;
  a1.kind = GAtom::TermTerm;
  a1.t1 = GTerm{1, 1};
  a1.t2 = GTerm{2, 3};
  a1.cmp = Cmp::Lt;
  GAtom a2;
  a2.kind = GAtom::TermTerm;
  a2.t1 = GTerm{1, 0};
  a2.t2 = GTerm{2, 0};
  a2.cmp = Cmp::Eq;
  GConstraint c;
  c.kind = GConstraint::And;
  c.kids = {GConstraint::make_atom(a1), GConstraint::make_atom(a2)};
  GConstraint j = jump_constraint(c, 3, beta);
  REQUIRE(j.kind == GConstraint::And);
  // x1^{-2} has index 2*beta+1 = 5; x2^{0} stays 2; x1^{-3} = 7; x2^{-3} = 8.
  CHECK(j.kids[0].atom.t1.var == 5);
  CHECK(j.kids[0].atom.t1.prefixes == 0);
  CHECK(j.kids[0].atom.t2.var == 2);
  CHECK(j.kids[1].atom.t1.var == 7);
  CHECK(j.kids[1].atom.t2.var == 8);
}

TEST_CASE("simple form is identity on already-simple formulas") {
  auto f = parse_formula("E ( E (x1 < X x1) U E (x2 = 0) )", LogicTag::Ctl);
  auto s = ctl_simple_form(f);
  CHECK(s.beta == f.beta);
  CHECK(to_string(s.f) == to_string(to_nnf(f.f)));
  CHECK(is_simple_form(s.f));
}

TEST_CASE("simple form introduces history variables and stays equisatisfiable-shaped") {
  auto f = parse_formula("E X E ((X x1 < X X X x2) & (x1 = x2))", LogicTag::Ctl);
  auto s = ctl_simple_form(f);
  CHECK(is_simple_form(s.f));
  CHECK(s.beta == f.beta * (3 + 1));
  CHECK(s.var_names.at(3) == "x1_m1");
  CHECK(s.var_names.at(8) == "x2_m3");
}

TEST_CASE("ltl simple form handles deep X chains") {
  auto f = parse_formula("G (x1 < X X x1)", LogicTag::Ltl);
  auto s = ltl_simple_form(f);
  CHECK(is_simple_form(s.f));
  CHECK(s.beta == 3);
}

TEST_CASE("closure contains QX expansions") {
  auto f = parse_formula("E ( E (x1 = 0) U E (x2 = 0) )", LogicTag::Ctl);
  auto s = ctl_simple_form(f);
  Closure cl = closure(s.f, LogicTag::Ctl);
  FormulaPtr expand = make_unary(Formula::Exists, make_unary(Formula::Next, s.f));
  CHECK(cl.find(expand) >= 0);
  // closed under subformulas: idempotent size
  std::size_t n = cl.size();
  for (const auto& item : cl.items) {
    Closure sub = closure(item, LogicTag::Ctl);
    for (const auto& g : sub.items) CHECK(cl.find(g) >= 0);
  }
  CHECK(cl.size() == n);
}

TEST_CASE("propositional consistency clauses") {
  auto f = parse_formula("E ( E (x1 = 0) U E (x2 = 0) ) & A ( E (x1 = 0) R E (x2 = 0) )", LogicTag::Ctl);
  auto s = ctl_simple_form(f);
  Closure cl = closure(s.f, LogicTag::Ctl);
  Bitset empty(cl.size());
  CHECK(propositionally_consistent(cl, empty, LogicTag::Ctl));
  // X with the conjunction but not its left child is inconsistent.
  Bitset bad(cl.size());
  bad.set(static_cast<std::size_t>(cl.find(s.f)));
  CHECK_FALSE(propositionally_consistent(cl, bad, LogicTag::Ctl));
}

TEST_CASE("direction map enumerates EX and E-constraint subformulas in order") {
  auto f = parse_formula("E X E (x1 = 0) & E (x1 < X x1)", LogicTag::Ctl);
  auto s = ctl_simple_form(f);
  DirectionMap dm = direction_map_for(s.f, LogicTag::Ctl);
  CHECK(dm.degree() == 3);  // EX(...), E(x1=0), E(x1<Xx1)
  // bijectivity
  std::vector<int> seen;
  for (const auto& t : dm.targets) seen.push_back(dm.direction(t));
  std::sort(seen.begin(), seen.end());
  for (int i = 0; i < dm.degree(); ++i) CHECK(seen[static_cast<std::size_t>(i)] == i + 1);

  auto g = parse_formula("A (x1 = 0)", LogicTag::Ctl);
  DirectionMap dm2 = direction_map_for(ctl_simple_form(g).f, LogicTag::Ctl);
  CHECK(dm2.degree() == 0);
}

TEST_CASE("eval_ltl_lasso on the documented examples") {
  LassoDataWord w1;
  w1.loop = {{5}};
  auto f1 = parse_formula("G (x1 = X x1)", LogicTag::Ltl);
  CHECK(eval_ltl_lasso(f1.f, w1));

  LassoDataWord w2;
  w2.prefix = {{3}, {2}};
  w2.loop = {{1}};
  auto f2 = parse_formula("F (x1 = 0)", LogicTag::Ltl);
  CHECK_FALSE(eval_ltl_lasso(f2.f, w2));

  LassoDataWord w3;
  w3.loop = {{0}, {1}};
  auto f3 = parse_formula("G (x1 < X x1)", LogicTag::Ltl);
  CHECK_FALSE(eval_ltl_lasso(f3.f, w3));
}

TEST_CASE("eval_ltl_lasso is stable under loop unrolling") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<Int> dist(-2, 2);
  std::vector<std::string> formulas = {
      "G (x1 = X x1)", "F (x1 = 0)", "(x1 < X x1) U (x1 = 0)",
      "G F (x1 = 1)", "(x1 = 0) R (x1 = 1)"};
  for (const auto& text : formulas) {
    auto f = parse_formula(text, LogicTag::Ltl);
    for (int it = 0; it < 40; ++it) {
      LassoDataWord w;
      int pre = static_cast<int>(rng() % 3);
      int loop = 1 + static_cast<int>(rng() % 3);
      for (int i = 0; i < pre; ++i) w.prefix.push_back({dist(rng)});
      for (int i = 0; i < loop; ++i) w.loop.push_back({dist(rng)});
      LassoDataWord unrolled = w;
      for (const auto& v : w.loop) unrolled.prefix.push_back(v);
      CHECK(eval_ltl_lasso(f.f, w) == eval_ltl_lasso(f.f, unrolled));
    }
  }
}

namespace {

RegularDataTree constant_tree(Int v, int degree = 2) {
  RegularDataTree t;
  t.degree = degree;
  t.beta = 1;
  RegularDataTree::State s;
  s.values = {v};
  s.succ.assign(static_cast<std::size_t>(degree), 0);
  t.states.push_back(s);
  return t;
}

}  // namespace

TEST_CASE("eval_ctl_regular_tree basics") {
  auto f = parse_formula("E (x1 = 0)", LogicTag::Ctl);
  CHECK(eval_ctl_regular_tree(f.f, constant_tree(0)));
  CHECK_FALSE(eval_ctl_regular_tree(f.f, constant_tree(3)));

  // A (false R A (X x1 < x1)) cannot hold on any finite-state tree.
  auto g = parse_formula("A G A (X x1 < x1)", LogicTag::Ctl);
  auto gs = ctl_simple_form(g);
  CHECK_FALSE(eval_ctl_regular_tree(gs.f, constant_tree(0)));
  RegularDataTree two;
  two.degree = 2;
  two.beta = 1;
  two.states.resize(2);
  two.states[0].values = {5};
  two.states[0].succ = {1, 1};
  two.states[1].values = {3};
  two.states[1].succ = {0, 0};
  CHECK_FALSE(eval_ctl_regular_tree(gs.f, two));
  // but decreasing-on-a-prefix works for EF-type properties
  auto h = parse_formula("E F E (x1 = 3)", LogicTag::Ctl);
  CHECK(eval_ctl_regular_tree(ctl_simple_form(h).f, two));
}

TEST_CASE("special form recognizer keeps (SF)-shaped input") {
  auto f = parse_formula("E (x1 = 0) & A G E (x2 < X x2) & A G (x1 < x2)", LogicTag::CtlStar);
  SpecialForm sf = ctlstar_special_form(f);
  CHECK(sf.degree() == 2);
  CHECK(sf.age.size() == 1);
  CHECK(sf.apath.size() == 1);
  CHECK(sf.beta == 2);
}

TEST_CASE("special form matches the appendix walkthrough shape") {
  auto f = parse_formula(
      "E ((X x1 < x1) U (A X (x2 = X x2))) & E G (x1 < x2)", LogicTag::CtlStar);
  SpecialForm sf = ctlstar_special_form(f);
  // four fresh variables y1..y4
  CHECK(sf.beta == 6);
  CHECK(sf.age.size() == 3);
  CHECK(sf.apath.size() == 4);
  CHECK(sf.degree() == 4);
  for (const auto& p : sf.age) CHECK(is_simple_form(p));
  for (const auto& p : sf.apath) CHECK(is_simple_form(p));
}

TEST_CASE("special form of AGEF(x1=0) via the almost-(SF) recognizer") {
  auto f = parse_formula("A G E F (x1 = 0)", LogicTag::CtlStar);
  SpecialForm sf = ctlstar_special_form(f);
  CHECK(sf.degree() == 2);
  CHECK(sf.apath.empty());
  CHECK(sf.beta == 2);  // x1 plus the injected anchor
}
