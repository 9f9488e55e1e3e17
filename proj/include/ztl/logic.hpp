#pragma once

// Formula ASTs for LTL(Z)/CTL(Z)/CTL*(Z): parsing, negation normal form,
// simple-form and special-form normalizers, closure sets, direction maps,
// and concrete-semantics evaluators on lassos and regular trees.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ztl/constraints.hpp"

namespace ztl {

enum class LogicTag { Ltl, Ctl, CtlStar };

// Term with an arbitrary number of X prefixes (pre simple-form).
struct GTerm {
  int var = 1;
  int prefixes = 0;
};

struct GAtom {
  enum Kind : std::uint8_t { TermTerm, TermConst } kind = TermTerm;
  GTerm t1, t2;
  Cmp cmp = Cmp::Eq;
  Int d = 0;
};

// Boolean tree over GAtoms; the constraint payload of formula leaves.
struct GConstraint {
  enum Kind : std::uint8_t { True, False, Atom, Not, And, Or } kind = True;
  GAtom atom;
  std::vector<GConstraint> kids;

  static GConstraint make_atom(GAtom a) {
    GConstraint c; c.kind = Atom; c.atom = a; return c;
  }
  static GConstraint negate(GConstraint c) {
    GConstraint r; r.kind = Not; r.kids.push_back(std::move(c)); return r;
  }
};

int forward_degree(const GConstraint& c);
int max_var(const GConstraint& c);
std::vector<Int> collect_constants(const GConstraint& c);
// Requires all prefixes <= 1.
Constraint to_constraint(const GConstraint& c);

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum Kind : std::uint8_t {
    Leaf,      // constraint leaf (path-level atom)
    Not, And, Or,
    Exists, Forall,     // state formulas: quantifier over a path child
    Next, Until, Release,
    Finally, Globally,  // sugar, removed by desugar()
  } kind = Leaf;
  GConstraint cons;   // Leaf
  FormulaPtr a, b;    // children (a unary, a/b binary)
};

FormulaPtr make_leaf(GConstraint c);
FormulaPtr make_unary(Formula::Kind k, FormulaPtr a);
FormulaPtr make_binary(Formula::Kind k, FormulaPtr a, FormulaPtr b);

std::string to_string(const FormulaPtr& f);

// Parsed formula with its variable environment.
struct NamedFormula {
  FormulaPtr f;
  LogicTag tag = LogicTag::Ctl;
  int beta = 1;                        // highest variable index in use
  std::vector<std::string> var_names;  // 1-based display names (index 0 unused)

  ConstantContext context() const;     // constants of f (0 injected if none)
};

struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"),
        position(pos) {}
};

// Grammar: state := 'E' path | 'A' path | '!' state | state ('&'|'|') state
//          path  := state | atom | '!' path | path ('&'|'|') path
//                 | 'X' path | path 'U' path | path 'R' path | 'F' path | 'G' path
//          atom  := term ('<'|'='|'>') term | term '=' int ; term := 'X'* ident
// Rejects shapes outside the tagged logic.
NamedFormula parse_formula(const std::string& text, LogicTag tag);

// F/G desugared (state-level bottom E(x1<x1) for CTL), '>' flipped,
// Boolean combinations of pure constraints merged into maximal leaves.
FormulaPtr desugar(const FormulaPtr& f, LogicTag tag);

// Negation normal form; negations are pushed into constraint leaves.
FormulaPtr to_nnf(const FormulaPtr& f);

// Syntactic simple-form scanner: NNF and all term prefixes <= 1.
bool is_simple_form(const FormulaPtr& f);

// Equisatisfiable simple form; introduces history variables when the
// forward degree exceeds 1. Works for all three logics.
NamedFormula ctl_simple_form(const NamedFormula& input);
NamedFormula ltl_simple_form(const NamedFormula& input);
NamedFormula ctlstar_simple_form(const NamedFormula& input);

// jump on a constraint: terms X^i x_j become history variables x_j^{i-M};
// the history variable x_j^{-k} has index k*beta + j.
GConstraint jump_constraint(const GConstraint& c, int M, int beta);

// Closure (subformula set extended with QX/X-expansions of U/R) for
// simple-form formulas, in deterministic order, plus the consistency test.
struct Closure {
  std::vector<FormulaPtr> items;
  std::map<std::string, int> index;  // printed form -> position

  int find(const FormulaPtr& f) const;
  std::size_t size() const { return items.size(); }
};
Closure closure(const FormulaPtr& f, LogicTag tag);
bool propositionally_consistent(const Closure& cl, const Bitset& xs, LogicTag tag);

// Direction map: bijection from EX-subformulas and E-constraint subformulas
// of a simple-form CTL(Z) formula onto [1..D], in closure order.
struct DirectionMap {
  std::vector<FormulaPtr> targets;   // position i holds the formula mapped to i+1
  std::map<std::string, int> index;  // printed form -> direction (1-based)

  int direction(const FormulaPtr& f) const;
  int degree() const { return static_cast<int>(targets.size()); }
};
DirectionMap direction_map_for(const FormulaPtr& f, LogicTag tag);

// Ultimately periodic data word u . v^omega.
struct LassoDataWord {
  std::vector<std::vector<Int>> prefix;
  std::vector<std::vector<Int>> loop;  // nonempty

  std::size_t period_start() const { return prefix.size(); }
  std::size_t total() const { return prefix.size() + loop.size(); }
  const std::vector<Int>& at(std::size_t i) const {
    if (i < prefix.size()) return prefix[i];
    return loop[(i - prefix.size()) % loop.size()];
  }
  std::size_t next(std::size_t i) const {  // position after i in [0,total)
    return i + 1 < total() ? i + 1 : period_start();
  }
};

// Finite pointed machine denoting an infinite D-ary data tree.
struct RegularDataTree {
  int degree = 1;
  int beta = 1;
  struct State {
    int letter = 0;
    std::vector<Int> values;
    std::vector<int> succ;  // size degree
  };
  std::vector<State> states;
  int initial = 0;
};

// Formula size: symbol count with integers in binary.
int formula_size(const FormulaPtr& f);

// Truth of a simple-form LTL(Z) path formula on u . v^omega.
bool eval_ltl_lasso(const FormulaPtr& phi, const LassoDataWord& w);

// Truth of a simple-form CTL(Z) state formula at the tree's root, by
// EU/AU/ER/AR fixpoints over the machine states.
bool eval_ctl_regular_tree(const FormulaPtr& phi, const RegularDataTree& t);

// Special form E(x1=0) /\ AND_i AGE Phi_i /\ AND_j A Phi'_j with all Phi in
// simple LTL(Z) form. degree == 1 + age.size().
struct SpecialForm {
  int beta = 1;
  std::vector<std::string> var_names;
  std::vector<FormulaPtr> age;    // Phi_1 .. Phi_{D-1}
  std::vector<FormulaPtr> apath;  // Phi'_1 .. Phi'_{D'}

  int degree() const { return 1 + static_cast<int>(age.size()); }
};
SpecialForm ctlstar_special_form(const NamedFormula& input);

}  // namespace ztl
