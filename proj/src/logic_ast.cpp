#include "ztl/logic.hpp"

#include <algorithm>

namespace ztl {

int forward_degree(const GConstraint& c) {
  switch (c.kind) {
    case GConstraint::True:
    case GConstraint::False: return 0;
    case GConstraint::Atom: {
      int m = c.atom.t1.prefixes;
      if (c.atom.kind == GAtom::TermTerm) m = std::max(m, c.atom.t2.prefixes);
      return m;
    }
    default: {
      int m = 0;
      for (const auto& k : c.kids) m = std::max(m, forward_degree(k));
      return m;
    }
  }
}

int max_var(const GConstraint& c) {
  switch (c.kind) {
    case GConstraint::True:
    case GConstraint::False: return 0;
    case GConstraint::Atom: {
      int m = c.atom.t1.var;
      if (c.atom.kind == GAtom::TermTerm) m = std::max(m, c.atom.t2.var);
      return m;
    }
    default: {
      int m = 0;
      for (const auto& k : c.kids) m = std::max(m, max_var(k));
      return m;
    }
  }
}

static void collect_constants_into(const GConstraint& c, std::vector<Int>& out) {
  if (c.kind == GConstraint::Atom) {
    if (c.atom.kind == GAtom::TermConst) out.push_back(c.atom.d);
    return;
  }
  for (const auto& k : c.kids) collect_constants_into(k, out);
}

std::vector<Int> collect_constants(const GConstraint& c) {
  std::vector<Int> out;
  collect_constants_into(c, out);
  return out;
}

Constraint to_constraint(const GConstraint& c) {
  switch (c.kind) {
    case GConstraint::True: return Constraint::tru();
    case GConstraint::False: return Constraint::fls();
    case GConstraint::Atom: {
      const GAtom& a = c.atom;
      if (a.t1.prefixes > 1 || (a.kind == GAtom::TermTerm && a.t2.prefixes > 1))
        throw std::invalid_argument("to_constraint: term prefix depth > 1 (not in simple form)");
      Term t1{a.t1.var, a.t1.prefixes};
      if (a.kind == GAtom::TermConst)
        return Constraint::make_atom(AtomicConstraint::term_const(t1, a.cmp, a.d));
      Term t2{a.t2.var, a.t2.prefixes};
      return Constraint::make_atom(AtomicConstraint::term_term(t1, a.cmp, t2));
    }
    case GConstraint::Not:
      return Constraint::negate(to_constraint(c.kids[0]));
    case GConstraint::And:
    case GConstraint::Or: {
      std::vector<Constraint> kids;
      kids.reserve(c.kids.size());
      for (const auto& k : c.kids) kids.push_back(to_constraint(k));
      return c.kind == GConstraint::And ? Constraint::conj(std::move(kids))
                                        : Constraint::disj(std::move(kids));
    }
  }
  return Constraint::tru();
}

static std::string gterm_str(const GTerm& t) {
  std::string s;
  for (int i = 0; i < t.prefixes; ++i) s += "X ";
  s += "x" + std::to_string(t.var);
  return s;
}

static std::string gcons_str(const GConstraint& c) {
  switch (c.kind) {
    case GConstraint::True: return "true";
    case GConstraint::False: return "false";
    case GConstraint::Atom: {
      std::string s = gterm_str(c.atom.t1);
      s += c.atom.cmp == Cmp::Lt ? " < " : (c.atom.cmp == Cmp::Eq ? " = " : " > ");
      if (c.atom.kind == GAtom::TermTerm) s += gterm_str(c.atom.t2);
      else s += std::to_string(c.atom.d);
      return s;
    }
    case GConstraint::Not: return "!(" + gcons_str(c.kids[0]) + ")";
    case GConstraint::And:
    case GConstraint::Or: {
      std::string op = c.kind == GConstraint::And ? " & " : " | ";
      std::string s = "(";
      for (std::size_t i = 0; i < c.kids.size(); ++i) {
        if (i) s += op;
        s += gcons_str(c.kids[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

FormulaPtr make_leaf(GConstraint c) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Leaf;
  f->cons = std::move(c);
  return f;
}

FormulaPtr make_unary(Formula::Kind k, FormulaPtr a) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->a = std::move(a);
  return f;
}

FormulaPtr make_binary(Formula::Kind k, FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->a = std::move(a);
  f->b = std::move(b);
  return f;
}

std::string to_string(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Leaf: return gcons_str(f->cons);
    case Formula::Not: return "!(" + to_string(f->a) + ")";
    case Formula::And: return "(" + to_string(f->a) + " & " + to_string(f->b) + ")";
    case Formula::Or: return "(" + to_string(f->a) + " | " + to_string(f->b) + ")";
    case Formula::Exists: return "E (" + to_string(f->a) + ")";
    case Formula::Forall: return "A (" + to_string(f->a) + ")";
    case Formula::Next: return "X (" + to_string(f->a) + ")";
    case Formula::Until: return "(" + to_string(f->a) + " U " + to_string(f->b) + ")";
    case Formula::Release: return "(" + to_string(f->a) + " R " + to_string(f->b) + ")";
    case Formula::Finally: return "F (" + to_string(f->a) + ")";
    case Formula::Globally: return "G (" + to_string(f->a) + ")";
  }
  return "?";
}

namespace {
int gcons_size(const GConstraint& c) {
  switch (c.kind) {
    case GConstraint::True:
    case GConstraint::False: return 1;
    case GConstraint::Atom: {
      int bits = 1;
      if (c.atom.kind == GAtom::TermConst) {
        Int d = c.atom.d < 0 ? -c.atom.d : c.atom.d;
        while (d > 0) { ++bits; d >>= 1; }
      }
      return 3 + c.atom.t1.prefixes +
             (c.atom.kind == GAtom::TermTerm ? c.atom.t2.prefixes : bits);
    }
    default: {
      int s = 1;
      for (const auto& k : c.kids) s += gcons_size(k);
      return s;
    }
  }
}
}  // namespace

int formula_size(const FormulaPtr& f) {
  if (f->kind == Formula::Leaf) return gcons_size(f->cons);
  int s = 1;
  if (f->a) s += formula_size(f->a);
  if (f->b) s += formula_size(f->b);
  return s;
}

ConstantContext NamedFormula::context() const {
  std::vector<Int> consts;
  auto walk = [&](auto&& self, const FormulaPtr& g) -> void {
    if (g->kind == Formula::Leaf) {
      collect_constants_into(g->cons, consts);
      return;
    }
    if (g->a) self(self, g->a);
    if (g->b) self(self, g->b);
  };
  walk(walk, f);
  if (consts.empty()) consts.push_back(0);
  return ConstantContext(beta, std::move(consts));
}

namespace detail {
std::string gconstraint_to_string(const GConstraint& c) { return gcons_str(c); }
}

}  // namespace ztl
