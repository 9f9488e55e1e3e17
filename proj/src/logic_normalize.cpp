#include "ztl/logic.hpp"

#include <algorithm>
#include <cassert>

namespace ztl {

namespace detail {
std::string gconstraint_to_string(const GConstraint& c);
}

namespace {

int formula_forward_degree(const FormulaPtr& f) {
  int m = f->kind == Formula::Leaf ? forward_degree(f->cons) : 0;
  if (f->a) m = std::max(m, formula_forward_degree(f->a));
  if (f->b) m = std::max(m, formula_forward_degree(f->b));
  return m;
}

}  // namespace

GConstraint jump_constraint(const GConstraint& c, int M, int beta) {
  switch (c.kind) {
    case GConstraint::True:
    case GConstraint::False: return c;
    case GConstraint::Atom: {
      GAtom a = c.atom;
      auto shift = [&](GTerm t) {
        // X^i x_j becomes the history variable x_j^{i-M} = x_{(M-i)*beta + j}.
        int depth = M - t.prefixes;
        assert(depth >= 0);
        return GTerm{depth * beta + t.var, 0};
      };
      a.t1 = shift(a.t1);
      if (a.kind == GAtom::TermTerm) a.t2 = shift(a.t2);
      return GConstraint::make_atom(a);
    }
    default: {
      GConstraint r;
      r.kind = c.kind;
      for (const auto& k : c.kids) r.kids.push_back(jump_constraint(k, M, beta));
      return r;
    }
  }
}

namespace {

FormulaPtr bot_path_leaf() {
  GAtom a;
  a.kind = GAtom::TermTerm;
  a.t1 = GTerm{1, 0};
  a.t2 = GTerm{1, 0};
  a.cmp = Cmp::Lt;
  return make_leaf(GConstraint::make_atom(a));
}

// x_j^{-k} = X x_j^{-k-1} for all j in [1,beta], k in [0,N-1].
GConstraint history_copy_constraint(int beta, int N) {
  GConstraint conj;
  conj.kind = GConstraint::And;
  for (int j = 1; j <= beta; ++j)
    for (int k = 0; k < N; ++k) {
      GAtom a;
      a.kind = GAtom::TermTerm;
      a.t1 = GTerm{k * beta + j, 0};
      a.t2 = GTerm{(k + 1) * beta + j, 1};
      a.cmp = Cmp::Eq;
      conj.kids.push_back(GConstraint::make_atom(a));
    }
  if (conj.kids.size() == 1) return conj.kids[0];
  return conj;
}

NamedFormula simple_form_impl(const NamedFormula& input) {
  NamedFormula out = input;
  FormulaPtr f = to_nnf(desugar(input.f, input.tag));
  int N = formula_forward_degree(f);
  if (N <= 1) {
    out.f = f;
    return out;
  }
  const int beta = input.beta;
  const bool ctl = input.tag == LogicTag::Ctl;

  auto translate = [&](auto&& self, const FormulaPtr& g) -> FormulaPtr {
    switch (g->kind) {
      case Formula::Leaf: {
        // Path-position constraint: X^M jump(Theta, M).
        int M = forward_degree(g->cons);
        FormulaPtr r = make_leaf(jump_constraint(g->cons, M, beta));
        for (int i = 0; i < M; ++i) r = make_unary(Formula::Next, r);
        return r;
      }
      case Formula::Exists:
      case Formula::Forall: {
        if (ctl && g->a->kind == Formula::Leaf) {
          // (QX)^M (Q jump(Theta, M)) keeps the CTL shape.
          int M = forward_degree(g->a->cons);
          FormulaPtr r = make_unary(g->kind, make_leaf(jump_constraint(g->a->cons, M, beta)));
          for (int i = 0; i < M; ++i)
            r = make_unary(g->kind, make_unary(Formula::Next, r));
          return r;
        }
        return make_unary(g->kind, self(self, g->a));
      }
      default:
        if (g->b) return make_binary(g->kind, self(self, g->a), self(self, g->b));
        if (g->a) return make_unary(g->kind, self(self, g->a));
        return g;
    }
  };

  FormulaPtr core = translate(translate, f);
  FormulaPtr copies;
  GConstraint hist = history_copy_constraint(beta, N);
  switch (input.tag) {
    case LogicTag::Ltl:
      copies = make_binary(Formula::Release, bot_path_leaf(), make_leaf(hist));
      break;
    case LogicTag::Ctl: {
      FormulaPtr inner = make_unary(Formula::Forall, make_leaf(hist));
      FormulaPtr bot_state = make_unary(Formula::Exists, bot_path_leaf());
      copies = make_unary(Formula::Forall,
                          make_binary(Formula::Release, bot_state, inner));
      break;
    }
    case LogicTag::CtlStar:
      copies = make_unary(Formula::Forall,
                          make_binary(Formula::Release, bot_path_leaf(), make_leaf(hist)));
      break;
  }
  out.f = make_binary(Formula::And, core, copies);
  out.beta = beta * (N + 1);
  out.var_names.assign(static_cast<std::size_t>(out.beta) + 1, "");
  for (int j = 1; j <= beta; ++j) {
    out.var_names[static_cast<std::size_t>(j)] = input.var_names[static_cast<std::size_t>(j)];
    for (int k = 1; k <= N; ++k)
      out.var_names[static_cast<std::size_t>(k * beta + j)] =
          input.var_names[static_cast<std::size_t>(j)] + "_m" + std::to_string(k);
  }
  return out;
}

}  // namespace

NamedFormula ctl_simple_form(const NamedFormula& input) { return simple_form_impl(input); }
NamedFormula ltl_simple_form(const NamedFormula& input) { return simple_form_impl(input); }
NamedFormula ctlstar_simple_form(const NamedFormula& input) { return simple_form_impl(input); }

// --- Closure and consistency -------------------------------------------

int Closure::find(const FormulaPtr& f) const {
  auto it = index.find(to_string(f));
  return it == index.end() ? -1 : it->second;
}

namespace {

void closure_add(Closure& cl, const FormulaPtr& f) {
  std::string key = to_string(f);
  if (cl.index.count(key)) return;
  cl.index.emplace(std::move(key), static_cast<int>(cl.items.size()));
  cl.items.push_back(f);
}

void ctl_closure_walk(Closure& cl, const FormulaPtr& f) {
  closure_add(cl, f);
  switch (f->kind) {
    case Formula::And:
    case Formula::Or:
      ctl_closure_walk(cl, f->a);
      ctl_closure_walk(cl, f->b);
      return;
    case Formula::Exists:
    case Formula::Forall: {
      const FormulaPtr& body = f->a;
      switch (body->kind) {
        case Formula::Leaf: return;
        case Formula::Next:
          ctl_closure_walk(cl, body->a);
          return;
        case Formula::Until:
        case Formula::Release:
          closure_add(cl, make_unary(f->kind, make_unary(Formula::Next, f)));
          ctl_closure_walk(cl, body->a);
          ctl_closure_walk(cl, body->b);
          return;
        default: throw std::invalid_argument("ctl closure: not a simple-form CTL formula");
      }
    }
    default:
      throw std::invalid_argument("ctl closure: not a simple-form CTL state formula");
  }
}

void ltl_closure_walk(Closure& cl, const FormulaPtr& f) {
  closure_add(cl, f);
  switch (f->kind) {
    case Formula::Leaf: return;
    case Formula::And:
    case Formula::Or:
      ltl_closure_walk(cl, f->a);
      ltl_closure_walk(cl, f->b);
      return;
    case Formula::Next:
      ltl_closure_walk(cl, f->a);
      return;
    case Formula::Until:
    case Formula::Release:
      closure_add(cl, make_unary(Formula::Next, f));
      ltl_closure_walk(cl, f->a);
      ltl_closure_walk(cl, f->b);
      return;
    default:
      throw std::invalid_argument("ltl closure: not a simple-form LTL path formula");
  }
}

}  // namespace

Closure closure(const FormulaPtr& f, LogicTag tag) {
  Closure cl;
  if (tag == LogicTag::Ctl) ctl_closure_walk(cl, f);
  else ltl_closure_walk(cl, f);
  return cl;
}

bool propositionally_consistent(const Closure& cl, const Bitset& xs, LogicTag tag) {
  auto in = [&](const FormulaPtr& f) {
    int i = cl.find(f);
    return i >= 0 && xs.test(static_cast<std::size_t>(i));
  };
  for (std::size_t i = 0; i < cl.size(); ++i) {
    if (!xs.test(i)) continue;
    const FormulaPtr& f = cl.items[i];
    if (f->kind == Formula::And) {
      if (!in(f->a) || !in(f->b)) return false;
      continue;
    }
    if (f->kind == Formula::Or) {
      if (!in(f->a) && !in(f->b)) return false;
      continue;
    }
    if (tag == LogicTag::Ctl) {
      if ((f->kind == Formula::Exists || f->kind == Formula::Forall) &&
          (f->a->kind == Formula::Until || f->a->kind == Formula::Release)) {
        FormulaPtr expand = make_unary(f->kind, make_unary(Formula::Next, f));
        if (f->a->kind == Formula::Until) {
          if (!in(f->a->b) && !(in(f->a->a) && in(expand))) return false;
        } else {
          if (!in(f->a->b)) return false;
          if (!in(f->a->a) && !in(expand)) return false;
        }
      }
    } else {
      if (f->kind == Formula::Until) {
        FormulaPtr expand = make_unary(Formula::Next, f);
        if (!in(f->b) && !(in(f->a) && in(expand))) return false;
      } else if (f->kind == Formula::Release) {
        FormulaPtr expand = make_unary(Formula::Next, f);
        if (!in(f->b)) return false;
        if (!in(f->a) && !in(expand)) return false;
      }
    }
  }
  return true;
}

int DirectionMap::direction(const FormulaPtr& f) const {
  auto it = index.find(to_string(f));
  return it == index.end() ? -1 : it->second;
}

DirectionMap direction_map_for(const FormulaPtr& f, LogicTag tag) {
  if (tag != LogicTag::Ctl)
    throw std::invalid_argument("direction maps are defined for CTL(Z) formulas");
  Closure cl = closure(f, tag);
  DirectionMap dm;
  for (const auto& item : cl.items) {
    bool ex_next = item->kind == Formula::Exists && item->a->kind == Formula::Next;
    bool ex_cons = item->kind == Formula::Exists && item->a->kind == Formula::Leaf;
    if (ex_next || ex_cons) {
      dm.index.emplace(to_string(item), static_cast<int>(dm.targets.size()) + 1);
      dm.targets.push_back(item);
    }
  }
  return dm;
}

// --- CTL*(Z) special form -----------------------------------------------

namespace {

bool is_atomic_quantifier(const FormulaPtr& f) {
  // Q (x = 0) over a single unprimed variable.
  if (f->kind != Formula::Exists && f->kind != Formula::Forall) return false;
  if (f->a->kind != Formula::Leaf) return false;
  const GConstraint& c = f->a->cons;
  return c.kind == GConstraint::Atom && c.atom.kind == GAtom::TermConst &&
         c.atom.cmp == Cmp::Eq && c.atom.d == 0 && c.atom.t1.prefixes == 0;
}

bool contains_nonatomic_quantifier(const FormulaPtr& f) {
  if ((f->kind == Formula::Exists || f->kind == Formula::Forall) && !is_atomic_quantifier(f))
    return true;
  if (f->a && contains_nonatomic_quantifier(f->a)) return true;
  if (f->b && contains_nonatomic_quantifier(f->b)) return true;
  if (is_atomic_quantifier(f)) return false;
  return false;
}

// Replace the embedded Q'(y = 0) state formulas by bare (y = 0) leaves.
FormulaPtr strip_atomic_quantifiers(const FormulaPtr& f) {
  if (is_atomic_quantifier(f)) return f->a;
  if (f->b) return make_binary(f->kind, strip_atomic_quantifiers(f->a),
                               strip_atomic_quantifiers(f->b));
  if (f->a) return make_unary(f->kind, strip_atomic_quantifiers(f->a));
  return f;
}

FormulaPtr replace_all(const FormulaPtr& f, const std::string& key, const FormulaPtr& with) {
  if (to_string(f) == key) return with;
  if (f->b) return make_binary(f->kind, replace_all(f->a, key, with),
                               replace_all(f->b, key, with));
  if (f->a) return make_unary(f->kind, replace_all(f->a, key, with));
  return f;
}

// First (preorder) quantified subformula whose body's quantifiers are all
// atomic, excluding atomic quantifiers themselves.
FormulaPtr find_eligible(const FormulaPtr& f) {
  if ((f->kind == Formula::Exists || f->kind == Formula::Forall) && !is_atomic_quantifier(f) &&
      !contains_nonatomic_quantifier(f->a))
    return f;
  if (f->a)
    if (FormulaPtr r = find_eligible(f->a)) return r;
  if (f->b)
    if (FormulaPtr r = find_eligible(f->b)) return r;
  return nullptr;
}

FormulaPtr atom_var_eq0(int var) {
  GAtom a;
  a.kind = GAtom::TermConst;
  a.t1 = GTerm{var, 0};
  a.cmp = Cmp::Eq;
  a.d = 0;
  return make_leaf(GConstraint::make_atom(a));
}

FormulaPtr g_of(FormulaPtr body) {
  return make_binary(Formula::Release, bot_path_leaf(), std::move(body));
}

bool quantifier_free(const FormulaPtr& f) {
  if (f->kind == Formula::Exists || f->kind == Formula::Forall) return false;
  if (f->a && !quantifier_free(f->a)) return false;
  if (f->b && !quantifier_free(f->b)) return false;
  return true;
}

// Swap variables a and b in every term of a path formula.
FormulaPtr swap_vars(const FormulaPtr& f, int va, int vb) {
  auto swap_c = [&](auto&& self, const GConstraint& c) -> GConstraint {
    if (c.kind == GConstraint::Atom) {
      GAtom a = c.atom;
      auto sw = [&](GTerm& t) {
        if (t.var == va) t.var = vb;
        else if (t.var == vb) t.var = va;
      };
      sw(a.t1);
      if (a.kind == GAtom::TermTerm) sw(a.t2);
      return GConstraint::make_atom(a);
    }
    GConstraint r;
    r.kind = c.kind;
    for (const auto& k : c.kids) r.kids.push_back(self(self, k));
    return r;
  };
  if (f->kind == Formula::Leaf) return make_leaf(swap_c(swap_c, f->cons));
  if (f->b) return make_binary(f->kind, swap_vars(f->a, va, vb), swap_vars(f->b, va, vb));
  if (f->a) return make_unary(f->kind, swap_vars(f->a, va, vb));
  return f;
}

// Recognize conjunctions that already have the special shape, so that they
// pass through without fresh renamings.
bool try_recognize_special_form(const NamedFormula& nf, SpecialForm& out) {
  std::vector<FormulaPtr> conjuncts;
  auto flatten = [&](auto&& self, const FormulaPtr& f) -> void {
    if (f->kind == Formula::And) {
      self(self, f->a);
      self(self, f->b);
      return;
    }
    conjuncts.push_back(f);
  };
  flatten(flatten, nf.f);

  std::optional<int> anchor_var;
  std::vector<FormulaPtr> age, apath;
  for (const auto& c : conjuncts) {
    // E (x = 0) anchor.
    if (c->kind == Formula::Exists && c->a->kind == Formula::Leaf) {
      const GConstraint& g = c->a->cons;
      if (g.kind == GConstraint::Atom && g.atom.kind == GAtom::TermConst &&
          g.atom.cmp == Cmp::Eq && g.atom.d == 0 && g.atom.t1.prefixes == 0 && !anchor_var) {
        anchor_var = g.atom.t1.var;
        continue;
      }
      return false;
    }
    if (c->kind != Formula::Forall) return false;
    const FormulaPtr& body = c->a;
    // A G E Phi comes out of desugaring as A (false R (E Phi)).
    if (body->kind == Formula::Release && body->a->kind == Formula::Leaf &&
        body->a->cons.kind == GConstraint::Atom && body->b->kind == Formula::Exists) {
      const GConstraint& bot = body->a->cons;
      bool is_bot = bot.atom.kind == GAtom::TermTerm && bot.atom.cmp == Cmp::Lt &&
                    bot.atom.t1.var == bot.atom.t2.var &&
                    bot.atom.t1.prefixes == bot.atom.t2.prefixes;
      if (is_bot && quantifier_free(body->b->a) && is_simple_form(body->b->a)) {
        age.push_back(body->b->a);
        continue;
      }
    }
    if (quantifier_free(body) && is_simple_form(body)) {
      apath.push_back(body);
      continue;
    }
    return false;
  }

  out.beta = nf.beta;
  out.var_names = nf.var_names;
  if (!anchor_var) {
    // Inject a fresh always-zero anchor; satisfiability is unaffected.
    out.beta += 1;
    anchor_var = out.beta;
    out.var_names.push_back("y_anchor");
  }
  // The construction downstream anchors on x1 literally.
  if (*anchor_var != 1) {
    for (auto& p : age) p = swap_vars(p, *anchor_var, 1);
    for (auto& p : apath) p = swap_vars(p, *anchor_var, 1);
    std::swap(out.var_names[1], out.var_names[static_cast<std::size_t>(*anchor_var)]);
  }
  out.age = std::move(age);
  out.apath = std::move(apath);
  return true;
}

}  // namespace

SpecialForm ctlstar_special_form(const NamedFormula& input) {
  NamedFormula simple = ctlstar_simple_form(input);

  SpecialForm sf;
  if (try_recognize_special_form(simple, sf)) return sf;

  int next_var = simple.beta;
  std::vector<std::string> names = simple.var_names;
  auto fresh = [&](const std::string& base) {
    ++next_var;
    names.push_back(base + std::to_string(next_var - simple.beta));
    return next_var;
  };

  struct Eq {
    int var;
    Formula::Kind quant;
    FormulaPtr body;  // path formula, atomic quantifiers stripped
  };
  std::vector<Eq> eqs;

  FormulaPtr w = simple.f;
  while (FormulaPtr target = find_eligible(w)) {
    int y = fresh("y");
    FormulaPtr body = strip_atomic_quantifiers(target->a);
    eqs.push_back({y, target->kind, body});
    w = replace_all(w, to_string(target), make_unary(Formula::Exists, atom_var_eq0(y)));
  }

  // w is now a Boolean combination of atomic quantifiers.
  int z = fresh("y");
  FormulaPtr skeleton = strip_atomic_quantifiers(w);
  // z = 0 <-> skeleton, as one pure-constraint path formula under A G.
  FormulaPtr z0 = atom_var_eq0(z);
  FormulaPtr iff = make_binary(
      Formula::Or,
      make_binary(Formula::And, z0, skeleton),
      make_binary(Formula::And, make_unary(Formula::Not, z0), make_unary(Formula::Not, skeleton)));
  iff = desugar(iff, LogicTag::Ltl);  // merges into a maximal constraint leaf

  SpecialForm out;
  out.beta = next_var;
  out.var_names = std::move(names);
  for (const auto& eq : eqs) {
    FormulaPtr y0 = atom_var_eq0(eq.var);
    FormulaPtr not_y0 = make_leaf(GConstraint::negate(y0->cons));
    FormulaPtr neg_body = to_nnf(make_unary(Formula::Not, eq.body));
    if (eq.quant == Formula::Forall) {
      out.apath.push_back(g_of(make_binary(Formula::Or, not_y0, eq.body)));
      out.age.push_back(make_binary(Formula::Or, y0, neg_body));
    } else {
      out.age.push_back(make_binary(Formula::Or, not_y0, eq.body));
      out.apath.push_back(g_of(make_binary(Formula::Or, y0, neg_body)));
    }
  }
  out.apath.push_back(g_of(iff));

  // Anchor on x1 literally: swap the fresh anchor variable with variable 1.
  if (z != 1) {
    for (auto& p : out.age) p = swap_vars(p, z, 1);
    for (auto& p : out.apath) p = swap_vars(p, z, 1);
    std::swap(out.var_names[1], out.var_names[static_cast<std::size_t>(z)]);
  }
  return out;
}

}  // namespace ztl
