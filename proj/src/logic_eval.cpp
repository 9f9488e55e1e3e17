#include "ztl/logic.hpp"

#include <unordered_map>

namespace ztl {

namespace {

bool eval_gatom(const GAtom& a, const std::vector<Int>& z, const std::vector<Int>& zp) {
  auto val = [&](const GTerm& t) -> Int {
    if (t.prefixes > 1) throw std::invalid_argument("eval: term prefix depth > 1");
    const auto& v = t.prefixes ? zp : z;
    return v[static_cast<std::size_t>(t.var - 1)];
  };
  Int l = val(a.t1);
  Int r = a.kind == GAtom::TermTerm ? val(a.t2) : a.d;
  return cmp_of(l, r) == a.cmp;
}

bool eval_gconstraint(const GConstraint& c, const std::vector<Int>& z,
                      const std::vector<Int>& zp) {
  switch (c.kind) {
    case GConstraint::True: return true;
    case GConstraint::False: return false;
    case GConstraint::Atom: return eval_gatom(c.atom, z, zp);
    case GConstraint::Not: return !eval_gconstraint(c.kids[0], z, zp);
    case GConstraint::And:
      for (const auto& k : c.kids)
        if (!eval_gconstraint(k, z, zp)) return false;
      return true;
    case GConstraint::Or:
      for (const auto& k : c.kids)
        if (eval_gconstraint(k, z, zp)) return true;
      return false;
  }
  return false;
}

}  // namespace

bool eval_ltl_lasso(const FormulaPtr& phi, const LassoDataWord& w) {
  if (w.loop.empty()) throw std::invalid_argument("lasso loop must be nonempty");
  const std::size_t P = w.total();
  std::unordered_map<const Formula*, std::vector<char>> memo;

  auto eval = [&](auto&& self, const FormulaPtr& f) -> const std::vector<char>& {
    auto it = memo.find(f.get());
    if (it != memo.end()) return it->second;
    std::vector<char> v(P, 0);
    switch (f->kind) {
      case Formula::Leaf:
        for (std::size_t p = 0; p < P; ++p)
          v[p] = eval_gconstraint(f->cons, w.at(p), w.at(w.next(p)));
        break;
      case Formula::Not: {
        const auto& a = self(self, f->a);
        for (std::size_t p = 0; p < P; ++p) v[p] = !a[p];
        break;
      }
      case Formula::And: {
        const auto& a = self(self, f->a);
        const auto& b = self(self, f->b);
        for (std::size_t p = 0; p < P; ++p) v[p] = a[p] && b[p];
        break;
      }
      case Formula::Or: {
        const auto& a = self(self, f->a);
        const auto& b = self(self, f->b);
        for (std::size_t p = 0; p < P; ++p) v[p] = a[p] || b[p];
        break;
      }
      case Formula::Next: {
        const auto& a = self(self, f->a);
        for (std::size_t p = 0; p < P; ++p) v[p] = a[w.next(p)];
        break;
      }
      case Formula::Until: {
        const auto& a = self(self, f->a);
        const auto& b = self(self, f->b);
        // Least fixpoint over the lasso graph.
        bool changed = true;
        while (changed) {
          changed = false;
          for (std::size_t p = P; p-- > 0;) {
            char nv = b[p] || (a[p] && v[w.next(p)]);
            if (nv != v[p]) {
              v[p] = nv;
              changed = true;
            }
          }
        }
        break;
      }
      case Formula::Release: {
        const auto& a = self(self, f->a);
        const auto& b = self(self, f->b);
        std::fill(v.begin(), v.end(), 1);
        bool changed = true;
        while (changed) {
          changed = false;
          for (std::size_t p = P; p-- > 0;) {
            char nv = b[p] && (a[p] || v[w.next(p)]);
            if (nv != v[p]) {
              v[p] = nv;
              changed = true;
            }
          }
        }
        break;
      }
      default:
        throw std::invalid_argument("eval_ltl_lasso: not an LTL path formula (desugar first)");
    }
    return memo.emplace(f.get(), std::move(v)).first->second;
  };
  return eval(eval, phi)[0] != 0;
}

bool eval_ctl_regular_tree(const FormulaPtr& phi, const RegularDataTree& t) {
  if (t.degree < 1 || t.states.empty())
    throw std::invalid_argument("eval_ctl_regular_tree: degenerate tree");
  const std::size_t N = t.states.size();
  std::unordered_map<std::string, Bitset> memo;

  auto leaf_sat = [&](const GConstraint& c, bool forall) {
    Bitset v(N);
    for (std::size_t s = 0; s < N; ++s) {
      bool acc = forall;
      for (int d = 0; d < t.degree; ++d) {
        const auto& child = t.states[static_cast<std::size_t>(t.states[s].succ[static_cast<std::size_t>(d)])];
        bool h = eval_gconstraint(c, t.states[s].values, child.values);
        acc = forall ? (acc && h) : (acc || h);
      }
      if (acc) v.set(s);
    }
    return v;
  };
  auto step_exists = [&](const Bitset& in) {
    Bitset v(N);
    for (std::size_t s = 0; s < N; ++s)
      for (int d = 0; d < t.degree; ++d)
        if (in.test(static_cast<std::size_t>(t.states[s].succ[static_cast<std::size_t>(d)]))) {
          v.set(s);
          break;
        }
    return v;
  };
  auto step_forall = [&](const Bitset& in) {
    Bitset v(N);
    for (std::size_t s = 0; s < N; ++s) {
      bool all = true;
      for (int d = 0; d < t.degree; ++d)
        all = all && in.test(static_cast<std::size_t>(t.states[s].succ[static_cast<std::size_t>(d)]));
      if (all) v.set(s);
    }
    return v;
  };

  auto sat = [&](auto&& self, const FormulaPtr& f) -> Bitset {
    std::string key = to_string(f);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Bitset v(N);
    switch (f->kind) {
      case Formula::Not: {
        Bitset a = self(self, f->a);
        for (std::size_t s = 0; s < N; ++s)
          if (!a.test(s)) v.set(s);
        break;
      }
      case Formula::And: {
        v = self(self, f->a);
        v &= self(self, f->b);
        break;
      }
      case Formula::Or: {
        v = self(self, f->a);
        v |= self(self, f->b);
        break;
      }
      case Formula::Exists:
      case Formula::Forall: {
        bool forall = f->kind == Formula::Forall;
        const FormulaPtr& body = f->a;
        switch (body->kind) {
          case Formula::Leaf:
            v = leaf_sat(body->cons, forall);
            break;
          case Formula::Next: {
            Bitset a = self(self, body->a);
            v = forall ? step_forall(a) : step_exists(a);
            break;
          }
          case Formula::Until: {
            Bitset a = self(self, body->a);
            Bitset b = self(self, body->b);
            v = b;
            bool changed = true;
            while (changed) {
              changed = false;
              Bitset step = forall ? step_forall(v) : step_exists(v);
              for (std::size_t s = 0; s < N; ++s)
                if (!v.test(s) && a.test(s) && step.test(s)) {
                  v.set(s);
                  changed = true;
                }
            }
            break;
          }
          case Formula::Release: {
            Bitset a = self(self, body->a);
            Bitset b = self(self, body->b);
            v = b;
            bool changed = true;
            while (changed) {
              changed = false;
              Bitset step = forall ? step_forall(v) : step_exists(v);
              for (std::size_t s = 0; s < N; ++s)
                if (v.test(s) && !(b.test(s) && (a.test(s) || step.test(s)))) {
                  v.reset(s);
                  changed = true;
                }
            }
            break;
          }
          default:
            throw std::invalid_argument("eval_ctl_regular_tree: not simple-form CTL");
        }
        break;
      }
      default:
        throw std::invalid_argument("eval_ctl_regular_tree: not a CTL state formula");
    }
    memo.emplace(std::move(key), v);
    return v;
  };
  return sat(sat, phi).test(static_cast<std::size_t>(t.initial));
}

}  // namespace ztl
