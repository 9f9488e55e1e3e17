#include "ztl/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <cassert>
#include <deque>
#include <limits>
#include <sstream>

namespace ztl {

Constraint Constraint::conj(std::vector<Constraint> kids) {
  if (kids.empty()) return tru();
  if (kids.size() == 1) return std::move(kids.front());
  Constraint c;
  c.kind = And;
  c.kids = std::move(kids);
  return c;
}

Constraint Constraint::disj(std::vector<Constraint> kids) {
  if (kids.empty()) return fls();
  if (kids.size() == 1) return std::move(kids.front());
  Constraint c;
  c.kind = Or;
  c.kids = std::move(kids);
  return c;
}

static Int term_value(const Term& t, std::span<const Int> z, std::span<const Int> zp) {
  const auto& v = t.primes ? zp : z;
  return v[static_cast<std::size_t>(t.var - 1)];
}

bool eval_atom(const AtomicConstraint& a, std::span<const Int> z, std::span<const Int> zp) {
  Int lhs = term_value(a.t1, z, zp);
  Int rhs = a.kind == AtomicConstraint::TermTerm ? term_value(a.t2, z, zp) : a.d;
  return cmp_of(lhs, rhs) == a.cmp;
}

bool eval_constraint(const Constraint& c, std::span<const Int> z, std::span<const Int> zp) {
  switch (c.kind) {
    case Constraint::True: return true;
    case Constraint::False: return false;
    case Constraint::Atom: return eval_atom(c.atom, z, zp);
    case Constraint::Not: return !eval_constraint(c.kids[0], z, zp);
    case Constraint::And:
      for (const auto& k : c.kids)
        if (!eval_constraint(k, z, zp)) return false;
      return true;
    case Constraint::Or:
      for (const auto& k : c.kids)
        if (eval_constraint(k, z, zp)) return true;
      return false;
  }
  return false;
}

std::string to_string(const Term& t) {
  std::string s = "x" + std::to_string(t.var);
  if (t.primes) s += "'";
  return s;
}

static const char* cmp_str(Cmp c) {
  return c == Cmp::Lt ? " < " : (c == Cmp::Eq ? " = " : " > ");
}

std::string to_string(const AtomicConstraint& a) {
  std::string s = to_string(a.t1);
  s += cmp_str(a.cmp);
  if (a.kind == AtomicConstraint::TermTerm) s += to_string(a.t2);
  else s += std::to_string(a.d);
  return s;
}

std::string to_string(const Constraint& c) {
  switch (c.kind) {
    case Constraint::True: return "true";
    case Constraint::False: return "false";
    case Constraint::Atom: return to_string(c.atom);
    case Constraint::Not: return "!(" + to_string(c.kids[0]) + ")";
    case Constraint::And:
    case Constraint::Or: {
      std::string op = c.kind == Constraint::And ? " & " : " | ";
      std::string s = "(";
      for (std::size_t i = 0; i < c.kids.size(); ++i) {
        if (i) s += op;
        s += to_string(c.kids[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

ConstantContext::ConstantContext(int b, std::vector<Int> cs) : beta(b), constants(std::move(cs)) {
  if (beta < 1) throw std::invalid_argument("ConstantContext: beta must be >= 1");
  std::sort(constants.begin(), constants.end());
  constants.erase(std::unique(constants.begin(), constants.end()), constants.end());
  if (constants.empty()) constants.push_back(0);
}

int ConstantContext::flat(const Term& t) const {
  if (t.var < 1 || t.var > beta)
    throw std::invalid_argument("term variable x" + std::to_string(t.var) +
                                " out of range (beta=" + std::to_string(beta) + ")");
  if (t.primes < 0 || t.primes > 1)
    throw std::invalid_argument("term prefix depth must be 0 or 1 here");
  return (t.primes ? beta : 0) + t.var - 1;
}

std::optional<Cmp> Region::compare(const Region& o) const {
  if (kind == Exactly && o.kind == Exactly) return cmp_of(d, o.d);
  if (kind == BelowMin && o.kind != BelowMin) return Cmp::Lt;
  if (o.kind == BelowMin && kind != BelowMin) return Cmp::Gt;
  if (kind == AboveMax && o.kind != AboveMax) return Cmp::Gt;
  if (o.kind == AboveMax && kind != AboveMax) return Cmp::Lt;
  return std::nullopt;
}

std::size_t TypeConstraint::rel_index(int i, int j, int n) {
  assert(i < j && j < n);
  // Row-major upper triangle.
  return static_cast<std::size_t>(i) * n - static_cast<std::size_t>(i) * (i + 1) / 2 +
         static_cast<std::size_t>(j - i - 1);
}

Cmp TypeConstraint::rel_at(int i, int j) const {
  int n = static_cast<int>(regions.size());
  if (i == j) return Cmp::Eq;
  if (i < j) return rel[rel_index(i, j, n)];
  return flip(rel[rel_index(j, i, n)]);
}

bool TypeConstraint::operator<(const TypeConstraint& o) const {
  auto key = [](const TypeConstraint& t) {
    std::vector<int> k;
    k.reserve(t.regions.size() * 2 + t.rel.size());
    for (const auto& r : t.regions) {
      k.push_back(static_cast<int>(r.kind));
      k.push_back(r.kind == Region::Exactly ? static_cast<int>(r.d) : 0);
    }
    for (auto c : t.rel) k.push_back(static_cast<int>(c));
    return k;
  };
  return key(*this) < key(o);
}

std::size_t TypeConstraint::hash() const {
  std::size_t h = regions.size();
  for (const auto& r : regions) {
    hash_combine(h, static_cast<std::size_t>(r.kind));
    if (r.kind == Region::Exactly) hash_combine(h, std::hash<Int>{}(r.d));
  }
  for (auto c : rel) hash_combine(h, static_cast<std::size_t>(c));
  return h;
}

std::size_t HalfTypeKey::hash() const {
  std::size_t h = regions.size() + 17;
  for (const auto& r : regions) {
    hash_combine(h, static_cast<std::size_t>(r.kind));
    if (r.kind == Region::Exactly) hash_combine(h, std::hash<Int>{}(r.d));
  }
  for (auto c : rel) hash_combine(h, static_cast<std::size_t>(c));
  return h;
}

TypeUniverse::TypeUniverse(ConstantContext ctx) : ctx_(std::move(ctx)) {}

TypeId TypeUniverse::intern(const TypeConstraint& t) {
  std::lock_guard<std::mutex> lk(mu_);
  return types_.intern(t);
}

const TypeConstraint& TypeUniverse::get(TypeId id) const {
  std::lock_guard<std::mutex> lk(mu_);
  return types_.get(id);
}

std::size_t TypeUniverse::interned_count() const {
  std::lock_guard<std::mutex> lk(mu_);
  return types_.size();
}

// Enumerates satisfiable types as ordered weak orders (block chains) with a
// monotone region assignment per block. When `fixed` is set, the unprimed
// half is pinned and only completions are produced.
void TypeUniverse::enumerate_with_fixed_unprimed(const HalfTypeKey* fixed,
                                                 std::vector<TypeId>& out) {
  const int n = ctx_.term_count();
  const int beta = ctx_.beta;
  const Int d1 = ctx_.d1(), da = ctx_.dalpha();

  // Chain of blocks under construction; block = set of term indices.
  std::vector<std::vector<int>> blocks;
  std::vector<Region> block_region;  // assigned at the end per chain

  // For the fixed unprimed half: the required chain position ordering is
  // implied by the key's relations; we check consistency as we place terms.
  auto fixed_cmp = [&](int i, int j) -> Cmp {  // i,j unprimed flat ids, i != j
    if (i == j) return Cmp::Eq;
    if (i < j) return fixed->rel[TypeConstraint::rel_index(i, j, beta)];
    return flip(fixed->rel[TypeConstraint::rel_index(j, i, beta)]);
  };

  // Assign regions to the finished chain, monotonically.
  auto assign_regions = [&](auto&& self, std::size_t bi, Int next_exact_min) -> void {
    if (bi == blocks.size()) {
      // Emit the type.
      TypeConstraint t;
      t.regions.resize(static_cast<std::size_t>(n));
      std::vector<int> pos(static_cast<std::size_t>(n), -1);
      for (std::size_t b = 0; b < blocks.size(); ++b)
        for (int term : blocks[b]) {
          pos[static_cast<std::size_t>(term)] = static_cast<int>(b);
          t.regions[static_cast<std::size_t>(term)] = block_region[b];
        }
      t.rel.resize(static_cast<std::size_t>(n) * (n - 1) / 2);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          t.rel[TypeConstraint::rel_index(i, j, n)] = cmp_of(pos[i], pos[j]);
      if (fixed) {
        // Region consistency with the pinned half.
        bool ok = true;
        for (int i = 0; i < beta && ok; ++i)
          ok = t.regions[static_cast<std::size_t>(i)] == fixed->regions[static_cast<std::size_t>(i)];
        if (!ok) return;
      }
      out.push_back(intern(t));
      return;
    }
    bool prev_below = bi > 0 && block_region[bi - 1].kind == Region::BelowMin;
    bool has_fixed_region = false;
    Region forced;
    if (fixed) {
      for (int term : blocks[bi])
        if (term < beta) {
          forced = fixed->regions[static_cast<std::size_t>(term)];
          has_fixed_region = true;
          break;
        }
    }
    auto try_region = [&](Region r) {
      if (has_fixed_region && !(r == forced)) return;
      block_region[bi] = r;
      Int nm = next_exact_min;
      if (r.kind == Region::Exactly) nm = r.d + 1;
      if (r.kind == Region::AboveMax) nm = da + 1;
      self(self, bi + 1, nm);
    };
    // BelowMin allowed while nothing above it has been placed.
    if (bi == 0 || prev_below) try_region(Region::below());
    for (Int d = std::max(d1, next_exact_min); d <= da; ++d) try_region(Region::exactly(d));
    try_region(Region::above());
    // AboveMax repeats: handled because next_exact_min > da after an
    // AboveMax block, which kills Exactly choices but not AboveMax itself.
  };

  // Build chains by inserting terms 0..n-1; term k goes into an existing
  // block, or a new block at any chain position, subject to the pinned half.
  auto place = [&](auto&& self, int term) -> void {
    if (term == n) {
      block_region.assign(blocks.size(), Region::below());
      assign_regions(assign_regions, 0, std::numeric_limits<Int>::min());
      return;
    }
    // Consistency of a placement against the pinned unprimed chain.
    auto ok_existing = [&](int blk) -> bool {
      if (!fixed || term >= beta) return true;
      for (std::size_t b = 0; b < blocks.size(); ++b)
        for (int other : blocks[b])
          if (other < beta && fixed_cmp(term, other) != cmp_of(blk, static_cast<int>(b)))
            return false;
      return true;
    };
    auto ok_new = [&](int pos) -> bool {
      if (!fixed || term >= beta) return true;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        int shifted = static_cast<int>(b) >= pos ? static_cast<int>(b) + 1 : static_cast<int>(b);
        for (int other : blocks[b])
          if (other < beta && fixed_cmp(term, other) != cmp_of(pos, shifted)) return false;
      }
      return true;
    };
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (!ok_existing(static_cast<int>(b))) continue;
      blocks[b].push_back(term);
      self(self, term + 1);
      blocks[b].pop_back();
    }
    for (std::size_t p = 0; p <= blocks.size(); ++p) {
      if (!ok_new(static_cast<int>(p))) continue;
      blocks.insert(blocks.begin() + static_cast<std::ptrdiff_t>(p), {term});
      self(self, term + 1);
      blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(p));
    }
  };
  place(place, 0);
}

const std::vector<TypeId>& TypeUniverse::all() {
  {
    std::lock_guard<std::mutex> lk(mu_);
    if (all_built_) return all_;
  }
  std::vector<TypeId> out;
  enumerate_with_fixed_unprimed(nullptr, out);
  std::sort(out.begin(), out.end(), [this](TypeId a, TypeId b) { return get(a) < get(b); });
  std::lock_guard<std::mutex> lk(mu_);
  if (!all_built_) {
    all_ = std::move(out);
    all_built_ = true;
  }
  return all_;
}

TypeId TypeUniverse::type_of(std::span<const Int> z, std::span<const Int> zp) {
  const int n = ctx_.term_count();
  auto val = [&](int i) { return i < ctx_.beta ? z[static_cast<std::size_t>(i)]
                                               : zp[static_cast<std::size_t>(i - ctx_.beta)]; };
  TypeConstraint t;
  t.regions.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t.regions[static_cast<std::size_t>(i)] = Region::of(val(i), ctx_);
  t.rel.resize(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      t.rel[TypeConstraint::rel_index(i, j, n)] = cmp_of(val(i), val(j));
  return intern(t);
}

namespace {
enum class K3 : std::uint8_t { F, T, U };
K3 k3_not(K3 v) { return v == K3::T ? K3::F : (v == K3::F ? K3::T : K3::U); }
}  // namespace

bool TypeUniverse::entails_atom(TypeId tid, const AtomicConstraint& a) const {
  const TypeConstraint& t = get(tid);
  if (a.kind == AtomicConstraint::TermTerm) {
    return t.rel_at(ctx_.flat(a.t1), ctx_.flat(a.t2)) == a.cmp;
  }
  const Region& r = t.regions[static_cast<std::size_t>(ctx_.flat(a.t1))];
  switch (r.kind) {
    case Region::Exactly: return cmp_of(r.d, a.d) == a.cmp;
    case Region::BelowMin:
      if (a.d >= ctx_.d1()) return a.cmp == Cmp::Lt;
      return false;  // undetermined; conservative (handled 3-valued in entails)
    case Region::AboveMax:
      if (a.d <= ctx_.dalpha()) return a.cmp == Cmp::Gt;
      return false;
  }
  return false;
}

bool TypeUniverse::entails(TypeId tid, const Constraint& c) {
  const TypeConstraint& t = get(tid);
  auto atom3 = [&](const AtomicConstraint& a) -> K3 {
    if (a.kind == AtomicConstraint::TermTerm)
      return t.rel_at(ctx_.flat(a.t1), ctx_.flat(a.t2)) == a.cmp ? K3::T : K3::F;
    const Region& r = t.regions[static_cast<std::size_t>(ctx_.flat(a.t1))];
    switch (r.kind) {
      case Region::Exactly: return cmp_of(r.d, a.d) == a.cmp ? K3::T : K3::F;
      case Region::BelowMin:
        if (a.d >= ctx_.d1()) return a.cmp == Cmp::Lt ? K3::T : K3::F;
        return K3::U;  // value below d1, comparison to smaller constant open
      case Region::AboveMax:
        if (a.d <= ctx_.dalpha()) return a.cmp == Cmp::Gt ? K3::T : K3::F;
        return K3::U;
    }
    return K3::U;
  };
  auto eval3 = [&](auto&& self, const Constraint& k) -> K3 {
    switch (k.kind) {
      case Constraint::True: return K3::T;
      case Constraint::False: return K3::F;
      case Constraint::Atom: return atom3(k.atom);
      case Constraint::Not: return k3_not(self(self, k.kids[0]));
      case Constraint::And: {
        K3 acc = K3::T;
        for (const auto& kid : k.kids) {
          K3 v = self(self, kid);
          if (v == K3::F) return K3::F;
          if (v == K3::U) acc = K3::U;
        }
        return acc;
      }
      case Constraint::Or: {
        K3 acc = K3::F;
        for (const auto& kid : k.kids) {
          K3 v = self(self, kid);
          if (v == K3::T) return K3::T;
          if (v == K3::U) acc = K3::U;
        }
        return acc;
      }
    }
    return K3::U;
  };
  return eval3(eval3, c) == K3::T;
}

std::vector<TypeId> TypeUniverse::expansion(const Constraint& c) {
  std::vector<TypeId> out;
  for (TypeId t : all())
    if (entails(t, c)) out.push_back(t);
  return out;
}

bool TypeUniverse::agrees(TypeId t, TypeId u) const {
  const TypeConstraint& a = get(t);
  const TypeConstraint& b = get(u);
  const int beta = ctx_.beta;
  for (int i = 0; i < beta; ++i)
    if (!(a.regions[static_cast<std::size_t>(beta + i)] == b.regions[static_cast<std::size_t>(i)]))
      return false;
  for (int i = 0; i < beta; ++i)
    for (int j = i + 1; j < beta; ++j)
      if (a.rel_at(beta + i, beta + j) != b.rel_at(i, j)) return false;
  return true;
}

HalfTypeKey TypeUniverse::unprimed_key(TypeId t) const {
  const TypeConstraint& tc = get(t);
  const int beta = ctx_.beta;
  HalfTypeKey k;
  k.regions.assign(tc.regions.begin(), tc.regions.begin() + beta);
  k.rel.reserve(static_cast<std::size_t>(beta) * (beta - 1) / 2);
  for (int i = 0; i < beta; ++i)
    for (int j = i + 1; j < beta; ++j) k.rel.push_back(tc.rel_at(i, j));
  return k;
}

HalfTypeKey TypeUniverse::primed_key(TypeId t) const {
  const TypeConstraint& tc = get(t);
  const int beta = ctx_.beta;
  HalfTypeKey k;
  k.regions.assign(tc.regions.begin() + beta, tc.regions.end());
  k.rel.reserve(static_cast<std::size_t>(beta) * (beta - 1) / 2);
  for (int i = 0; i < beta; ++i)
    for (int j = i + 1; j < beta; ++j) k.rel.push_back(tc.rel_at(beta + i, beta + j));
  return k;
}

const std::vector<TypeId>& TypeUniverse::extensions_of(const HalfTypeKey& unprimed) {
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = ext_cache_.find(unprimed);
    if (it != ext_cache_.end()) return it->second;
  }
  std::vector<TypeId> out;
  enumerate_with_fixed_unprimed(&unprimed, out);
  std::sort(out.begin(), out.end(), [this](TypeId a, TypeId b) { return get(a) < get(b); });
  std::lock_guard<std::mutex> lk(mu_);
  return ext_cache_.emplace(unprimed, std::move(out)).first->second;
}

bool TypeUniverse::admits_zero_parent(TypeId t) {
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = zero_cache_.find(t);
    if (it != zero_cache_.end()) return it->second;
  }
  const TypeConstraint& tc = get(t);
  std::vector<AtomicConstraint> atoms;
  const int n = ctx_.term_count();
  auto term_of = [&](int flat) {
    return Term{(flat % ctx_.beta) + 1, flat >= ctx_.beta ? 1 : 0};
  };
  for (int i = 0; i < n; ++i) {
    const Region& r = tc.regions[static_cast<std::size_t>(i)];
    switch (r.kind) {
      case Region::Exactly:
        atoms.push_back(AtomicConstraint::term_const(term_of(i), Cmp::Eq, r.d));
        break;
      case Region::BelowMin:
        atoms.push_back(AtomicConstraint::term_const(term_of(i), Cmp::Lt, ctx_.d1()));
        break;
      case Region::AboveMax:
        atoms.push_back(AtomicConstraint::term_const(term_of(i), Cmp::Gt, ctx_.dalpha()));
        break;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      atoms.push_back(AtomicConstraint::term_term(term_of(i), tc.rel_at(i, j), term_of(j)));
  for (int i = 0; i < ctx_.beta; ++i)
    atoms.push_back(AtomicConstraint::term_const(Term{i + 1, 0}, Cmp::Eq, 0));
  bool ok = sat_conjunction(atoms, ctx_);
  std::lock_guard<std::mutex> lk(mu_);
  zero_cache_[t] = ok;
  return ok;
}

std::string TypeUniverse::render(TypeId t) const { return render(get(t)); }

std::string TypeUniverse::render(const TypeConstraint& tc) const {
  const int n = ctx_.term_count();
  // Chain elements: term equivalence classes plus the listed constants.
  struct Item {
    std::vector<int> terms;  // flat ids
    std::optional<Int> constant;
  };
  std::vector<Item> items;
  std::vector<int> cls(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    if (cls[static_cast<std::size_t>(i)] != -1) continue;
    Item it;
    for (int j = i; j < n; ++j)
      if (tc.rel_at(i, j) == Cmp::Eq) {
        cls[static_cast<std::size_t>(j)] = static_cast<int>(items.size());
        it.terms.push_back(j);
      }
    const Region& r = tc.regions[static_cast<std::size_t>(i)];
    if (r.kind == Region::Exactly) it.constant = r.d;
    items.push_back(std::move(it));
  }
  for (Int d : ctx_.constants) {
    bool merged = false;
    for (auto& it : items)
      if (it.constant && *it.constant == d) merged = true;
    if (!merged) {
      Item it;
      it.constant = d;
      items.push_back(std::move(it));
    }
  }
  auto before = [&](const Item& a, const Item& b) -> bool {
    if (!a.terms.empty() && !b.terms.empty())
      return tc.rel_at(a.terms[0], b.terms[0]) == Cmp::Lt;
    if (a.constant && b.constant && a.terms.empty() && b.terms.empty())
      return *a.constant < *b.constant;
    // term class vs pure constant
    const Item& tcl = a.terms.empty() ? b : a;
    const Item& ccl = a.terms.empty() ? a : b;
    const Region& r = tc.regions[static_cast<std::size_t>(tcl.terms[0])];
    Cmp c;
    switch (r.kind) {
      case Region::Exactly: c = cmp_of(r.d, *ccl.constant); break;
      case Region::BelowMin: c = Cmp::Lt; break;
      case Region::AboveMax: c = Cmp::Gt; break;
      default: c = Cmp::Eq; break;
    }
    return a.terms.empty() ? c == Cmp::Gt : c == Cmp::Lt;
  };
  std::stable_sort(items.begin(), items.end(), before);
  std::string out;
  auto beta = ctx_.beta;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += " < ";
    std::string elem;
    if (items[i].constant) elem = std::to_string(*items[i].constant);
    for (int term : items[i].terms) {
      if (!elem.empty()) elem += " = ";
      elem += "x" + std::to_string((term % beta) + 1) + (term >= beta ? "'" : "");
    }
    out += elem;
  }
  return out;
}

bool TypeUniverse::holds_slot_atom(TypeId t, int slot_a, Cmp c, int slot_b) const {
  const TypeConstraint& tc = get(t);
  auto region_of_slot = [&](int s) -> Region {
    if (s == kSlotD1) return Region::exactly(ctx_.d1());
    if (s == kSlotDalpha) return Region::exactly(ctx_.dalpha());
    return tc.regions[static_cast<std::size_t>(s)];
  };
  if (slot_a >= 0 && slot_b >= 0) return tc.rel_at(slot_a, slot_b) == c;
  if (slot_a < 0 && slot_b < 0)
    return cmp_of(slot_a == kSlotD1 ? ctx_.d1() : ctx_.dalpha(),
                  slot_b == kSlotD1 ? ctx_.d1() : ctx_.dalpha()) == c;
  // Mixed: compare a term's region against an anchor constant; always decided.
  Region ra = region_of_slot(slot_a), rb = region_of_slot(slot_b);
  auto cc = ra.compare(rb);
  if (cc) return *cc == c;
  // BelowMin vs BelowMin / AboveMax vs AboveMax cannot occur here: anchors are
  // Exactly regions, so one side is Exactly.
  return false;
}

// --- Conjunction satisfiability ----------------------------------------

bool sat_conjunction(const std::vector<AtomicConstraint>& atoms, const ConstantContext& ctx) {
  // Difference constraints over Z: x < y  ==>  x - y <= -1, etc.; constants
  // hang off a zero node. Satisfiable over Z iff no negative cycle.
  const int n = ctx.term_count();
  const int zero = n;
  struct Edge { int from, to; Int w; };  // dist[to] <= dist[from] + w
  std::vector<Edge> edges;
  auto add = [&](int a, int b, Int w) { edges.push_back({a, b, w}); };
  for (const auto& at : atoms) {
    int u = ctx.flat(at.t1);
    if (at.kind == AtomicConstraint::TermTerm) {
      int v = ctx.flat(at.t2);
      switch (at.cmp) {
        case Cmp::Lt: add(v, u, -1); break;          // u - v <= -1
        case Cmp::Eq: add(v, u, 0); add(u, v, 0); break;
        case Cmp::Gt: add(u, v, -1); break;
      }
    } else {
      switch (at.cmp) {
        case Cmp::Eq: add(zero, u, at.d); add(u, zero, -at.d); break;
        case Cmp::Lt: add(zero, u, at.d - 1); break;  // u <= d-1
        case Cmp::Gt: add(u, zero, -(at.d + 1)); break;  // u >= d+1
      }
    }
  }
  std::vector<Int> dist(static_cast<std::size_t>(n) + 1, 0);
  for (int pass = 0; pass <= n; ++pass) {
    bool changed = false;
    for (const auto& e : edges) {
      Int cand = dist[static_cast<std::size_t>(e.from)] + e.w;
      if (cand < dist[static_cast<std::size_t>(e.to)]) {
        dist[static_cast<std::size_t>(e.to)] = cand;
        changed = true;
      }
    }
    if (!changed) return true;
    if (pass == n) return false;  // still relaxing after n passes: negative cycle
  }
  return true;
}

std::vector<TypeConstraint> enumerate_types(const ConstantContext& ctx) {
  TypeUniverse u(ctx);
  std::vector<TypeConstraint> out;
  for (TypeId t : u.all()) out.push_back(u.get(t));
  return out;
}

TypeConstraint type_of(std::span<const Int> z, std::span<const Int> zp, const ConstantContext& ctx) {
  TypeUniverse u(ctx);
  return u.get(u.type_of(z, zp));
}

bool type_entails(const TypeConstraint& t, const Constraint& c, const ConstantContext& ctx) {
  TypeUniverse u(ctx);
  return u.entails(u.intern(t), c);
}

std::vector<TypeConstraint> type_expansion(const Constraint& c, const ConstantContext& ctx) {
  TypeUniverse u(ctx);
  std::vector<TypeConstraint> out;
  for (TypeId t : u.expansion(c)) out.push_back(u.get(t));
  return out;
}

bool agrees_primed_unprimed(const TypeConstraint& t, const TypeConstraint& u,
                            const ConstantContext& ctx) {
  TypeUniverse un(ctx);
  return un.agrees(un.intern(t), un.intern(u));
}

double sattypes_bound(const ConstantContext& ctx) {
  double width = static_cast<double>(ctx.dalpha() - ctx.d1()) + 3.0;
  double b = static_cast<double>(ctx.beta);
  return std::pow(width, 2.0 * b) * std::pow(3.0, 2.0 * b * b);
}

}  // namespace ztl
