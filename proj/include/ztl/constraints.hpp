#pragma once

// The concrete domain (Z, <, =, =_d): atomic and Boolean constraints over
// current/next variables, satisfiability of conjunctions, and the finite
// alphabet of satisfiable complete order types with entailment and
// agreement relations.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ztl/util.hpp"

namespace ztl {

using Int = std::int64_t;

// x_i (primes == 0) or x'_i (primes == 1); var is 1-based.
struct Term {
  int var = 1;
  int primes = 0;
};

enum class Cmp : std::uint8_t { Lt, Eq, Gt };

inline Cmp flip(Cmp c) {
  return c == Cmp::Lt ? Cmp::Gt : (c == Cmp::Gt ? Cmp::Lt : Cmp::Eq);
}
inline Cmp cmp_of(Int a, Int b) {
  return a < b ? Cmp::Lt : (a == b ? Cmp::Eq : Cmp::Gt);
}

// t1 ~ t2 or t ~ d. The source language only has t < t', t = t' and t = d;
// the Gt/const-order forms appear internally (flipped parses, region atoms).
struct AtomicConstraint {
  enum Kind : std::uint8_t { TermTerm, TermConst } kind = TermTerm;
  Term t1, t2;
  Cmp cmp = Cmp::Eq;
  Int d = 0;

  static AtomicConstraint term_term(Term a, Cmp c, Term b) {
    AtomicConstraint r;
    r.kind = TermTerm; r.t1 = a; r.t2 = b; r.cmp = c;
    return r;
  }
  static AtomicConstraint term_const(Term a, Cmp c, Int d) {
    AtomicConstraint r;
    r.kind = TermConst; r.t1 = a; r.cmp = c; r.d = d;
    return r;
  }
};

// Boolean tree over atomic constraints.
struct Constraint {
  enum Kind : std::uint8_t { True, False, Atom, Not, And, Or } kind = True;
  AtomicConstraint atom;            // Atom
  std::vector<Constraint> kids;     // Not: 1, And/Or: >= 2

  static Constraint tru() { return Constraint{}; }
  static Constraint fls() { Constraint c; c.kind = False; return c; }
  static Constraint make_atom(AtomicConstraint a) {
    Constraint c; c.kind = Atom; c.atom = a; return c;
  }
  static Constraint negate(Constraint c) {
    Constraint r; r.kind = Not; r.kids.push_back(std::move(c)); return r;
  }
  static Constraint conj(std::vector<Constraint> kids);
  static Constraint disj(std::vector<Constraint> kids);
};

// Evaluation under concrete values: z = unprimed vector, zp = primed vector.
bool eval_atom(const AtomicConstraint& a, std::span<const Int> z, std::span<const Int> zp);
bool eval_constraint(const Constraint& c, std::span<const Int> z, std::span<const Int> zp);

std::string to_string(const Term& t);
std::string to_string(const AtomicConstraint& a);
std::string to_string(const Constraint& c);

// Variable count plus the sorted constant pool; at least one constant is
// always present (0 is injected when a source object mentions none).
struct ConstantContext {
  int beta = 1;
  std::vector<Int> constants;  // sorted, distinct, nonempty

  ConstantContext() : constants{0} {}
  ConstantContext(int b, std::vector<Int> cs);

  Int d1() const { return constants.front(); }
  Int dalpha() const { return constants.back(); }
  int term_count() const { return 2 * beta; }
  // Flat term index: unprimed x_i -> i-1, primed x'_i -> beta + i - 1.
  int flat(const Term& t) const;
  bool operator==(const ConstantContext& o) const {
    return beta == o.beta && constants == o.constants;
  }
};

// Position of a value relative to [d1, dalpha].
struct Region {
  enum Kind : std::uint8_t { BelowMin, Exactly, AboveMax } kind = Exactly;
  Int d = 0;  // meaningful for Exactly only

  static Region below() { return Region{BelowMin, 0}; }
  static Region above() { return Region{AboveMax, 0}; }
  static Region exactly(Int d) { return Region{Exactly, d}; }
  static Region of(Int v, const ConstantContext& ctx) {
    if (v < ctx.d1()) return below();
    if (v > ctx.dalpha()) return above();
    return exactly(v);
  }
  bool operator==(const Region& o) const {
    return kind == o.kind && (kind != Exactly || d == o.d);
  }
  // Order on region levels: BelowMin < Exactly(d) < Exactly(d') < AboveMax.
  // BelowMin/AboveMax against themselves are incomparable (returns nullopt).
  std::optional<Cmp> compare(const Region& o) const;
};

// A satisfiable complete description of the 2*beta terms: per-term region
// plus all pairwise order relations, stored canonically (strict upper
// triangle, x=y once, x<y and y>x identified).
struct TypeConstraint {
  std::vector<Region> regions;   // size 2*beta, flat term order
  std::vector<Cmp> rel;          // upper triangle, index via rel_index

  static std::size_t rel_index(int i, int j, int n);  // requires i < j
  Cmp rel_at(int i, int j) const;                     // any i != j

  bool operator==(const TypeConstraint& o) const {
    return regions == o.regions && rel == o.rel;
  }
  bool operator<(const TypeConstraint& o) const;
  std::size_t hash() const;
};

using TypeId = int;

// Half of a type: regions and relations of either the unprimed or the
// primed terms, used as the glue key for local consistency.
struct HalfTypeKey {
  std::vector<Region> regions;  // size beta
  std::vector<Cmp> rel;         // upper triangle over beta terms
  bool operator==(const HalfTypeKey& o) const {
    return regions == o.regions && rel == o.rel;
  }
  std::size_t hash() const;
};

// Owns a context and interns types; enumeration helpers are generative so
// large universes are only materialized when actually requested.
class TypeUniverse {
 public:
  explicit TypeUniverse(ConstantContext ctx);

  const ConstantContext& ctx() const { return ctx_; }
  int beta() const { return ctx_.beta; }

  TypeId intern(const TypeConstraint& t);
  const TypeConstraint& get(TypeId id) const;
  std::size_t interned_count() const;

  // All satisfiable types, in a deterministic canonical order (cached).
  const std::vector<TypeId>& all();

  // The unique type satisfied by (z, z').
  TypeId type_of(std::span<const Int> z, std::span<const Int> zp);

  // Exact for constants within [d1, dalpha]; out-of-range equalities that a
  // coarse region cannot decide evaluate conservatively (never an error).
  bool entails(TypeId t, const Constraint& c);
  bool entails_atom(TypeId t, const AtomicConstraint& a) const;

  // { T in sattypes | T entails c }; empty means c is unsatisfiable.
  std::vector<TypeId> expansion(const Constraint& c);

  // primed(t) agrees with unprimed(u) modulo the x_i <-> x'_i renaming.
  bool agrees(TypeId t, TypeId u) const;

  HalfTypeKey unprimed_key(TypeId t) const;
  HalfTypeKey primed_key(TypeId t) const;

  // All types whose unprimed half equals the given key (cached, generative).
  const std::vector<TypeId>& extensions_of(const HalfTypeKey& unprimed);

  // Whether some valuation with all unprimed terms = 0 satisfies the type.
  bool admits_zero_parent(TypeId t);

  // Sorted-chain rendering, e.g. "0 = x1 = x2 < x1' < x2'".
  std::string render(TypeId t) const;
  std::string render(const TypeConstraint& t) const;

  // Atom truth where operands may be the constant anchors d1/dalpha; always
  // determined. Slots: 0..beta-1 unprimed, beta..2beta-1 primed, -1 = d1
  // anchor, -2 = dalpha anchor.
  bool holds_slot_atom(TypeId t, int slot_a, Cmp c, int slot_b) const;

  static constexpr int kSlotD1 = -1;
  static constexpr int kSlotDalpha = -2;

 private:
  struct TypeHash {
    std::size_t operator()(const TypeConstraint& t) const { return t.hash(); }
  };
  struct HalfHash {
    std::size_t operator()(const HalfTypeKey& k) const { return k.hash(); }
  };

  void enumerate_with_fixed_unprimed(const HalfTypeKey* fixed,
                                     std::vector<TypeId>& out);

  ConstantContext ctx_;
  mutable std::mutex mu_;
  Interner<TypeConstraint, TypeHash> types_;
  std::vector<TypeId> all_;
  bool all_built_ = false;
  std::unordered_map<HalfTypeKey, std::vector<TypeId>, HalfHash> ext_cache_;
  std::unordered_map<TypeId, bool> zero_cache_;
};

using TypeUniversePtr = std::shared_ptr<TypeUniverse>;

// --- Module operations ------------------------------------------------

// Satisfiability over Z of a conjunction of atomic constraints, by
// negative-cycle detection on the difference-constraint graph.
bool sat_conjunction(const std::vector<AtomicConstraint>& atoms,
                     const ConstantContext& ctx);

// Spec-shaped wrappers over TypeUniverse.
std::vector<TypeConstraint> enumerate_types(const ConstantContext& ctx);
TypeConstraint type_of(std::span<const Int> z, std::span<const Int> zp,
                       const ConstantContext& ctx);
bool type_entails(const TypeConstraint& t, const Constraint& c,
                  const ConstantContext& ctx);
std::vector<TypeConstraint> type_expansion(const Constraint& c,
                                           const ConstantContext& ctx);
bool agrees_primed_unprimed(const TypeConstraint& t, const TypeConstraint& u,
                            const ConstantContext& ctx);

// Lemma-style cardinality bound ((dalpha-d1)+3)^(2 beta) * 3^(2 beta^2),
// saturating at numeric limits.
double sattypes_bound(const ConstantContext& ctx);

}  // namespace ztl
