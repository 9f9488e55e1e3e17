#pragma once

// Word constraint automata (degree 1): LTL(Z) translation, type-granular
// normalization, Safra determinization into deterministic Rabin automata,
// Streett/Rabin conversions, and lasso membership.

#include <functional>
#include <optional>
#include <variant>

#include "ztl/constraints.hpp"
#include "ztl/logic.hpp"

namespace ztl {

using Guard = std::variant<Constraint, TypeId>;

bool guard_is_type(const Guard& g);
std::string guard_to_string(const Guard& g, const TypeUniverse& u);
bool guard_holds(const Guard& g, TypeUniverse& u, std::span<const Int> z,
                 std::span<const Int> zp);

struct RabinPair {
  Bitset L, U;
};

struct Acceptance {
  enum Kind : std::uint8_t { Buchi, GenBuchi, Rabin, Streett } kind = Buchi;
  std::vector<Bitset> sets;       // Buchi: 1 set; GenBuchi: k sets
  std::vector<RabinPair> pairs;   // Rabin/Streett
};

struct WordAutomaton {
  TypeUniversePtr types;
  std::vector<std::string> letters = {"#"};  // finite alphabet Sigma
  int num_states = 0;
  std::vector<int> initial;
  struct Transition {
    int src;
    int letter;
    Guard guard;
    int dst;
  };
  std::vector<Transition> transitions;
  Acceptance acc;
  bool deterministic = false;
  std::vector<std::string> state_names;

  const ConstantContext& ctx() const { return types->ctx(); }
  std::vector<std::vector<std::size_t>> transitions_by_src() const;
};

// Ultimately periodic word over Sigma x sattypes.
struct SymbolicLasso {
  struct Letter {
    int letter = 0;
    TypeId type = 0;
  };
  std::vector<Letter> prefix;
  std::vector<Letter> loop;  // nonempty

  std::size_t total() const { return prefix.size() + loop.size(); }
  const Letter& at(std::size_t i) const {
    return i < prefix.size() ? prefix[i] : loop[(i - prefix.size()) % loop.size()];
  }
  std::size_t next(std::size_t i) const {
    return i + 1 < total() ? i + 1 : prefix.size();
  }
};

// Tableau translation of a simple-form LTL(Z) path formula into a
// generalized-Buchi word constraint automaton over the given universe.
WordAutomaton ltl_to_gbwca(const FormulaPtr& phi, TypeUniversePtr types,
                           const BuildLimits& limits = {});

// Generalized Buchi to Buchi with copy counters (identity for one set).
WordAutomaton degeneralize_word(const WordAutomaton& a);

// Replace every constraint guard by its sattypes expansion.
WordAutomaton normalize_to_types(const WordAutomaton& a);

// Membership of the concrete word u.v^omega, any acceptance kind.
bool lasso_membership(const WordAutomaton& a, const LassoDataWord& w);

// Membership of a symbolic lasso; requires type guards.
bool lasso_membership_symbolic(const WordAutomaton& a, const SymbolicLasso& w);

// Ordered named labeled marked tree over a location set; the state of a
// determinized automaton.
struct SafraTree {
  struct Node {
    int name = 1;       // unique in [1, 2|Q|]
    Bitset label;       // nonempty except for the dead root
    bool marked = false;
    std::vector<int> children;  // ordered, oldest first (indices into nodes)
  };
  std::vector<Node> nodes;  // nodes[0] is the root
  bool operator==(const SafraTree& o) const;
  std::size_t hash() const;
  std::string encode() const;

  Bitset present_names(int limit) const;
  Bitset marked_names(int limit) const;
};

// Structural invariants: ordering, unique names in range, nonempty labels
// (dead root excepted), label strictly contains the union of child labels,
// sibling disjointness, and the node-count bound.
void check_safra_invariants(const SafraTree& t, int num_locations);

struct SafraResult {
  WordAutomaton automaton;  // deterministic, complete, Rabin
  std::vector<SafraTree> trees;  // per state
};

// Safra determinization of a Buchi automaton with type guards, keyed on
// (letter, type) pairs; produces 2|Q| Rabin pairs (L_name, U_name).
SafraResult safra_determinize(const WordAutomaton& a, const BuildLimits& limits = {});

// Reinterpret a deterministic, complete Rabin automaton as the Streett
// automaton of the complement language (same structure).
WordAutomaton rabin_as_streett_complement(const WordAutomaton& a);

// Drop acceptance pairs that no run can distinguish: Streett pairs whose L
// never meets the reachable states (vacuously true conjuncts) and Rabin
// pairs whose L never meets the reachable states (unusable disjuncts).
void prune_vacuous_pairs(WordAutomaton& a);

// Deterministic Streett to deterministic Rabin via index appearance
// records: states Q x Perm(N+1) x [1,N+1]^2 with the extra (Q,Q) pair.
WordAutomaton streett_to_rabin(const WordAutomaton& a, const BuildLimits& limits = {});

// Standard pair-guessing Rabin-to-Buchi conversion, |Q|*(N+1) states.
WordAutomaton rabin_word_to_buchi(const WordAutomaton& a);

// Nonemptiness of a Buchi word constraint automaton through the symbolic
// layer: consistency automaton x star automaton, graph search, and an
// ultimately periodic symbolic witness on success.
struct WordEmptinessResult {
  bool sat = false;
  std::optional<SymbolicLasso> witness;
  // stage statistics for reporting
  std::size_t cons_states = 0;
  std::size_t star_states = 0;
  std::size_t star_pairs = 0;
  std::size_t product_states = 0;
};
WordEmptinessResult word_emptiness(const WordAutomaton& a, const BuildLimits& limits = {});

}  // namespace ztl
