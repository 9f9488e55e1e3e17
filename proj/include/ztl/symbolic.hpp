#pragma once

// The finite-alphabet layer over Sigma x sattypes: abstraction of data
// trees, the branch-condition automata (A_B and its determinized star
// chain), and finite Rabin tree automata with intersection.

#include <optional>
#include <set>

#include "ztl/word_automata.hpp"

namespace ztl {

struct SymLetter {
  int letter = 0;
  TypeId type = 0;
  bool operator==(const SymLetter& o) const {
    return letter == o.letter && type == o.type;
  }
};

// Finite pointed machine denoting an infinite symbolic tree.
struct RegularSymbolicTree {
  TypeUniversePtr types;
  int degree = 1;
  struct State {
    SymLetter label;
    std::vector<int> succ;
  };
  std::vector<State> states;
  int initial = 0;
};

// Abstraction of a regular data tree: every node is typed against its
// parent (the root against the zero vector). States are (parent, state)
// pairs of the input machine.
RegularSymbolicTree abstract_tree(const RegularDataTree& t, TypeUniversePtr types);

// Every child's unprimed half agrees with its parent's primed half.
bool locally_consistent(const RegularSymbolicTree& t);

// All simple lassos (simple cycles with simple entry paths) of the machine,
// as symbolic words; used to check branch-level properties of small trees.
std::vector<SymbolicLasso> machine_lassos(const RegularSymbolicTree& t, std::size_t cap = 4096);

// --- Branch condition automata -------------------------------------------

// Language-preserving trim of a Buchi word automaton.
WordAutomaton trim_buchi(const WordAutomaton& a);

// Buchi word automaton accepting exactly the symbolic words that violate
// the forbidden-chain condition at degree 1: a pointwise <-related pair of
// a path map and a reverse path map, one of them strict.
WordAutomaton build_AB(TypeUniversePtr types, int num_letters = 1);

// Deterministic automaton over Sigma x sattypes with letters compressed
// into classes of identical transition behaviour.
struct ClassedDetAutomaton {
  TypeUniversePtr types;
  int num_letters = 1;
  int num_classes = 0;
  std::vector<int> class_of;  // [letter * num_types + type] -> class
  std::size_t num_types = 0;
  int num_states = 0;
  int initial = 0;
  std::vector<std::vector<int>> succ;  // [state][class] -> state
  std::size_t pair_count = 0;
  std::vector<Bitset> state_L, state_U;  // per state, bits over pairs
  Acceptance::Kind reading = Acceptance::Rabin;
  std::vector<std::string> state_names;

  int cls(int letter, TypeId t) const {
    return class_of[static_cast<std::size_t>(letter) * num_types + static_cast<std::size_t>(t)];
  }
  int step(int state, int letter, TypeId t) const {
    return succ[static_cast<std::size_t>(state)][static_cast<std::size_t>(cls(letter, t))];
  }
};

// Deterministic run of a classed automaton on a symbolic lasso, evaluated
// exactly on the set of states visited infinitely often.
bool classed_lasso_accepts(const ClassedDetAutomaton& a, const SymbolicLasso& w);

// Expand a classed automaton into an explicit WordAutomaton (one transition
// per state and letter-type pair). Intended for small universes and dumps.
WordAutomaton expand_classed(const ClassedDetAutomaton& a);

// Classed-core Safra determinization used by both the public operation and
// the star chain.
ClassedDetAutomaton safra_determinize_classed(const WordAutomaton& buchi,
                                              const BuildLimits& limits,
                                              std::vector<SafraTree>* trees_out = nullptr,
                                              bool check_invariants = true);

// IAR conversion on a classed deterministic automaton read as Streett.
ClassedDetAutomaton streett_to_rabin_classed(const ClassedDetAutomaton& streett,
                                             const BuildLimits& limits);

// Lazily determinized Buchi automaton: Safra successors are computed per
// (state, letter class) on demand and memoized.
class LazySafra {
 public:
  LazySafra(const WordAutomaton& buchi, const BuildLimits& limits);

  int initial() const { return 0; }
  int succ(int state, int letter, TypeId ty);
  const SafraTree& tree(int state) const { return trees_[static_cast<std::size_t>(state)]; }
  std::size_t discovered() const { return trees_.size(); }
  int locations() const { return q_; }
  // Names marked in some tree discovered so far.
  std::vector<int> marked_names() const;

 private:
  friend class LazyStar;
  int intern(SafraTree t);
  int q_ = 0;
  Bitset acc_;
  BuildLimits limits_;
  std::size_t num_types_ = 0;
  int num_letters_ = 1;
  std::vector<int> class_of_;
  std::vector<std::vector<Bitset>> class_adj_;
  std::vector<SafraTree> trees_;
  std::map<std::string, int> id_of_;
  std::vector<std::vector<int>> succ_;  // [state][class], -1 when not computed
};

// The word-level star automaton A_R, lazily: the Safra automaton read as
// the Streett complement restricted to a fixed set of live names, converted
// to deterministic Rabin with index appearance records.
class LazyStar {
 public:
  LazyStar(std::shared_ptr<LazySafra> safra, std::vector<int> kept_names);

  int initial();
  int succ(int state, int letter, TypeId ty);
  std::size_t num_pairs() const { return kept_.size() + 1; }
  bool in_L(int state, std::size_t pair) const;  // e == pair+1
  bool in_U(int state, std::size_t pair) const;  // f < pair+1
  std::size_t discovered() const { return states_.size(); }
  std::string state_name(int state) const;
  // Names marked by visited trees but missing from the kept set; nonempty
  // means the pruning premise failed and the caller must rebuild.
  const std::set<int>& kept_violations() const { return violations_; }

 private:
  struct IarState {
    int sa;
    std::vector<std::uint8_t> sigma;
    int e, f;
  };
  int intern(IarState s);
  bool name_marked(int sa, int name) const;
  bool name_missing(int sa, int name) const;

  std::shared_ptr<LazySafra> safra_;
  std::vector<int> kept_;  // live names; pair M = kept_.size()+1 is (Q,Q)
  std::set<int> kept_set_;
  std::set<int> violations_;
  std::vector<IarState> states_;
  std::map<std::string, int> id_of_;
};

// The star chain: trimmed branch automaton, lazy determinization, and the
// IAR stage fixed after a reachability pass has discovered the live names.
struct StarChain {
  TypeUniversePtr types;
  int num_letters = 1;
  int degree = 1;
  std::shared_ptr<LazySafra> safra;
  std::shared_ptr<LazyStar> star;  // set by prepare()
  std::size_t ab_states = 0;

  // Fix the Streett pairs from the names discovered so far.
  void prepare();
  std::size_t pair_bound() const {
    std::size_t b = static_cast<std::size_t>(types->beta());
    return 8 * (b + 2) * (b + 2) + 3;
  }
};
StarChain build_Astar(TypeUniversePtr types, int num_letters, int degree,
                      const BuildLimits& limits = {});

// Acceptance of a symbolic lasso by the (word-level) star automaton A_R.
bool star_word_accepts(TypeUniversePtr types, int num_letters, const SymbolicLasso& w,
                       const BuildLimits& limits = {});

// --- Explicit finite Rabin tree automata ----------------------------------

struct FiniteTreeAutomaton {
  TypeUniversePtr types;
  int num_letters = 1;
  int degree = 1;
  int num_states = 0;
  std::vector<int> initial;
  struct Transition {
    int src;
    SymLetter sym;
    std::vector<int> children;  // size degree
  };
  std::vector<Transition> transitions;
  std::vector<RabinPair> pairs;  // Rabin acceptance over states
  std::vector<std::string> state_names;
};

// n-ary intersection with the round-robin memory map f; the number of
// pairs of the product is the product of the pair counts.
FiniteTreeAutomaton intersect_finite_rabin(const std::vector<FiniteTreeAutomaton>& as,
                                           const BuildLimits& limits = {});

// --- Constraint graph over a finite prefix --------------------------------

// Element of the graph: a node of the prefix paired with a variable or one
// of the two constant anchors.
struct GctGraph {
  struct Element {
    int node = 0;      // prefix node id (0 = root; -1 = virtual parent)
    int slot = 0;      // 0..beta-1 variable, -1 = d1 anchor, -2 = dalpha anchor
  };
  std::vector<Element> elements;
  // edges (i, cmp, j): value(i) cmp value(j), cmp in {Lt, Eq}
  struct Edge {
    int a = 0, b = 0;
    Cmp cmp = Cmp::Eq;
  };
  std::vector<Edge> edges;
  // region membership per element: Exactly(d) | BelowMin | AboveMax
  std::vector<Region> region;
  std::vector<std::string> node_names;  // per prefix node, e.g. "eps", "0", "11"
  int beta = 1;
};

// Prefix of the machine-unfolded symbolic tree to the given depth, with the
// rules (VAR), (P1)-(P4), (CONS) plus the region-derived mixed edges, and
// the virtual zero parent when requested.
GctGraph build_gct_prefix(const RegularSymbolicTree& t, int depth, bool with_virtual_root);

std::string gct_to_dot(const GctGraph& g);

}  // namespace ztl
