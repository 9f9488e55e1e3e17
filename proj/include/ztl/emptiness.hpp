#pragma once

// Nonemptiness of Rabin tree automata via index appearance records and
// parity games, the top-level solve pipeline, and witness extraction.

#include <map>

#include "ztl/tree_automata.hpp"

namespace ztl {

// --- Parity games -----------------------------------------------------------

// Min-parity: player Even wins a play iff the least priority seen
// infinitely often is even.
struct ParityGame {
  struct Vertex {
    bool even_owns = true;
    int priority = 1;
    std::vector<int> succ;
  };
  std::vector<Vertex> vertices;
};

struct ParitySolution {
  std::vector<bool> even_wins;
  std::vector<int> strategy;  // chosen successor for the owner's vertices (-1 elsewhere)
};

ParitySolution solve_parity(const ParityGame& g);

// Exhaustive strategy-enumeration reference solver for tiny games.
ParitySolution solve_parity_brute(const ParityGame& g);

// --- Generic Rabin games over lazily generated arenas -----------------------

// Eve resolves letters, moves and per-direction candidates; Adam picks
// directions. States are opaque dense ids managed by the generator.
struct ArenaMove {
  SymLetter sym;
  std::vector<std::vector<int>> cand;  // per direction, nonempty candidate lists
};

class TreeArena {
 public:
  virtual ~TreeArena() = default;
  virtual int degree() const = 0;
  virtual std::vector<int> initials() = 0;
  virtual std::vector<ArenaMove> moves(int state) = 0;
  virtual std::size_t num_pairs() const = 0;
  virtual bool in_L(int state, std::size_t pair) = 0;
  virtual bool in_U(int state, std::size_t pair) = 0;
  virtual std::size_t discovered() const = 0;
  virtual std::string state_name(int) { return ""; }
};

struct EmptinessResult {
  bool nonempty = false;
  // Winning machine: one state per (arena state, record) pair on the chosen
  // strategy, labels from the chosen moves.
  RegularSymbolicTree witness;  // meaningful when nonempty
  std::size_t arena_vertices = 0;
  std::size_t memory_values = 0;
  bool complete = true;  // false when the state cap cut the arena
};

// Rabin emptiness game: IAR reduction to parity on the reachable arena.
// States beyond `arena_cap` are not expanded and count as losing for the
// automaton player, so `nonempty` is sound and completeness is reported.
EmptinessResult rabin_tree_emptiness(TreeArena& arena, TypeUniversePtr types,
                                     const BuildLimits& limits = {},
                                     std::size_t arena_cap = SIZE_MAX);

// --- Arenas -----------------------------------------------------------------

// The symbolic product: the shared type layer (local consistency plus the
// zero-parent root condition) joined with guard-checking factors and the
// round-robin pair memory of the intersection construction.
class TreeFactor {
 public:
  virtual ~TreeFactor() = default;
  virtual std::vector<int> initials() = 0;
  virtual std::vector<int> moves(int state, int letter, TypeId theta) = 0;
  virtual std::vector<int> children(int state, int move, int dir, TypeId child_type) = 0;
  // Letters the factor insists on (empty = any letter of the alphabet).
  virtual std::vector<int> letters(int state) { (void)state; return {}; }
  virtual std::size_t num_pairs() const = 0;
  virtual bool in_L(int state, std::size_t pair) = 0;
  virtual bool in_U(int state, std::size_t pair) = 0;
  virtual std::string state_name(int) { return ""; }
};

std::shared_ptr<TreeFactor> make_tca_factor(std::shared_ptr<const Tca> tca);
std::shared_ptr<TreeFactor> make_det_broadcast_factor(std::shared_ptr<const ClassedDetAutomaton> det);

// Product arena over the shared type layer; pair set = one pair per tuple
// of factor pair indices, with the deterministic round-robin memory.
class SymbolicProductArena : public TreeArena {
 public:
  // new_cand_limit restricts how many not-yet-seen child states a move may
  // introduce per direction (0 = unrestricted); candidates whose product
  // state already exists are always kept, so restriction only removes
  // options from the automaton player.
  SymbolicProductArena(TypeUniversePtr types, int num_letters, int degree,
                       std::vector<std::shared_ptr<TreeFactor>> factors,
                       const BuildLimits& limits, bool track_pairs = true,
                       int new_cand_limit = 0);
  int degree() const override { return degree_; }
  std::vector<int> initials() override;
  std::vector<ArenaMove> moves(int state) override;
  std::size_t num_pairs() const override { return total_pairs_; }
  bool in_L(int state, std::size_t pair) override;
  bool in_U(int state, std::size_t pair) override;
  std::size_t discovered() const override { return states_.size(); }
  std::string state_name(int) override;

  TypeId state_type(int state) const { return states_[static_cast<std::size_t>(state)].theta; }

 private:
  struct PState {
    TypeId theta;
    std::vector<int> qs;
    std::vector<std::uint8_t> f;
  };
  int intern(PState s);
  int find(const PState& s) const;
  static std::string encode(const PState& s);
  std::vector<std::uint8_t> update_f(const std::vector<std::uint8_t>& f,
                                     const std::vector<int>& child_qs) const;

  TypeUniversePtr types_;
  int num_letters_;
  int degree_;
  std::vector<std::shared_ptr<TreeFactor>> factors_;
  std::vector<std::size_t> npairs_;
  std::size_t total_pairs_ = 1;
  BuildLimits limits_;
  int new_cand_limit_ = 0;
  std::vector<PState> states_;
  std::map<std::string, int> id_of_;
};

// Membership arenas.
bool fta_membership(const FiniteTreeAutomaton& a, const RegularSymbolicTree& t,
                    const BuildLimits& limits = {});
bool tca_membership_regular(const Tca& a, const RegularDataTree& t,
                            const BuildLimits& limits = {});

// Membership of a regular symbolic tree in the symbolic product of factors.
bool product_membership(TypeUniversePtr types, int num_letters, int degree,
                        std::vector<std::shared_ptr<TreeFactor>> factors,
                        const RegularSymbolicTree& t, const BuildLimits& limits = {});

// --- Solve pipeline ----------------------------------------------------------

struct ConcretePrefix {
  int degree = 1;
  int beta = 1;
  struct Node {
    std::vector<Int> values;
    std::vector<int> children;  // -1 below the cut depth
  };
  std::vector<Node> nodes;  // node 0 is the root
};

// Integer labels for the depth-k prefix of a star-satisfying symbolic tree.
ConcretePrefix concretize_prefix(const RegularSymbolicTree& t, int depth);

struct WitnessBundle {
  RegularSymbolicTree symbolic;
  std::optional<ConcretePrefix> prefix;
  std::size_t machine_states = 0;
  bool validated = false;
};

struct SolveStats {
  std::size_t star_states = 0;
  std::size_t star_pairs = 0;
  std::size_t ab_states = 0;
  std::size_t safra_states = 0;
  std::size_t product_states = 0;
  std::size_t product_pairs = 0;
  std::size_t arena_vertices = 0;
  double star_pair_bound = 0;
};

struct SolveResult {
  bool sat = false;
  std::optional<WitnessBundle> witness;
  SolveStats stats;
};

// L(A) nonempty iff the consistency product with the star automaton is
// nonempty; on success extracts, validates and concretizes a witness.
SolveResult solve(const Tca& a, int witness_depth = 3, const BuildLimits& limits = {});

// Same pipeline over an implicit intersection of components.
SolveResult solve_components(TypeUniversePtr types, int num_letters, int degree,
                             const std::vector<Tca>& buchi_parts,
                             const std::vector<ApathAutomaton>& apaths,
                             int witness_depth = 3, const BuildLimits& limits = {});

}  // namespace ztl
