#pragma once

// Tree constraint automata over Z-labeled infinite trees: degeneralization,
// n-ary Rabin intersection, the CTL(Z) translation, and the CTL*(Z)
// component automata.

#include "ztl/symbolic.hpp"

namespace ztl {

// Transitions are stored factored: a move fixes the letter and, per
// direction, a set of (guard, target) candidates; the induced transition
// tuples are all per-direction combinations. An explicit transition is a
// move whose candidate lists are singletons.
struct Tca {
  TypeUniversePtr types;
  std::vector<std::string> letters = {"#"};
  int degree = 1;
  int num_states = 0;
  std::vector<int> initial;

  std::vector<Constraint> guard_pool;
  struct Move {
    int letter = 0;
    std::vector<std::vector<std::pair<int, int>>> cand;  // per dir: (guard id, target)
  };
  std::vector<std::vector<Move>> moves;  // per state

  Acceptance acc;  // Buchi, GenBuchi or Rabin over states
  std::vector<std::string> state_names;

  int add_guard(Constraint c) {
    guard_pool.push_back(std::move(c));
    return static_cast<int>(guard_pool.size()) - 1;
  }
  // explicit transition helper
  void add_transition(int src, int letter, const std::vector<std::pair<Constraint, int>>& arms);
  std::size_t move_count() const;
  std::size_t max_constraint_size() const;
};

// Generalized Buchi to Buchi with copy counters; k = 0 collapses to the
// all-accepting Buchi automaton.
Tca degeneralize_gtca(const Tca& a);

// n-ary intersection at the TCA level: guards are conjoined per direction
// and the acceptance uses the round-robin map; the number of Rabin pairs is
// the product of the factors' pair counts. Expects explicit factors.
Tca intersect_rabin_tca(const std::vector<Tca>& as, const BuildLimits& limits = {});

// Tableau translation of a simple-form CTL(Z) state formula, degree D+1
// with direction 0 reserved for default successors.
Tca ctl_to_gtca(const FormulaPtr& phi, const DirectionMap& iota, TypeUniversePtr types,
                const BuildLimits& limits = {});

// E(x1 = 0): two locations, the root guard pins x1.
Tca build_A0(TypeUniversePtr types, int degree);

// A G E Phi_i via direction i: spawns the word automaton of Phi_i at every
// node into child i and continues runs along direction 0.
Tca build_AGE(const FormulaPtr& phi, int direction, int degree, TypeUniversePtr types,
              const BuildLimits& limits = {});

// A Phi'_j: broadcasts the deterministic Rabin word automaton of Phi'_j
// down every direction. Returns the classed determinization next to the
// explicit Tca wiring so consumers can stay lazy.
struct ApathAutomaton {
  ClassedDetAutomaton det;
  int degree = 1;
  std::size_t word_states = 0;  // before determinization
};
ApathAutomaton build_Apath(const FormulaPtr& phi, int degree, TypeUniversePtr types,
                           const BuildLimits& limits = {});

// Expand a broadcast deterministic automaton into an explicit Tca (small
// universes only).
Tca apath_to_tca(const ApathAutomaton& a);

// The component list of a special-form formula: A_0, the AGE automata and
// the A-path automata, sharing one universe.
struct CtlStarComponents {
  TypeUniversePtr types;
  int degree = 1;
  std::vector<Tca> buchi_parts;       // A_0 and the AGE automata (Buchi)
  std::vector<ApathAutomaton> apaths; // deterministic Rabin parts
};
CtlStarComponents ctlstar_components(const SpecialForm& sf, const BuildLimits& limits = {});

// Explicit product of all components (Lemma-style intersection); desk-scale.
Tca ctlstar_to_rabin_tca(const SpecialForm& sf, const BuildLimits& limits = {});

}  // namespace ztl
