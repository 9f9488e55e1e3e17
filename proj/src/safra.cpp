#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <set>
#include <cstdio>
#include <cstdlib>

#include "ztl/graph.hpp"
#include "ztl/symbolic.hpp"
#include "ztl/word_automata.hpp"

namespace ztl {

// --- Safra trees ------------------------------------------------------------

bool SafraTree::operator==(const SafraTree& o) const { return encode() == o.encode(); }

std::string SafraTree::encode() const {
  std::string out;
  auto rec = [&](auto&& self, int i) -> void {
    const Node& n = nodes[static_cast<std::size_t>(i)];
    out += std::to_string(n.name);
    out += n.marked ? "!" : ".";
    out += "[";
    n.label.for_each([&](std::size_t q) { out += std::to_string(q) + ","; });
    out += "](";
    for (int c : n.children) self(self, c);
    out += ")";
  };
  if (!nodes.empty()) rec(rec, 0);
  return out;
}

std::size_t SafraTree::hash() const { return std::hash<std::string>{}(encode()); }

Bitset SafraTree::present_names(int limit) const {
  Bitset b(static_cast<std::size_t>(limit) + 1);
  for (const auto& n : nodes) b.set(static_cast<std::size_t>(n.name));
  return b;
}

Bitset SafraTree::marked_names(int limit) const {
  Bitset b(static_cast<std::size_t>(limit) + 1);
  for (const auto& n : nodes)
    if (n.marked) b.set(static_cast<std::size_t>(n.name));
  return b;
}

void check_safra_invariants(const SafraTree& t, int num_locations) {
  if (t.nodes.empty()) throw std::logic_error("safra: empty tree");
  std::set<int> names;
  for (const auto& n : t.nodes) {
    if (n.name < 1 || n.name > 2 * num_locations)
      throw std::logic_error("safra: node name out of range");
    if (!names.insert(n.name).second) throw std::logic_error("safra: duplicate node name");
  }
  bool root_dead = t.nodes[0].label.none();
  if (root_dead && !t.nodes[0].children.empty())
    throw std::logic_error("safra: dead root with children");
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& n = t.nodes[i];
    if (i > 0 && n.label.none()) throw std::logic_error("safra: empty label");
    Bitset uni(n.label.size());
    for (std::size_t a = 0; a < n.children.size(); ++a) {
      const auto& ca = t.nodes[static_cast<std::size_t>(n.children[a])];
      if (!n.label.contains(ca.label)) throw std::logic_error("safra: child exceeds parent");
      if (uni.intersects(ca.label)) throw std::logic_error("safra: sibling labels intersect");
      uni |= ca.label;
    }
    if (!n.children.empty() && uni == n.label)
      throw std::logic_error("safra: label equals union of children");
  }
  if (!root_dead && static_cast<int>(t.nodes.size()) > num_locations)
    throw std::logic_error("safra: node bound exceeded");
}

namespace {

struct MNode {
  int name = 1;
  Bitset label;
  bool marked = false;
  std::vector<MNode> children;
};

MNode to_mutable(const SafraTree& t, int i) {
  const auto& n = t.nodes[static_cast<std::size_t>(i)];
  MNode m;
  m.name = n.name;
  m.label = n.label;
  m.marked = n.marked;
  for (int c : n.children) m.children.push_back(to_mutable(t, c));
  return m;
}

void to_flat(const MNode& m, SafraTree& t) {
  int idx = static_cast<int>(t.nodes.size());
  t.nodes.push_back({m.name, m.label, m.marked, {}});
  for (const auto& c : m.children) {
    int ci = static_cast<int>(t.nodes.size());
    to_flat(c, t);
    t.nodes[static_cast<std::size_t>(idx)].children.push_back(ci);
  }
}

// One Safra update step for the letter whose transition function is `adj`.
SafraTree safra_step(const SafraTree& tree, const std::vector<Bitset>& adj, const Bitset& F,
                     int num_locations) {
  MNode root = to_mutable(tree, 0);

  // (1) unmark
  auto unmark = [](auto&& self, MNode& n) -> void {
    n.marked = false;
    for (auto& c : n.children) self(self, c);
  };
  unmark(unmark, root);

  // (2) spawn accepting children, names allocated smallest-first in preorder
  std::set<int> used;
  auto collect = [&](auto&& self, const MNode& n) -> void {
    used.insert(n.name);
    for (const auto& c : n.children) self(self, c);
  };
  collect(collect, root);
  auto fresh_name = [&]() {
    for (int i = 1; i <= 2 * num_locations; ++i)
      if (!used.count(i)) {
        used.insert(i);
        return i;
      }
    throw std::logic_error("safra: ran out of names");
  };
  auto spawn = [&](auto&& self, MNode& n) -> void {
    std::size_t fixed = n.children.size();
    Bitset hit = n.label;
    hit &= F;
    if (hit.any()) {
      MNode child;
      child.name = fresh_name();
      child.label = hit;
      n.children.push_back(std::move(child));
    }
    for (std::size_t i = 0; i < fixed; ++i) self(self, n.children[i]);
  };
  spawn(spawn, root);

  // (3) powerset
  auto shift = [&](auto&& self, MNode& n) -> void {
    Bitset nl(n.label.size());
    n.label.for_each([&](std::size_t q) { nl |= adj[q]; });
    n.label = std::move(nl);
    for (auto& c : n.children) self(self, c);
  };
  shift(shift, root);

  // (4) horizontal merge: a location owned by an older sibling disappears
  // from younger siblings and their descendants
  auto strip = [&](auto&& self, MNode& n, const Bitset& kill) -> void {
    n.label -= kill;
    for (auto& c : n.children) self(self, c, kill);
  };
  auto horizontal = [&](auto&& self, MNode& n) -> void {
    Bitset seen(n.label.size());
    for (auto& c : n.children) {
      Bitset kill = seen;
      kill &= c.label;
      if (kill.any()) strip(strip, c, kill);
      seen |= c.label;
    }
    for (auto& c : n.children) self(self, c);
  };
  horizontal(horizontal, root);

  // (5) drop empty nodes (root survives)
  auto drop_empty = [&](auto&& self, MNode& n) -> void {
    std::vector<MNode> kept;
    for (auto& c : n.children) {
      if (c.label.none()) continue;
      self(self, c);
      kept.push_back(std::move(c));
    }
    n.children = std::move(kept);
  };
  drop_empty(drop_empty, root);
  if (root.label.none()) root.children.clear();

  // (6) vertical merge
  auto vertical = [&](auto&& self, MNode& n) -> void {
    if (!n.children.empty()) {
      Bitset uni(n.label.size());
      for (const auto& c : n.children) uni |= c.label;
      if (uni == n.label) {
        n.children.clear();
        n.marked = true;
        return;
      }
    }
    for (auto& c : n.children) self(self, c);
  };
  vertical(vertical, root);

  SafraTree out;
  to_flat(root, out);
  return out;
}

// Letter classes of an explicit automaton: groups of (letter, type) pairs
// with the same transition relation.
struct LetterClasses {
  int num_letters = 0;
  std::size_t num_types = 0;
  std::vector<int> class_of;                    // letter * num_types + type
  std::vector<std::vector<Bitset>> class_adj;   // [class][src] -> dst bitset
};

LetterClasses classes_of(const WordAutomaton& a) {
  for (const auto& t : a.transitions)
    if (!guard_is_type(t.guard))
      throw std::invalid_argument("determinization requires type-normalized guards");
  const auto& all = a.types->all();
  LetterClasses lc;
  lc.num_letters = static_cast<int>(a.letters.size());
  lc.num_types = a.types->interned_count();
  lc.class_of.assign(static_cast<std::size_t>(lc.num_letters) * lc.num_types, -1);

  // adjacency baskets per (letter, type)
  std::map<std::pair<int, TypeId>, std::vector<std::pair<int, int>>> edges;
  for (const auto& t : a.transitions)
    edges[{t.letter, std::get<TypeId>(t.guard)}].push_back({t.src, t.dst});
  std::map<std::string, int> sig_of;
  auto class_for = [&](std::vector<std::pair<int, int>> es) {
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
    std::string sig;
    for (auto [s, d] : es) sig += std::to_string(s) + ">" + std::to_string(d) + ";";
    auto it = sig_of.find(sig);
    if (it != sig_of.end()) return it->second;
    int id = static_cast<int>(lc.class_adj.size());
    sig_of.emplace(std::move(sig), id);
    std::vector<Bitset> adj(static_cast<std::size_t>(a.num_states),
                            Bitset(static_cast<std::size_t>(a.num_states)));
    for (auto [s, d] : es) adj[static_cast<std::size_t>(s)].set(static_cast<std::size_t>(d));
    lc.class_adj.push_back(std::move(adj));
    return id;
  };
  for (int letter = 0; letter < lc.num_letters; ++letter)
    for (TypeId ty : all) {
      auto it = edges.find({letter, ty});
      std::vector<std::pair<int, int>> es;
      if (it != edges.end()) es = it->second;
      lc.class_of[static_cast<std::size_t>(letter) * lc.num_types + static_cast<std::size_t>(ty)] =
          class_for(std::move(es));
    }
  return lc;
}

}  // namespace

ClassedDetAutomaton safra_determinize_classed(const WordAutomaton& buchi,
                                              const BuildLimits& limits,
                                              std::vector<SafraTree>* trees_out,
                                              bool check_invariants) {
  if (buchi.acc.kind != Acceptance::Buchi)
    throw std::invalid_argument("safra_determinize: Buchi input required");
  LetterClasses lc = classes_of(buchi);
  const int Q = buchi.num_states;
  const Bitset& F = buchi.acc.sets[0];

  SafraTree init;
  {
    SafraTree::Node root;
    root.name = 1;
    root.label.resize(static_cast<std::size_t>(Q));
    for (int q : buchi.initial) root.label.set(static_cast<std::size_t>(q));
    init.nodes.push_back(std::move(root));
  }

  std::map<std::string, int> id_of;
  std::vector<SafraTree> trees;
  auto intern = [&](SafraTree t) {
    auto key = t.encode();
    auto it = id_of.find(key);
    if (it != id_of.end()) return it->second;
    int id = static_cast<int>(trees.size());
    id_of.emplace(std::move(key), id);
    if (check_invariants) check_safra_invariants(t, Q);
    trees.push_back(std::move(t));
    limits.check(trees.size(), "safra_determinize");
    return id;
  };

  ClassedDetAutomaton det;
  det.types = buchi.types;
  det.num_letters = lc.num_letters;
  det.num_classes = static_cast<int>(lc.class_adj.size());
  det.class_of = lc.class_of;
  det.num_types = lc.num_types;
  det.initial = intern(init);
  det.reading = Acceptance::Rabin;
  det.pair_count = static_cast<std::size_t>(2 * Q);

  const bool trace = std::getenv("ZTL_TRACE") != nullptr;
  std::deque<int> work{det.initial};
  std::vector<bool> done;
  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    if (static_cast<std::size_t>(id) < done.size() && done[static_cast<std::size_t>(id)]) continue;
    if (done.size() <= static_cast<std::size_t>(id)) done.resize(static_cast<std::size_t>(id) + 1, false);
    done[static_cast<std::size_t>(id)] = true;
    if (trace && id % 1000 == 0)
      std::fprintf(stderr, "safra: expanding %d, discovered %zu, classes %d\n", id, trees.size(),
                   det.num_classes);
    if (det.succ.size() <= static_cast<std::size_t>(id)) det.succ.resize(trees.size());
    det.succ[static_cast<std::size_t>(id)].assign(static_cast<std::size_t>(det.num_classes), -1);
    SafraTree cur = trees[static_cast<std::size_t>(id)];
    for (int c = 0; c < det.num_classes; ++c) {
      SafraTree nxt = safra_step(cur, lc.class_adj[static_cast<std::size_t>(c)], F, Q);
      int nid = intern(std::move(nxt));
      if (det.succ.size() <= static_cast<std::size_t>(nid)) det.succ.resize(trees.size());
      det.succ[static_cast<std::size_t>(id)][static_cast<std::size_t>(c)] = nid;
      if (static_cast<std::size_t>(nid) >= done.size() || !done[static_cast<std::size_t>(nid)])
        work.push_back(nid);
    }
  }
  det.num_states = static_cast<int>(trees.size());
  det.succ.resize(trees.size());
  det.state_L.assign(trees.size(), Bitset(det.pair_count));
  det.state_U.assign(trees.size(), Bitset(det.pair_count));
  det.state_names.resize(trees.size());
  for (std::size_t s = 0; s < trees.size(); ++s) {
    Bitset present = trees[s].present_names(2 * Q);
    Bitset marked = trees[s].marked_names(2 * Q);
    for (int j = 1; j <= 2 * Q; ++j) {
      if (marked.test(static_cast<std::size_t>(j))) det.state_L[s].set(static_cast<std::size_t>(j - 1));
      if (!present.test(static_cast<std::size_t>(j))) det.state_U[s].set(static_cast<std::size_t>(j - 1));
    }
    det.state_names[s] = trees[s].encode();
  }
  if (trees_out) *trees_out = std::move(trees);
  return det;
}

SafraResult safra_determinize(const WordAutomaton& a, const BuildLimits& limits) {
  SafraResult res;
  ClassedDetAutomaton det = safra_determinize_classed(a, limits, &res.trees);
  res.automaton = expand_classed(det);
  res.automaton.letters = a.letters;
  return res;
}

// --- Lazy determinization chain ----------------------------------------------

LazySafra::LazySafra(const WordAutomaton& buchi, const BuildLimits& limits) : limits_(limits) {
  if (buchi.acc.kind != Acceptance::Buchi)
    throw std::invalid_argument("LazySafra: Buchi input required");
  LetterClasses lc = classes_of(buchi);
  q_ = buchi.num_states;
  acc_ = buchi.acc.sets[0];
  num_types_ = lc.num_types;
  num_letters_ = lc.num_letters;
  class_of_ = std::move(lc.class_of);
  class_adj_ = std::move(lc.class_adj);
  SafraTree init;
  SafraTree::Node root;
  root.name = 1;
  root.label.resize(static_cast<std::size_t>(q_));
  for (int q : buchi.initial) root.label.set(static_cast<std::size_t>(q));
  init.nodes.push_back(std::move(root));
  intern(std::move(init));
}

int LazySafra::intern(SafraTree t) {
  auto key = t.encode();
  auto it = id_of_.find(key);
  if (it != id_of_.end()) return it->second;
  int id = static_cast<int>(trees_.size());
  id_of_.emplace(std::move(key), id);
  check_safra_invariants(t, q_);
  trees_.push_back(std::move(t));
  succ_.emplace_back(class_adj_.size(), -1);
  limits_.check(trees_.size(), "lazy safra");
  return id;
}

int LazySafra::succ(int state, int letter, TypeId ty) {
  if (letter < 0 || letter >= num_letters_ || ty < 0 ||
      static_cast<std::size_t>(ty) >= num_types_)
    throw std::invalid_argument("LazySafra::succ: letter or type out of range");
  int c = class_of_[static_cast<std::size_t>(letter) * num_types_ + static_cast<std::size_t>(ty)];
  int cached = succ_[static_cast<std::size_t>(state)][static_cast<std::size_t>(c)];
  if (cached >= 0) return cached;
  SafraTree nxt = safra_step(trees_[static_cast<std::size_t>(state)],
                             class_adj_[static_cast<std::size_t>(c)], acc_, q_);
  int id = intern(std::move(nxt));  // may grow succ_
  succ_[static_cast<std::size_t>(state)][static_cast<std::size_t>(c)] = id;
  return id;
}

std::vector<int> LazySafra::marked_names() const {
  std::set<int> names;
  for (const auto& t : trees_)
    for (const auto& n : t.nodes)
      if (n.marked) names.insert(n.name);
  return std::vector<int>(names.begin(), names.end());
}

LazyStar::LazyStar(std::shared_ptr<LazySafra> safra, std::vector<int> kept_names)
    : safra_(std::move(safra)), kept_(std::move(kept_names)) {
  kept_set_.insert(kept_.begin(), kept_.end());
}

bool LazyStar::name_marked(int sa, int name) const {
  for (const auto& n : safra_->tree(sa).nodes)
    if (n.name == name) return n.marked;
  return false;
}

bool LazyStar::name_missing(int sa, int name) const {
  for (const auto& n : safra_->tree(sa).nodes)
    if (n.name == name) return false;
  return true;
}

int LazyStar::intern(IarState s) {
  std::string key = std::to_string(s.sa) + "|" + std::to_string(s.e) + "," + std::to_string(s.f) + "|";
  for (auto b : s.sigma) key += static_cast<char>('0' + b);
  auto it = id_of_.find(key);
  if (it != id_of_.end()) return it->second;
  int id = static_cast<int>(states_.size());
  id_of_.emplace(std::move(key), id);
  states_.push_back(std::move(s));
  return id;
}

int LazyStar::initial() {
  const int M = static_cast<int>(kept_.size()) + 1;
  IarState init;
  init.sa = safra_->initial();
  init.sigma.resize(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) init.sigma[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
  init.e = M;
  init.f = M;
  return intern(std::move(init));
}

int LazyStar::succ(int state, int letter, TypeId ty) {
  const int M = static_cast<int>(kept_.size()) + 1;
  IarState cur = states_[static_cast<std::size_t>(state)];
  int sa2 = safra_->succ(cur.sa, letter, ty);
  for (const auto& nd : safra_->tree(sa2).nodes)
    if (nd.marked && !kept_set_.count(nd.name)) violations_.insert(nd.name);
  // Streett pair for a kept name J: L = marked J, U = missing J; the final
  // index M is the always-on (Q,Q) pair.
  auto in_U = [&](int idx0) {
    return idx0 == M - 1 || name_missing(sa2, kept_[static_cast<std::size_t>(idx0)]);
  };
  auto in_L = [&](int idx0) {
    return idx0 == M - 1 || name_marked(sa2, kept_[static_cast<std::size_t>(idx0)]);
  };
  int e2 = 0, f2 = 0;
  for (int i = 0; i < M; ++i)
    if (in_U(cur.sigma[static_cast<std::size_t>(i)])) {
      e2 = i + 1;
      break;
    }
  for (int i = 0; i < M; ++i)
    if (in_L(cur.sigma[static_cast<std::size_t>(i)])) {
      f2 = i + 1;
      break;
    }
  IarState nxt;
  nxt.sa = sa2;
  nxt.e = e2;
  nxt.f = f2;
  nxt.sigma = cur.sigma;
  std::uint8_t moved = nxt.sigma[static_cast<std::size_t>(e2 - 1)];
  nxt.sigma.erase(nxt.sigma.begin() + (e2 - 1));
  nxt.sigma.push_back(moved);
  return intern(std::move(nxt));
}

bool LazyStar::in_L(int state, std::size_t pair) const {
  return states_[static_cast<std::size_t>(state)].e == static_cast<int>(pair) + 1;
}

bool LazyStar::in_U(int state, std::size_t pair) const {
  return states_[static_cast<std::size_t>(state)].f < static_cast<int>(pair) + 1;
}

std::string LazyStar::state_name(int state) const {
  const IarState& s = states_[static_cast<std::size_t>(state)];
  return "sa" + std::to_string(s.sa) + " e=" + std::to_string(s.e) + " f=" + std::to_string(s.f);
}

WordAutomaton streett_to_rabin(const WordAutomaton& a, const BuildLimits& limits) {
  if (a.acc.kind != Acceptance::Streett)
    throw std::invalid_argument("streett_to_rabin: Streett input required");
  if (!a.deterministic)
    throw std::invalid_argument("streett_to_rabin: deterministic input required");
  // Reuse the classed core through letter classes.
  LetterClasses lc = classes_of(a);
  ClassedDetAutomaton st;
  st.types = a.types;
  st.num_letters = lc.num_letters;
  st.num_classes = static_cast<int>(lc.class_adj.size());
  st.class_of = lc.class_of;
  st.num_types = lc.num_types;
  st.num_states = a.num_states;
  if (a.initial.size() != 1)
    throw std::invalid_argument("streett_to_rabin: single initial location required");
  st.initial = a.initial[0];
  st.reading = Acceptance::Streett;
  st.pair_count = a.acc.pairs.size();
  st.succ.assign(static_cast<std::size_t>(a.num_states),
                 std::vector<int>(static_cast<std::size_t>(st.num_classes), -1));
  for (int q = 0; q < a.num_states; ++q)
    for (int c = 0; c < st.num_classes; ++c) {
      Bitset dsts(static_cast<std::size_t>(a.num_states));
      lc.class_adj[static_cast<std::size_t>(c)][static_cast<std::size_t>(q)].for_each(
          [&](std::size_t d) { dsts.set(d); });
      int target = -1;
      dsts.for_each([&](std::size_t d) { target = static_cast<int>(d); });
      if (dsts.count() > 1)
        throw std::invalid_argument("streett_to_rabin: input not deterministic");
      if (target == -1)
        throw std::invalid_argument("streett_to_rabin: input not complete");
      st.succ[static_cast<std::size_t>(q)][static_cast<std::size_t>(c)] = target;
    }
  st.state_L.assign(static_cast<std::size_t>(a.num_states), Bitset(st.pair_count));
  st.state_U.assign(static_cast<std::size_t>(a.num_states), Bitset(st.pair_count));
  for (std::size_t p = 0; p < st.pair_count; ++p)
    for (int q = 0; q < a.num_states; ++q) {
      if (a.acc.pairs[p].L.test(static_cast<std::size_t>(q)))
        st.state_L[static_cast<std::size_t>(q)].set(p);
      if (a.acc.pairs[p].U.test(static_cast<std::size_t>(q)))
        st.state_U[static_cast<std::size_t>(q)].set(p);
    }
  st.state_names = a.state_names;
  ClassedDetAutomaton rab = streett_to_rabin_classed(st, limits);
  WordAutomaton out = expand_classed(rab);
  out.letters = a.letters;
  return out;
}

// --- Buchi word constraint automaton emptiness -------------------------------

WordEmptinessResult word_emptiness(const WordAutomaton& input, const BuildLimits& limits) {
  WordAutomaton a = input.acc.kind == Acceptance::GenBuchi ? degeneralize_word(input) : input;
  if (a.acc.kind != Acceptance::Buchi)
    throw std::invalid_argument("word_emptiness: Buchi input required");
  a = normalize_to_types(a);
  auto types = a.types;
  auto by_src = a.transitions_by_src();
  const Bitset& F = a.acc.sets[0];

  StarChain chain = build_Astar(types, static_cast<int>(a.letters.size()), 1, limits);

  WordEmptinessResult res;

  // initial letters: types admitting the zero parent
  HalfTypeKey zero_key;
  {
    const auto& ctx = types->ctx();
    std::vector<Int> zeros(static_cast<std::size_t>(ctx.beta), 0);
    TypeId z = types->type_of(zeros, zeros);
    zero_key = types->unprimed_key(z);
  }
  std::vector<TypeId> root_types;
  for (TypeId ty : types->extensions_of(zero_key))
    if (types->admits_zero_parent(ty)) root_types.push_back(ty);

  // Discovery pass over (type, q, safra) to fix the live Streett names.
  {
    std::set<std::string> seen;
    std::deque<std::tuple<TypeId, int, int>> work;
    auto push = [&](TypeId ty, int q, int sa) {
      std::string key = std::to_string(ty) + "," + std::to_string(q) + "," + std::to_string(sa);
      if (seen.insert(std::move(key)).second) {
        work.emplace_back(ty, q, sa);
        limits.check(seen.size(), "word_emptiness discovery");
      }
    };
    for (TypeId ty : root_types)
      for (int q : a.initial) push(ty, q, chain.safra->initial());
    while (!work.empty()) {
      auto [ty, q, sa] = work.front();
      work.pop_front();
      for (std::size_t ti : by_src[static_cast<std::size_t>(q)]) {
        const auto& t = a.transitions[ti];
        TypeId child = std::get<TypeId>(t.guard);
        if (!types->agrees(ty, child)) continue;
        push(child, t.dst, chain.safra->succ(sa, t.letter, ty));
      }
    }
  }
  chain.prepare();
  LazyStar& star = *chain.star;
  const std::size_t NP = star.num_pairs();
  res.star_pairs = NP;

  // Buchi conversion of the lazy Rabin star automaton: a base copy plus one
  // copy per pair avoiding U and flagging L.
  struct Vert {
    TypeId ty;
    int q, b;
    int copy;  // 0 = base, i+1 = tracking pair i
  };
  std::map<std::string, int> id_of;
  std::vector<Vert> verts;
  auto intern = [&](Vert v) {
    std::string key = std::to_string(v.ty) + "," + std::to_string(v.q) + "," + std::to_string(v.b) +
                      "," + std::to_string(v.copy);
    auto it = id_of.find(key);
    if (it != id_of.end()) return it->second;
    int id = static_cast<int>(verts.size());
    id_of.emplace(std::move(key), id);
    verts.push_back(v);
    limits.check(verts.size(), "word_emptiness");
    return id;
  };

  std::vector<int> roots;
  std::deque<int> work;
  for (TypeId ty : root_types)
    for (int q : a.initial) {
      int id = intern({ty, q, star.initial(), 0});
      roots.push_back(id);
      work.push_back(id);
    }

  struct EdgeInfo {
    int to;
    int letter;
  };
  std::vector<std::vector<EdgeInfo>> adj;
  std::vector<bool> done;
  auto star_f2 = [&](const Vert& v) {
    return v.copy > 0 && star.in_L(v.b, static_cast<std::size_t>(v.copy - 1));
  };
  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    if (static_cast<std::size_t>(id) < done.size() && done[static_cast<std::size_t>(id)]) continue;
    if (done.size() <= static_cast<std::size_t>(id)) done.resize(static_cast<std::size_t>(id) + 1, false);
    done[static_cast<std::size_t>(id)] = true;
    if (adj.size() <= static_cast<std::size_t>(id)) adj.resize(verts.size());
    Vert cur = verts[static_cast<std::size_t>(id)];
    for (std::size_t ti : by_src[static_cast<std::size_t>(cur.q)]) {
      const auto& t = a.transitions[ti];
      TypeId child = std::get<TypeId>(t.guard);
      if (!types->agrees(cur.ty, child)) continue;
      int b2 = star.succ(cur.b, t.letter, cur.ty);
      auto link = [&](int copy) {
        if (copy > 0 && star.in_U(b2, static_cast<std::size_t>(copy - 1))) return;
        int nid = intern({child, t.dst, b2, copy});
        if (adj.size() <= static_cast<std::size_t>(nid)) adj.resize(verts.size());
        adj[static_cast<std::size_t>(id)].push_back({nid, t.letter});
        if (static_cast<std::size_t>(nid) >= done.size() || !done[static_cast<std::size_t>(nid)])
          work.push_back(nid);
      };
      if (cur.copy == 0) {
        link(0);
        for (std::size_t p = 0; p < NP; ++p) link(static_cast<int>(p) + 1);
      } else {
        link(cur.copy);
      }
    }
  }
  adj.resize(verts.size());
  res.product_states = verts.size();
  res.cons_states = verts.size();
  res.star_states = star.discovered();

  // SCC search for a cycle hitting both Buchi sets.
  std::vector<std::vector<int>> plain(verts.size());
  for (std::size_t v = 0; v < verts.size(); ++v)
    for (const auto& e : adj[v]) plain[v].push_back(e.to);
  SccResult scc = strongly_connected_components(plain);
  std::vector<char> cyclic(static_cast<std::size_t>(scc.count), 0);
  for (std::size_t v = 0; v < verts.size(); ++v)
    for (int w : plain[v])
      if (scc.comp[v] == scc.comp[static_cast<std::size_t>(w)]) cyclic[static_cast<std::size_t>(scc.comp[v])] = 1;
  auto is_f1 = [&](int v) { return F.test(static_cast<std::size_t>(verts[static_cast<std::size_t>(v)].q)); };
  auto is_f2 = [&](int v) { return star_f2(verts[static_cast<std::size_t>(v)]); };
  std::vector<char> has1(static_cast<std::size_t>(scc.count), 0), has2(static_cast<std::size_t>(scc.count), 0);
  for (std::size_t v = 0; v < verts.size(); ++v) {
    if (is_f1(static_cast<int>(v))) has1[static_cast<std::size_t>(scc.comp[v])] = 1;
    if (is_f2(static_cast<int>(v))) has2[static_cast<std::size_t>(scc.comp[v])] = 1;
  }
  int target_comp = -1;
  for (int c = 0; c < scc.count && target_comp < 0; ++c)
    if (cyclic[static_cast<std::size_t>(c)] && has1[static_cast<std::size_t>(c)] && has2[static_cast<std::size_t>(c)])
      target_comp = c;
  if (target_comp < 0) {
    res.sat = false;
    return res;
  }
  res.sat = true;

  // Witness: path from a root into the component, then a cycle through an
  // F1 vertex and an F2 vertex.
  auto bfs_path = [&](const std::vector<int>& from, auto&& good, bool inside) {
    std::vector<int> pred(verts.size(), -2);
    std::deque<int> q2;
    for (int v : from) {
      if (pred[static_cast<std::size_t>(v)] == -2) {
        pred[static_cast<std::size_t>(v)] = -1;
        q2.push_back(v);
      }
    }
    while (!q2.empty()) {
      int v = q2.front();
      q2.pop_front();
      if (good(v)) {
        std::vector<int> path{v};
        while (pred[static_cast<std::size_t>(path.back())] >= 0)
          path.push_back(pred[static_cast<std::size_t>(path.back())]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      for (int w : plain[static_cast<std::size_t>(v)]) {
        if (inside && scc.comp[static_cast<std::size_t>(w)] != target_comp) continue;
        if (pred[static_cast<std::size_t>(w)] == -2) {
          pred[static_cast<std::size_t>(w)] = v;
          q2.push_back(w);
        }
      }
    }
    return std::vector<int>{};
  };
  // choose an F1 vertex in the component
  int v1 = -1;
  for (std::size_t v = 0; v < verts.size(); ++v)
    if (scc.comp[v] == target_comp && is_f1(static_cast<int>(v))) {
      v1 = static_cast<int>(v);
      break;
    }
  std::vector<int> prefix_path = bfs_path(roots, [&](int v) { return v == v1; }, false);
  // cycle v1 -> (some F2 vertex) -> back to v1, all inside the component
  std::vector<int> to_f2 = bfs_path({v1}, [&](int v) { return is_f2(v); }, true);
  int v2 = to_f2.back();
  std::vector<int> step_out;
  // force at least one edge when v2 == v1
  std::vector<int> back;
  {
    std::vector<int> starts;
    for (int w : plain[static_cast<std::size_t>(v2)])
      if (scc.comp[static_cast<std::size_t>(w)] == target_comp) starts.push_back(w);
    back = bfs_path(starts, [&](int v) { return v == v1; }, true);
    back.insert(back.begin(), v2);
  }
  std::vector<int> loop_path = to_f2;
  loop_path.insert(loop_path.end(), back.begin() + 1, back.end());
  // loop_path runs v1 ... v1; drop the final duplicate
  loop_path.pop_back();

  auto letter_at = [&](int v, int w) {
    for (const auto& e : adj[static_cast<std::size_t>(v)])
      if (e.to == w) return e.letter;
    return 0;
  };
  SymbolicLasso wi;
  for (std::size_t i = 0; i + 1 < prefix_path.size(); ++i) {
    const Vert& v = verts[static_cast<std::size_t>(prefix_path[i])];
    wi.prefix.push_back({letter_at(prefix_path[i], prefix_path[i + 1]), v.ty});
  }
  for (std::size_t i = 0; i < loop_path.size(); ++i) {
    int v = loop_path[i];
    int w = i + 1 < loop_path.size() ? loop_path[i + 1] : loop_path[0];
    wi.loop.push_back({letter_at(v, w), verts[static_cast<std::size_t>(v)].ty});
  }
  res.witness = std::move(wi);
  return res;
}

}  // namespace ztl
