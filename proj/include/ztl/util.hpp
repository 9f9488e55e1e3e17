#pragma once

#include <cstdint>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ztl {

// Raised when a lazy construction exceeds the configured state budget.
class LimitError : public std::runtime_error {
 public:
  explicit LimitError(const std::string& what) : std::runtime_error(what) {}
};

struct BuildLimits {
  std::size_t max_states = 5'000'000;
  void check(std::size_t n, const char* where) const {
    if (n > max_states)
      throw LimitError(std::string(where) + ": state budget exceeded (" +
                       std::to_string(n) + " > " + std::to_string(max_states) + ")");
  }
};

// Dynamic bitset over uint64 words. Only what the automata code needs.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  void resize(std::size_t n) { n_ = n; w_.resize((n + 63) / 64, 0); }

  void set(std::size_t i) { w_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

  bool any() const {
    for (auto w : w_) if (w) return true;
    return false;
  }
  bool none() const { return !any(); }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : w_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }

  Bitset& operator|=(const Bitset& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  Bitset& operator&=(const Bitset& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }
  Bitset& operator-=(const Bitset& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
    return *this;
  }
  bool intersects(const Bitset& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & o.w_[i]) return true;
    return false;
  }
  bool contains(const Bitset& o) const {  // o subset of *this
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (o.w_[i] & ~w_[i]) return false;
    return true;
  }
  bool operator==(const Bitset& o) const { return n_ == o.n_ && w_ == o.w_; }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t wi = 0; wi < w_.size(); ++wi) {
      std::uint64_t w = w_[wi];
      while (w) {
        unsigned b = static_cast<unsigned>(__builtin_ctzll(w));
        f(wi * 64 + b);
        w &= w - 1;
      }
    }
  }
  std::size_t hash() const {
    std::size_t h = n_;
    for (auto w : w_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

inline void hash_combine(std::size_t& h, std::size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

// Interns byte-encodable keys to dense ids.
template <typename Key, typename Hash = std::hash<Key>>
class Interner {
 public:
  int intern(const Key& k) {
    auto it = ids_.find(k);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(keys_.size());
    keys_.push_back(k);
    ids_.emplace(keys_.back(), id);
    return id;
  }
  const Key& get(int id) const { return keys_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return keys_.size(); }

 private:
  std::vector<Key> keys_;
  std::unordered_map<Key, int, Hash> ids_;
};

}  // namespace ztl

namespace std {
template <> struct hash<ztl::Bitset> {
  size_t operator()(const ztl::Bitset& b) const { return b.hash(); }
};
}  // namespace std
