#pragma once

#include <cstdint>
#include <vector>

namespace percolab::detail {

// Open-addressing set of 32-bit keys with O(touched) clearing. Sized for the
// small, repeatedly rebuilt vertex sets of a Monte Carlo exploration.
class FlatSet {
 public:
  explicit FlatSet(std::size_t initial_capacity = 1024) { rehash(round_up(initial_capacity)); }

  // Returns true if the key was newly inserted.
  bool insert(std::uint32_t key) {
    if (2 * (used_.size() + 1) > slots_.size()) rehash(2 * slots_.size());
    std::size_t i = slot_of(key);
    while (slots_[i] != kEmpty) {
      if (slots_[i] == key) return false;
      i = (i + 1) & mask_;
    }
    slots_[i] = key;
    used_.push_back(static_cast<std::uint32_t>(i));
    return true;
  }

  bool contains(std::uint32_t key) const {
    std::size_t i = slot_of(key);
    while (slots_[i] != kEmpty) {
      if (slots_[i] == key) return true;
      i = (i + 1) & mask_;
    }
    return false;
  }

  std::size_t size() const { return used_.size(); }

  void clear() {
    for (auto i : used_) slots_[i] = kEmpty;
    used_.clear();
  }

 private:
  static constexpr std::uint32_t kEmpty = 0xFFFFFFFFu;

  static std::size_t round_up(std::size_t n) {
    std::size_t c = 16;
    while (c < n) c <<= 1;
    return c;
  }

  std::size_t slot_of(std::uint32_t key) const {
    return static_cast<std::size_t>((key * 0x9E3779B97F4A7C15ull) >> 20) & mask_;
  }

  void rehash(std::size_t capacity) {
    std::vector<std::uint32_t> keys;
    keys.reserve(used_.size());
    for (auto i : used_) keys.push_back(slots_[i]);
    slots_.assign(capacity, kEmpty);
    mask_ = capacity - 1;
    used_.clear();
    for (auto k : keys) insert(k);
  }

  std::vector<std::uint32_t> slots_;
  std::vector<std::uint32_t> used_;
  std::size_t mask_ = 0;
};

}  // namespace percolab::detail
