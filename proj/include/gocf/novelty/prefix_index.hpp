#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gocf/core/types.hpp"

namespace gocf {

// One sequence element: (color, point) packed into 0..723.
using PrefixToken = std::uint16_t;

constexpr PrefixToken make_token(Color c, Point p) noexcept {
  return static_cast<PrefixToken>(static_cast<int>(c) * (kNumPoints + 1) + p.index());
}

// Trie over move-sequence prefixes stored as a flat open-addressing map
// (parent node, token) -> child node. Node 0 is the empty prefix. Every
// non-root node remembers the ordinal of the first source that inserted it;
// sources are inserted in corpus order, so that is the earliest occurrence.
class PrefixIndex {
 public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kRoot = 0;
  static constexpr NodeId kAbsent = std::numeric_limits<NodeId>::max();

  explicit PrefixIndex(int max_move = 60) : max_move_(max_move) {
    if (max_move < 1) throw std::invalid_argument("max_move must be >= 1");
    first_source_.push_back(kAbsent);
    rehash(1024);
  }

  int max_move() const noexcept { return max_move_; }

  // Number of stored prefixes (excluding the empty prefix).
  std::size_t size() const noexcept { return first_source_.size() - 1; }

  void reserve(std::size_t nodes) {
    first_source_.reserve(nodes + 1);
    std::size_t want = std::bit_ceil((nodes * 4) / 3 + 16);
    if (want > keys_.size()) rehash(want);
  }

  NodeId find(NodeId parent, PrefixToken t) const noexcept {
    const std::uint64_t key = pack(parent, t);
    for (std::size_t i = slot(key);; i = (i + 1) & mask_) {
      if (keys_[i] == key) return children_[i];
      if (keys_[i] == 0) return kAbsent;
    }
  }

  // Returns the child, creating it with source `source` if absent.
  NodeId insert(NodeId parent, PrefixToken t, std::uint32_t source, bool* created = nullptr) {
    if ((used_ + 1) * 4 > keys_.size() * 3) rehash(keys_.size() * 2);
    const std::uint64_t key = pack(parent, t);
    std::size_t i = slot(key);
    for (;; i = (i + 1) & mask_) {
      if (keys_[i] == key) {
        if (created) *created = false;
        return children_[i];
      }
      if (keys_[i] == 0) break;
    }
    const NodeId node = static_cast<NodeId>(first_source_.size());
    if (node == kAbsent) throw std::length_error("prefix index full");
    keys_[i] = key;
    children_[i] = node;
    first_source_.push_back(source);
    ++used_;
    if (created) *created = true;
    return node;
  }

  std::uint32_t first_source(NodeId node) const { return first_source_.at(node); }

  // Walks a whole sequence; kAbsent if any prefix is missing.
  NodeId lookup(const std::vector<PrefixToken>& seq) const noexcept {
    NodeId n = kRoot;
    for (PrefixToken t : seq) {
      n = find(n, t);
      if (n == kAbsent) return kAbsent;
    }
    return n;
  }

  std::size_t memory_bytes() const noexcept {
    return keys_.capacity() * sizeof(std::uint64_t) + children_.capacity() * sizeof(NodeId) +
           first_source_.capacity() * sizeof(std::uint32_t);
  }

 private:
  static constexpr std::uint64_t pack(NodeId parent, PrefixToken t) noexcept {
    return ((static_cast<std::uint64_t>(parent) << 10) | t) + 1;
  }

  std::size_t slot(std::uint64_t key) const noexcept {
    return static_cast<std::size_t>((key * 0x9E3779B97F4A7C15ULL) >> shift_);
  }

  void rehash(std::size_t capacity) {
    std::vector<std::uint64_t> old_keys = std::move(keys_);
    std::vector<NodeId> old_children = std::move(children_);
    keys_.assign(capacity, 0);
    children_.assign(capacity, 0);
    mask_ = capacity - 1;
    shift_ = 64 - std::countr_zero(capacity);
    for (std::size_t j = 0; j < old_keys.size(); ++j) {
      if (old_keys[j] == 0) continue;
      std::size_t i = slot(old_keys[j]);
      while (keys_[i] != 0) i = (i + 1) & mask_;
      keys_[i] = old_keys[j];
      children_[i] = old_children[j];
    }
  }

  int max_move_;
  std::vector<std::uint64_t> keys_;
  std::vector<NodeId> children_;
  std::vector<std::uint32_t> first_source_;
  std::size_t used_ = 0;
  std::size_t mask_ = 0;
  int shift_ = 64;
};

}  // namespace gocf
