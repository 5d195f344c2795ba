#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spk/csr.hpp"
#include "spk/error.hpp"

namespace spk {

// Open-addressing table of column keys (and optionally accumulated values)
// with linear probing. Insert claims an empty slot with compare-and-swap and
// accumulation uses an atomic add, so any number of threads may hit the same
// table at once. reset() is not thread-safe.
template <class T>
class HashAccumulator {
 public:
  static constexpr index_t kEmpty = -1;
  static constexpr std::uint32_t kDefaultMultiplier = 0x9E3779B1u;

  explicit HashAccumulator(std::size_t table_size = 1, bool with_values = true,
                           std::uint32_t multiplier = kDefaultMultiplier)
      : with_values_(with_values), multiplier_(multiplier) {
    reset(table_size);
  }

  // Empties the table and sets a new power-of-two capacity.
  void reset(std::size_t table_size) {
    if (table_size == 0 || !std::has_single_bit(table_size)) {
      raise(ErrorKind::BadConfig,
            "table size " + std::to_string(table_size) + " is not a power of two");
    }
    size_ = table_size;
    if (keys_.size() < size_) keys_.resize(size_);
    std::fill_n(keys_.begin(), size_, kEmpty);
    if (with_values_) {
      if (values_.size() < size_) values_.resize(size_);
      std::fill_n(values_.begin(), size_, T{});
    }
    unique_.store(0, std::memory_order_relaxed);
  }

  std::size_t table_size() const noexcept { return size_; }
  std::int64_t unique_count() const noexcept { return unique_.load(std::memory_order_acquire); }
  std::uint32_t multiplier() const noexcept { return multiplier_; }

  std::size_t home_slot(index_t key) const noexcept {
    return static_cast<std::size_t>(static_cast<std::uint64_t>(key) * multiplier_) & (size_ - 1);
  }

  // Returns true iff `key` was not present before this call.
  bool insert(index_t key) { return probe(key, nullptr); }

  void insert_accumulate(index_t key, T val_a, T val_b) {
    const T product = val_a * val_b;
    probe(key, &product);
  }

  std::span<const index_t> keys() const { return {keys_.data(), size_}; }
  std::span<const T> values() const {
    return with_values_ ? std::span<const T>(values_.data(), size_) : std::span<const T>{};
  }

  // Slot holding `key`, or table_size() when absent.
  std::size_t find(index_t key) const {
    std::size_t pos = home_slot(key);
    for (std::size_t step = 0; step < size_; ++step) {
      const index_t k = keys_[pos];
      if (k == key) return pos;
      if (k == kEmpty) return size_;
      pos = (pos + 1) & (size_ - 1);
    }
    return size_;
  }

  // Copies occupied slots, in slot order, into the output spans. Returns the
  // number of keys copied; only min(unique_count, out size) are written.
  std::size_t gather(std::span<index_t> cols, std::span<T> vals) const {
    std::size_t n = 0;
    for (std::size_t s = 0; s < size_; ++s) {
      if (keys_[s] == kEmpty) continue;
      if (n < cols.size()) {
        cols[n] = keys_[s];
        if (with_values_ && n < vals.size()) vals[n] = values_[s];
      }
      ++n;
    }
    return n;
  }

 private:
  bool probe(index_t key, const T* product) {
    if (key < 0) raise(ErrorKind::IndexOutOfRange, "negative hash key");
    std::size_t pos = home_slot(key);
    for (std::size_t step = 0; step < size_; ++step) {
      std::atomic_ref<index_t> slot(keys_[pos]);
      index_t seen = slot.load(std::memory_order_acquire);
      if (seen == key) {
        add(pos, product);
        return false;
      }
      if (seen == kEmpty) {
        index_t expected = kEmpty;
        if (slot.compare_exchange_strong(expected, key, std::memory_order_acq_rel)) {
          unique_.fetch_add(1, std::memory_order_acq_rel);
          add(pos, product);
          return true;
        }
        // Lost the race; the winner may have written our key.
        if (expected == key) {
          add(pos, product);
          return false;
        }
      }
      pos = (pos + 1) & (size_ - 1);
    }
    raise(ErrorKind::TableFull, "no free slot for key " + std::to_string(key) +
                                    " in table of size " + std::to_string(size_));
  }

  void add(std::size_t pos, const T* product) {
    if (product == nullptr || !with_values_) return;
    std::atomic_ref<T>(values_[pos]).fetch_add(*product, std::memory_order_relaxed);
  }

  bool with_values_;
  std::uint32_t multiplier_;
  std::size_t size_ = 0;
  std::vector<index_t> keys_;
  std::vector<T> values_;
  std::atomic<std::int64_t> unique_{0};
};

}  // namespace spk
