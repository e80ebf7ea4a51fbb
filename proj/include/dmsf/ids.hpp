#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmsf {

using VertexId = std::uint32_t;  // reduced (gadget) vertex
using EdgeId = std::uint64_t;    // global insertion counter, never reused
using ChunkId = std::uint32_t;   // dense id in [0, J), reused
using ListId = std::uint32_t;    // dense id in [0, J) for long lists, reused

inline constexpr std::uint32_t kNoId32 = ~std::uint32_t{0};
inline constexpr std::uint64_t kNoId64 = ~std::uint64_t{0};

struct Edge {
  EdgeId id = 0;
  VertexId u = 0;
  VertexId v = 0;
  std::int64_t w = 0;
};

// Fixed-capacity allocator that always hands out the smallest free id.
// Deterministic across runs; exhaustion is a hard error.
class IdPool {
 public:
  explicit IdPool(std::uint32_t capacity, std::string what)
      : capacity_(capacity), what_(std::move(what)) {}

  std::uint32_t acquire() {
    std::uint32_t id;
    if (!freed_.empty() && freed_.top() < next_) {
      id = freed_.top();
      freed_.pop();
    } else if (next_ < capacity_) {
      id = next_++;
    } else {
      throw std::runtime_error(what_ + ": id pool exhausted (capacity " +
                               std::to_string(capacity_) + ")");
    }
    ++in_use_;
    return id;
  }

  void release(std::uint32_t id) {
    freed_.push(id);
    --in_use_;
  }

  std::uint32_t capacity() const { return capacity_; }
  std::uint32_t in_use() const { return in_use_; }

 private:
  std::uint32_t capacity_;
  std::string what_;
  std::uint32_t next_ = 0;
  std::uint32_t in_use_ = 0;
  std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, std::greater<>> freed_;
};

}  // namespace dmsf
