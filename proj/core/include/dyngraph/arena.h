#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "dyngraph/config.h"

DYNGRAPH_BEGIN_NAMESPACE

// A slice of a pool, as a byte offset from the pool base.
struct Region {
  std::size_t offset = 0;
  std::size_t length = 0;
};

// Fixed-capacity bump allocator. Allocation is an aligned offset increment;
// there is no per-region free, only a whole-pool reset.
//
// Bytes at or past the cursor are always zero for a pool that is only ever
// reset through reset_zeroed(): the backing store starts zeroed and the used
// prefix is cleared on every reset.
struct PoolRelease {
  void* raw;
  void operator()(std::byte*) const;
};

class Pool {
 public:
  static constexpr std::size_t kAlignment = 64;

  Pool() = default;
  Pool(std::string name, std::size_t capacity);

  Pool(Pool&&) noexcept = default;
  Pool& operator=(Pool&&) noexcept = default;

  // Returns an aligned region of nbytes and advances the cursor by nbytes
  // rounded up to kAlignment. Throws PoolExhausted.
  Region allocate(std::size_t nbytes);

  std::byte* data(const Region& r) { return base_.get() + r.offset; }
  const std::byte* data(const Region& r) const { return base_.get() + r.offset; }
  template <class T>
  T* as(const Region& r) {
    return reinterpret_cast<T*>(data(r));
  }

  // Cursor back to zero; contents untouched.
  void reset() { cursor_ = 0; }
  // Zero-fills the used prefix, then resets the cursor.
  void reset_zeroed();

  const std::string& name() const { return name_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t cursor() const { return cursor_; }
  std::size_t remaining() const { return capacity_ - cursor_; }
  // Number of allocate() calls that succeeded since construction.
  std::uint64_t allocations() const { return allocations_; }

 private:
  std::string name_;
  std::unique_ptr<std::byte, PoolRelease> base_;
  std::size_t capacity_ = 0;
  std::size_t cursor_ = 0;
  std::uint64_t allocations_ = 0;
};

// The three memory blocks: forward values, backward gradients, and
// persistent parameters with their gradient accumulators.
struct PoolSet {
  Pool forward;
  Pool backward;
  Pool parameters;

  // Forward and backward cursors to zero, backward used prefix zero-filled.
  // The parameters pool is never touched.
  void reset_transient();
};

// Pool capacities in bytes.
struct MemorySplit {
  std::size_t forward = 0;
  std::size_t backward = 0;
  std::size_t parameters = 0;
};

constexpr std::size_t kMiB = std::size_t{1} << 20;
constexpr std::size_t kDefaultMemoryMiB = 128;

// Parses the --mem flag: "N" splits N MiB into equal thirds, "A,B,C" gives
// the forward, backward and parameter pools explicitly (MiB each).
MemorySplit parse_mem_flag(std::string_view flag);

// Sizes are in MiB and must all be positive.
PoolSet new_poolset(std::size_t forward_mb, std::size_t backward_mb, std::size_t param_mb);
PoolSet new_poolset(const MemorySplit& split);

DYNGRAPH_END_NAMESPACE
