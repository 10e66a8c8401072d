#include "dyngraph/arena.h"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE

namespace {

constexpr std::size_t round_up(std::size_t n) {
  return (n + Pool::kAlignment - 1) & ~(Pool::kAlignment - 1);
}

std::size_t parse_size(std::string_view text) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("invalid --mem value '" + std::string(text) + "'");
  return value;
}

}  // namespace

void PoolRelease::operator()(std::byte*) const { std::free(raw); }

Pool::Pool(std::string name, std::size_t capacity) : name_(std::move(name)) {
  if (capacity == 0)
    throw std::invalid_argument("pool '" + name_ + "' needs a positive capacity");
  capacity_ = round_up(capacity);
  // calloc hands back lazily zeroed pages for large requests, so a big pool
  // costs nothing until it is touched.
  void* raw = std::calloc(capacity_ + kAlignment, 1);
  if (raw == nullptr)
    throw AllocationFailed("cannot reserve " + std::to_string(capacity_) + " bytes for pool '" +
                           name_ + "'");
  auto addr = reinterpret_cast<std::uintptr_t>(raw);
  auto aligned = (addr + kAlignment - 1) & ~(std::uintptr_t{kAlignment} - 1);
  base_ = std::unique_ptr<std::byte, PoolRelease>(reinterpret_cast<std::byte*>(aligned), PoolRelease{raw});
}

Region Pool::allocate(std::size_t nbytes) {
  const std::size_t rounded = round_up(nbytes);
  if (rounded > capacity_ - cursor_) throw PoolExhausted(name_, rounded, capacity_ - cursor_);
  Region r{cursor_, nbytes};
  cursor_ += rounded;
  ++allocations_;
  return r;
}

void Pool::reset_zeroed() {
  if (cursor_ > 0) std::memset(base_.get(), 0, cursor_);
  cursor_ = 0;
}

void PoolSet::reset_transient() {
  forward.reset();
  backward.reset_zeroed();
}

MemorySplit parse_mem_flag(std::string_view flag) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto comma = flag.find(',', start);
    parts.push_back(flag.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  MemorySplit split;
  if (parts.size() == 1) {
    const std::size_t total = parse_size(parts[0]) * kMiB;
    if (total == 0) throw ConfigError("--mem must be positive");
    const std::size_t third = (total / 3) & ~(Pool::kAlignment - 1);
    split.forward = third;
    split.backward = third;
    split.parameters = total - 2 * third;
  } else if (parts.size() == 3) {
    split.forward = parse_size(parts[0]) * kMiB;
    split.backward = parse_size(parts[1]) * kMiB;
    split.parameters = parse_size(parts[2]) * kMiB;
  } else {
    throw ConfigError("--mem expects N or A,B,C (MiB), got '" + std::string(flag) + "'");
  }
  if (split.forward == 0 || split.backward == 0 || split.parameters == 0)
    throw ConfigError("--mem pool sizes must all be positive");
  return split;
}

PoolSet new_poolset(const MemorySplit& split) {
  if (split.forward == 0 || split.backward == 0 || split.parameters == 0)
    throw std::invalid_argument("new_poolset: all pool sizes must be positive");
  return PoolSet{Pool("forward", split.forward), Pool("backward", split.backward),
                 Pool("parameters", split.parameters)};
}

PoolSet new_poolset(std::size_t forward_mb, std::size_t backward_mb, std::size_t param_mb) {
  return new_poolset(MemorySplit{forward_mb * kMiB, backward_mb * kMiB, param_mb * kMiB});
}

DYNGRAPH_END_NAMESPACE
