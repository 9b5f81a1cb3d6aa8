#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace brl {

// 64-bit FNV-1a. Used for config hashes, parameter fingerprints and dataset
// file digests; not a cryptographic hash.
class Fnv1a {
 public:
  void update(const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= bytes[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  void update(std::string_view s) { update(s.data(), s.size()); }
  void update(std::span<const double> values) {
    update(values.data(), values.size_bytes());
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(std::string_view s) {
  Fnv1a h;
  h.update(s);
  return h.digest();
}

inline std::uint64_t fnv1a(std::span<const double> values) {
  Fnv1a h;
  h.update(values);
  return h.digest();
}

// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

}  // namespace brl
