#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "brl/core/errors.hpp"

namespace brl::bin {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

template <typename T>
void put(std::string& out, T value) {
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.append(raw, sizeof(T));
}

// Bounds-checked little-endian reader over a byte span.
class Reader {
 public:
  Reader(std::span<const unsigned char> bytes, std::size_t offset = 0)
      : bytes_(bytes), offset_(offset) {}

  template <typename T>
  T get() {
    if (remaining() < sizeof(T)) {
      throw CorruptionError("unexpected end of data at byte " +
                            std::to_string(offset_));
    }
    T value;
    std::memcpy(&value, bytes_.data() + offset_, sizeof(T));
    offset_ += sizeof(T);
    return value;
  }

  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return bytes_.size() - offset_; }

 private:
  std::span<const unsigned char> bytes_;
  std::size_t offset_;
};

std::vector<unsigned char> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

}  // namespace brl::bin
