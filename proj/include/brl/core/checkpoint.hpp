#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "brl/core/mlp.hpp"

namespace brl {

// "BRLP" network record:
//   magic "BRLP", version u16, layer count u16 (number of weight layers L),
//   layer_dims u32 x (L+1), activation codes u8 x L,
//   parameters f32 x P in layer order (weights row-major, then biases).
// All integers and floats little-endian. A checkpoint file is a sequence of
// one or more records.
inline constexpr std::uint16_t kCheckpointVersion = 1;

void append_network(std::string& out, const Mlp& net);
// Parses one record starting at `offset`, advancing it past the record.
Mlp parse_network(std::span<const unsigned char> bytes, std::size_t& offset);

void save_networks(const std::filesystem::path& path,
                   std::span<const Mlp* const> nets);
std::vector<Mlp> load_networks(const std::filesystem::path& path);

}  // namespace brl
