#include "brl/core/checkpoint.hpp"

#include <cstring>

#include "brl/core/binary_io.hpp"
#include "brl/core/errors.hpp"

namespace brl {

namespace {
constexpr char kMagic[4] = {'B', 'R', 'L', 'P'};
}

void append_network(std::string& out, const Mlp& net) {
  out.append(kMagic, 4);
  bin::put<std::uint16_t>(out, kCheckpointVersion);
  bin::put<std::uint16_t>(out, static_cast<std::uint16_t>(net.num_layers()));
  for (std::size_t d : net.layer_dims()) bin::put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    bin::put<std::uint8_t>(out, static_cast<std::uint8_t>(net.layer_activation(l)));
  }
  for (double v : net.params().values) bin::put<float>(out, static_cast<float>(v));
}

Mlp parse_network(std::span<const unsigned char> bytes, std::size_t& offset) {
  bin::Reader r(bytes, offset);
  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.get<std::uint8_t>());
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("not a BRLP network record");
  const auto version = r.get<std::uint16_t>();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported BRLP version " + std::to_string(version));
  }
  const auto layers = r.get<std::uint16_t>();
  if (layers == 0) throw CorruptionError("BRLP record with zero layers");
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i <= layers; ++i) dims.push_back(r.get<std::uint32_t>());
  std::vector<Activation> acts;
  for (std::size_t i = 0; i < layers; ++i) acts.push_back(activation_from_code(r.get<std::uint8_t>()));
  for (std::size_t i = 0; i + 1 < layers; ++i) {
    if (acts[i] != Activation::kTanh) throw FormatError("hidden layers must use tanh");
  }
  Mlp net(dims, acts.back());
  for (double& v : net.params().values) v = static_cast<double>(r.get<float>());
  offset = r.offset();
  return net;
}

void save_networks(const std::filesystem::path& path, std::span<const Mlp* const> nets) {
  std::string out;
  for (const Mlp* net : nets) append_network(out, *net);
  bin::write_file(path, out);
}

std::vector<Mlp> load_networks(const std::filesystem::path& path) {
  const auto bytes = bin::read_file(path);
  std::vector<Mlp> nets;
  std::size_t offset = 0;
  while (offset < bytes.size()) nets.push_back(parse_network(bytes, offset));
  if (nets.empty()) throw CorruptionError("empty checkpoint " + path.string());
  return nets;
}

}  // namespace brl
