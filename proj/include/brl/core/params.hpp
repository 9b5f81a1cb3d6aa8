#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace brl {

// Flat parameter storage with a gradient buffer of equal length.
struct ParamVector {
  std::vector<double> values;
  std::vector<double> grads;

  ParamVector() = default;
  explicit ParamVector(std::size_t n) : values(n, 0.0), grads(n, 0.0) {}

  std::size_t size() const { return values.size(); }
  void zero_grads();
  bool all_finite() const;
  // Fingerprint of the parameter values (not the gradients).
  std::uint64_t hash() const;
};

}  // namespace brl
