#include "brl/core/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "brl/core/hash.hpp"

namespace brl {

void ParamVector::zero_grads() { std::fill(grads.begin(), grads.end(), 0.0); }

bool ParamVector::all_finite() const {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

std::uint64_t ParamVector::hash() const { return fnv1a(values); }

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace brl
