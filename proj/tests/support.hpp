#pragma once

// Helpers shared by the unit and acceptance tests.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "brl/core/binary_io.hpp"
#include "brl/core/mlp.hpp"
#include "brl/core/rng.hpp"
#include "brl/data/dataset.hpp"

namespace brl::testing {

// Network whose output is the constant `value` for every input.
inline Mlp constant_net(std::size_t in, std::vector<std::size_t> hidden, double value,
                        std::size_t out = 1) {
  std::vector<std::size_t> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  Mlp net(dims, Activation::kIdentity);
  for (double& b : net.biases(net.num_layers() - 1)) b = value;
  return net;
}

// Central difference of f with respect to every entry of `values`.
inline std::vector<double> central_differences(std::vector<double>& values,
                                               const std::function<double()>& f, double h) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double keep = values[i];
    values[i] = keep + h;
    const double up = f();
    values[i] = keep - h;
    const double down = f();
    values[i] = keep;
    out[i] = (up - down) / (2.0 * h);
  }
  return out;
}

// |a - b| / max(|a|, |b|, floor)
inline double relative_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline std::string read_text(const std::filesystem::path& p) {
  const auto bytes = bin::read_file(p);
  return std::string(bytes.begin(), bytes.end());
}

// Fresh scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("brl-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace brl::testing
