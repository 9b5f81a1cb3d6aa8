#pragma once

#include "json.hpp"

#include <initializer_list>
#include <string>

#include "brl/core/adam.hpp"
#include "brl/core/errors.hpp"
#include "brl/offline/bcq.hpp"
#include "brl/offline/td3.hpp"

namespace brl {

// Missing keys keep their defaults; unknown keys are rejected with ConfigError.
void to_json(nlohmann::ordered_json& j, const AdamConfig& c);
void from_json(const nlohmann::ordered_json& j, AdamConfig& c);
void to_json(nlohmann::ordered_json& j, const Td3Config& c);
void from_json(const nlohmann::ordered_json& j, Td3Config& c);
void to_json(nlohmann::ordered_json& j, const BcqConfig& c);
void from_json(const nlohmann::ordered_json& j, BcqConfig& c);

// Shared helpers for keyed reads.
void reject_unknown_keys(const nlohmann::ordered_json& j, std::initializer_list<const char*> keys,
                         const char* where);

template <class T>
void read_key(const nlohmann::ordered_json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    it->get_to(out);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace brl
