#pragma once

#include <json.hpp>
#include <string>

#include "geophase/pulse_loop.hpp"

namespace geophase {

/** Wire format of a pulse loop: {"pulses":[{"chi":..,"phi":..},...],"eta":..}. */
inline nlohmann::json loop_to_json(const PulseLoop& loop) {
  nlohmann::json pulses = nlohmann::json::array();
  for (const Pulse& p : loop.pulses) {
    pulses.push_back({{"chi", p.chi}, {"phi", p.phi}});
  }
  return {{"pulses", pulses}, {"eta", loop.single_pass_efficiency}};
}

inline PulseLoop loop_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("pulses") || !doc.contains("eta")) {
    throw std::invalid_argument("loop: expected an object with \"pulses\" and \"eta\"");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key != "pulses" && key != "eta") {
      throw std::invalid_argument("loop: unknown field \"" + key + "\"");
    }
  }
  if (!doc["pulses"].is_array()) {
    throw std::invalid_argument("loop: \"pulses\" must be an array");
  }
  std::vector<Pulse> pulses;
  for (const auto& entry : doc["pulses"]) {
    if (!entry.is_object() || !entry.contains("chi") || !entry.contains("phi")) {
      throw std::invalid_argument("loop: each pulse needs \"chi\" and \"phi\"");
    }
    for (const auto& [key, value] : entry.items()) {
      if (key != "chi" && key != "phi") {
        throw std::invalid_argument("loop: unknown pulse field \"" + key + "\"");
      }
    }
    pulses.emplace_back(entry["chi"].get<double>(), entry["phi"].get<double>());
  }
  return PulseLoop(std::move(pulses), doc["eta"].get<double>());
}

}  // namespace geophase
