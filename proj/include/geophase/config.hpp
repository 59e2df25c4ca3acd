#pragma once

#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>

#include "geophase/device.hpp"
#include "geophase/json_io.hpp"
#include "geophase/thermal.hpp"
#include "geophase/wigner_field.hpp"

namespace geophase::config {

inline constexpr int schema_version = 1;

/** Configuration rejected: malformed JSON, unknown fields or bad values. */
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Parses raw JSON, rephrasing syntax errors with a line number. */
inline nlohmann::json parse_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    std::size_t line = 1;
    for (std::size_t i = 0; i + 1 < err.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ": " + err.what());
  }
}

namespace detail {

inline void expect_object(const nlohmann::json& node, const std::string& path) {
  if (!node.is_object()) {
    throw ConfigError(path + ": expected an object");
  }
}

/** Unknown fields are rejected so typos cannot silently change a scenario. */
inline void check_fields(const nlohmann::json& node, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  expect_object(node, path);
  for (const auto& [key, value] : node.items()) {
    bool known = false;
    for (const char* name : allowed) {
      if (key == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(path + ": unknown field \"" + key + "\"");
    }
  }
}

inline const nlohmann::json& require(const nlohmann::json& node, const std::string& path,
                                     const char* key) {
  if (!node.contains(key)) {
    throw ConfigError(path + ": missing field \"" + key + "\"");
  }
  return node.at(key);
}

inline double require_number(const nlohmann::json& node, const std::string& path,
                             const char* key) {
  const auto& value = require(node, path, key);
  if (!value.is_number()) {
    throw ConfigError(path + "." + key + ": expected a number");
  }
  return value.get<double>();
}

inline double number_or(const nlohmann::json& node, const std::string& path, const char* key,
                        double fallback) {
  if (!node.contains(key)) {
    return fallback;
  }
  const auto& value = node.at(key);
  if (!value.is_number()) {
    throw ConfigError(path + "." + key + ": expected a number");
  }
  return value.get<double>();
}

inline int require_int(const nlohmann::json& node, const std::string& path, const char* key) {
  const auto& value = require(node, path, key);
  if (!value.is_number_integer()) {
    throw ConfigError(path + "." + key + ": expected an integer");
  }
  return value.get<int>();
}

inline void check_version(const nlohmann::json& root) {
  expect_object(root, "config");
  const auto& version = require(root, "config", "schema_version");
  if (!version.is_number_integer() || version.get<int>() != schema_version) {
    throw ConfigError("config.schema_version: expected " + std::to_string(schema_version));
  }
}

}  // namespace detail

struct SqueezeConfig {
  double nbar = 0.0;
  PulseLoop loop = PulseLoop::canonical(1.0);
};

inline SqueezeConfig parse_squeeze(const nlohmann::json& root) {
  detail::check_version(root);
  detail::check_fields(root, "config", {"schema_version", "nbar", "loop"});
  SqueezeConfig cfg;
  cfg.nbar = detail::require_number(root, "config", "nbar");
  try {
    cfg.loop = loop_from_json(detail::require(root, "config", "loop"));
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("config.loop: ") + err.what());
  }
  if (cfg.nbar < 0.0) {
    throw ConfigError("config.nbar: must be nonnegative");
  }
  return cfg;
}

enum class WignerGate { x2, x4 };

struct WignerConfig {
  WignerGate gate = WignerGate::x2;
  double chi2 = 0.0;
  GridSpec x_axis{1024, 10.0};
  GridSpec p_axis{1024, 10.0};
};

inline WignerConfig parse_wigner(const nlohmann::json& root) {
  detail::check_version(root);
  detail::check_fields(root, "config", {"schema_version", "gate", "chi2", "grid"});
  WignerConfig cfg;
  const auto& gate = detail::require(root, "config", "gate");
  if (gate == "x2") {
    cfg.gate = WignerGate::x2;
  } else if (gate == "x4") {
    cfg.gate = WignerGate::x4;
  } else {
    throw ConfigError("config.gate: expected \"x2\" or \"x4\"");
  }
  cfg.chi2 = detail::require_number(root, "config", "chi2");
  if (cfg.chi2 < 0.0) {
    throw ConfigError("config.chi2: must be nonnegative");
  }
  const auto& grid = detail::require(root, "config", "grid");
  detail::check_fields(grid, "config.grid",
                       {"n_x", "half_width_x", "n_p", "half_width_p"});
  try {
    cfg.x_axis = GridSpec(detail::require_int(grid, "config.grid", "n_x"),
                          detail::require_number(grid, "config.grid", "half_width_x"));
    cfg.p_axis = GridSpec(detail::require_int(grid, "config.grid", "n_p"),
                          detail::require_number(grid, "config.grid", "half_width_p"));
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("config.grid: ") + err.what());
  }
  return cfg;
}

struct NonclosureConfig {
  double chi2 = 1.0;
  double chi_loss_min = 0.0;
  double chi_loss_max = 3.0;
  int count = 121;
};

inline NonclosureConfig parse_nonclosure(const nlohmann::json& root) {
  detail::check_version(root);
  detail::check_fields(root, "config", {"schema_version", "chi2", "chi_loss"});
  NonclosureConfig cfg;
  cfg.chi2 = detail::require_number(root, "config", "chi2");
  const auto& range = detail::require(root, "config", "chi_loss");
  detail::check_fields(range, "config.chi_loss", {"min", "max", "count"});
  cfg.chi_loss_min = detail::require_number(range, "config.chi_loss", "min");
  cfg.chi_loss_max = detail::require_number(range, "config.chi_loss", "max");
  cfg.count = detail::require_int(range, "config.chi_loss", "count");
  if (cfg.chi2 < 0.0 || cfg.chi_loss_min < 0.0 || cfg.chi_loss_max < cfg.chi_loss_min) {
    throw ConfigError("config.chi_loss: need 0 <= min <= max");
  }
  if (cfg.count < 2) {
    throw ConfigError("config.chi_loss.count: need at least 2 samples");
  }
  return cfg;
}

struct ThermalConfig {
  double nbar_eff = 0.0;
  double chi2 = 0.0;
  double f_m = 0.0;
  double q_factor = 0.0;
  double bath_nbar = 0.0;
  double t_end = 0.0;
  int samples = 0;
  bool check_oracle = false;
  VarianceForm form = VarianceForm::corrected;
};

inline ThermalConfig parse_thermal(const nlohmann::json& root) {
  detail::check_version(root);
  detail::check_fields(root, "config",
                       {"schema_version", "nbar_eff", "chi2", "bath", "trajectory",
                        "check_oracle", "form"});
  ThermalConfig cfg;
  cfg.nbar_eff = detail::require_number(root, "config", "nbar_eff");
  cfg.chi2 = detail::require_number(root, "config", "chi2");
  if (cfg.nbar_eff < 0.0 || cfg.chi2 < 0.0) {
    throw ConfigError("config: nbar_eff and chi2 must be nonnegative");
  }

  const auto& bath = detail::require(root, "config", "bath");
  detail::check_fields(bath, "config.bath",
                       {"frequency_hz", "quality_factor", "nbar", "temperature_k"});
  cfg.f_m = detail::require_number(bath, "config.bath", "frequency_hz");
  cfg.q_factor = detail::require_number(bath, "config.bath", "quality_factor");
  if (!(cfg.f_m > 0.0) || !(cfg.q_factor > 0.0)) {
    throw ConfigError("config.bath: frequency and quality factor must be positive");
  }
  const bool has_nbar = bath.contains("nbar");
  const bool has_temperature = bath.contains("temperature_k");
  if (has_nbar == has_temperature) {
    throw ConfigError("config.bath: give exactly one of \"nbar\" or \"temperature_k\"");
  }
  cfg.bath_nbar = has_nbar
                      ? detail::require_number(bath, "config.bath", "nbar")
                      : bath_occupation(cfg.f_m,
                                        detail::require_number(bath, "config.bath",
                                                               "temperature_k"));
  if (cfg.bath_nbar < 0.0) {
    throw ConfigError("config.bath.nbar: must be nonnegative");
  }

  const auto& traj = detail::require(root, "config", "trajectory");
  detail::check_fields(traj, "config.trajectory", {"t_end_s", "samples"});
  cfg.t_end = detail::require_number(traj, "config.trajectory", "t_end_s");
  cfg.samples = detail::require_int(traj, "config.trajectory", "samples");
  if (!(cfg.t_end > 0.0) || cfg.samples < 2) {
    throw ConfigError("config.trajectory: need t_end_s > 0 and samples >= 2");
  }

  if (root.contains("check_oracle")) {
    if (!root.at("check_oracle").is_boolean()) {
      throw ConfigError("config.check_oracle: expected a boolean");
    }
    cfg.check_oracle = root.at("check_oracle").get<bool>();
  }
  if (root.contains("form")) {
    const auto& form = root.at("form");
    if (form == "corrected") {
      cfg.form = VarianceForm::corrected;
    } else if (form == "uncorrected") {
      cfg.form = VarianceForm::uncorrected;
    } else {
      throw ConfigError("config.form: expected \"corrected\" or \"uncorrected\"");
    }
  }
  return cfg;
}

struct SweepConfig {
  SweepRange length{1e-3, 1e-2, 48};
  SweepRange frequency{1e3, 7e4, 48};
  SweepFixed fixed{};
};

inline SweepConfig parse_sweep(const nlohmann::json& root) {
  detail::check_version(root);
  detail::check_fields(root, "config",
                       {"schema_version", "length_m", "frequency_hz", "thickness_m", "width_m",
                        "temperature_k", "photon_flux_hz", "n_eff_floor",
                        "coupling_gradient_rad_per_s_per_m", "q_cap", "mode_mass_fraction",
                        "material", "timing"});
  SweepConfig cfg;
  const auto parse_range = [&](const char* key) {
    const auto& range = detail::require(root, "config", key);
    const std::string path = std::string("config.") + key;
    detail::check_fields(range, path, {"min", "max", "count"});
    try {
      return SweepRange(detail::require_number(range, path, "min"),
                        detail::require_number(range, path, "max"),
                        detail::require_int(range, path, "count"));
    } catch (const std::invalid_argument& err) {
      throw ConfigError(path + ": " + err.what());
    }
  };
  cfg.length = parse_range("length_m");
  cfg.frequency = parse_range("frequency_hz");

  cfg.fixed.thickness = detail::require_number(root, "config", "thickness_m");
  cfg.fixed.width = detail::require_number(root, "config", "width_m");
  cfg.fixed.temperature = detail::require_number(root, "config", "temperature_k");
  cfg.fixed.photon_flux = detail::require_number(root, "config", "photon_flux_hz");
  cfg.fixed.options.n_eff_floor = detail::number_or(root, "config", "n_eff_floor", 10.0);
  cfg.fixed.options.coupling_gradient =
      detail::number_or(root, "config", "coupling_gradient_rad_per_s_per_m", 2.0e17);
  cfg.fixed.options.q_cap = detail::number_or(root, "config", "q_cap", max_demonstrated_q);
  cfg.fixed.options.mode_mass_fraction =
      detail::number_or(root, "config", "mode_mass_fraction", 0.5);
  if (root.contains("timing")) {
    const auto& timing = root.at("timing");
    detail::check_fields(timing, "config.timing",
                         {"sigma_over_period", "kappa_sigma", "tau_over_sigma"});
    cfg.fixed.options.timing.sigma_over_period =
        detail::number_or(timing, "config.timing", "sigma_over_period", 1e-3);
    cfg.fixed.options.timing.kappa_sigma =
        detail::number_or(timing, "config.timing", "kappa_sigma", 5.0);
    cfg.fixed.options.timing.tau_over_sigma =
        detail::number_or(timing, "config.timing", "tau_over_sigma", 8.0);
  }
  if (root.contains("material")) {
    const auto& mat = root.at("material");
    detail::check_fields(mat, "config.material",
                         {"youngs_modulus_pa", "q_bending", "density_kg_m3"});
    cfg.fixed.material.youngs_modulus =
        detail::number_or(mat, "config.material", "youngs_modulus_pa", 241e9);
    cfg.fixed.material.q_bending = detail::number_or(mat, "config.material", "q_bending", 17000.0);
    cfg.fixed.material.density = detail::number_or(mat, "config.material", "density_kg_m3", 3100.0);
  }
  if (!(cfg.fixed.thickness > 0.0) || !(cfg.fixed.width > 0.0) ||
      !(cfg.fixed.temperature > 0.0) || !(cfg.fixed.photon_flux > 0.0)) {
    throw ConfigError("config: thickness, width, temperature and flux must be positive");
  }
  return cfg;
}

}  // namespace geophase::config
