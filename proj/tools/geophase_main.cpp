// Command-line front end: scenario configs in, deterministic CSV/JSON out.
// One subcommand per protocol stage: squeeze, wigner, nonclosure, thermal,
// sweep. Exit codes: 0 success, 2 config error, 3 constraint violation under
// --strict.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "geophase/config.hpp"
#include "geophase/csv_io.hpp"
#include "geophase/device.hpp"
#include "geophase/gaussian.hpp"
#include "geophase/grid_state.hpp"
#include "geophase/json_io.hpp"
#include "geophase/pulse_loop.hpp"
#include "geophase/thermal.hpp"
#include "geophase/wigner_field.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config_error = 2;
constexpr int exit_violation = 3;

struct OutputOptions {
  std::string config_path;
  std::string out_path;   // empty: stdout
  std::string format;     // "csv" or "json"
  bool strict = false;
};

void add_common_options(CLI::App* cmd, OutputOptions& opts, const std::string& default_format) {
  opts.format = default_format;
  cmd->add_option("--config", opts.config_path, "Scenario config file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_path, "Output path (default: stdout)");
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--strict", opts.strict, "Exit 3 when constraints are violated");
}

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw geophase::config::ConfigError("cannot open config file: " + path);
  }
  std::ostringstream text;
  text << in.rdbuf();
  return geophase::config::parse_text(text.str());
}

void write_output(const OutputOptions& opts, const std::string& payload) {
  if (opts.out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(opts.out_path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + opts.out_path);
  }
  out << payload;
}

void write_sidecar(const OutputOptions& opts, const nlohmann::json& metadata) {
  if (opts.out_path.empty()) {
    return;
  }
  std::ofstream out(opts.out_path + ".meta.json", std::ios::binary);
  out << metadata.dump(2) << '\n';
}

int run_squeeze(const OutputOptions& opts) {
  const auto cfg = geophase::config::parse_squeeze(load_config(opts.config_path));
  const auto composition = geophase::compose_loop(cfg.loop);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
  Eigen::MatrixXd cov = 0.5 * Eigen::MatrixXd::Identity(4, 4);
  cov(0, 0) = cov(1, 1) = cfg.nbar + 0.5;  // thermal mechanics, vacuum optics
  const geophase::GaussianState initial(mean, cov);
  const auto mech =
      geophase::extract_mode(geophase::apply_symplectic(initial, composition.total), 0);
  const auto extremum = geophase::min_variance_and_angle(mech);

  if (opts.format == "json") {
    nlohmann::json doc{
        {"mean", {mech.mean()(0), mech.mean()(1)}},
        {"cov",
         {{mech.cov()(0, 0), mech.cov()(0, 1)}, {mech.cov()(1, 0), mech.cov()(1, 1)}}},
        {"min_variance", extremum.variance},
        {"angle_rad", extremum.angle},
        {"area", composition.area},
        {"residual",
         {{"chi_loss", composition.residual.chi_loss},
          {"phi_loss", composition.residual.phi_loss}}}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    csv << "mean_x,mean_p,cov_xx,cov_xp,cov_pp,min_variance,angle_rad,area,chi_loss,phi_loss\n";
    using geophase::detail::format_shortest;
    csv << format_shortest(mech.mean()(0)) << ',' << format_shortest(mech.mean()(1)) << ','
        << format_shortest(mech.cov()(0, 0)) << ',' << format_shortest(mech.cov()(0, 1)) << ','
        << format_shortest(mech.cov()(1, 1)) << ',' << format_shortest(extremum.variance) << ','
        << format_shortest(extremum.angle) << ',' << format_shortest(composition.area) << ','
        << format_shortest(composition.residual.chi_loss) << ','
        << format_shortest(composition.residual.phi_loss) << '\n';
    write_output(opts, csv.str());
  }
  return exit_ok;
}

int run_wigner(const OutputOptions& opts) {
  const auto cfg = geophase::config::parse_wigner(load_config(opts.config_path));
  const auto gate = cfg.gate == geophase::config::WignerGate::x2
                        ? geophase::quadratic_gate(cfg.chi2)
                        : geophase::quartic_gate(cfg.chi2);
  const auto state = geophase::apply_polynomial_phase(geophase::ground_state(cfg.x_axis), gate);
  const auto field = geophase::wigner_from_wavefunction(state, cfg.p_axis);

  if (opts.format == "json") {
    nlohmann::json values = nlohmann::json::array();
    for (int i = 0; i < field.x_axis.points; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < field.p_axis.points; ++j) {
        row.push_back(field.values(i, j));
      }
      values.push_back(std::move(row));
    }
    nlohmann::json doc{
        {"x_axis", {{"points", field.x_axis.points}, {"half_width", field.x_axis.half_width}}},
        {"p_axis", {{"points", field.p_axis.points}, {"half_width", field.p_axis.half_width}}},
        {"negativity_volume", geophase::negativity_volume(field)},
        {"values", std::move(values)}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    geophase::write_csv(field, csv);
    write_output(opts, csv.str());
  }
  return exit_ok;
}

int run_nonclosure(const OutputOptions& opts) {
  const auto cfg = geophase::config::parse_nonclosure(load_config(opts.config_path));
  std::vector<double> losses(static_cast<std::size_t>(cfg.count));
  std::vector<double> variances(losses.size());
  for (int i = 0; i < cfg.count; ++i) {
    losses[i] = cfg.chi_loss_min +
                (cfg.chi_loss_max - cfg.chi_loss_min) * i / (cfg.count - 1);
    variances[i] = geophase::squeezing_with_nonclosure(cfg.chi2, losses[i]);
  }
  // First crossing of the 0.5 vacuum reference, linearly interpolated.
  nlohmann::json crossing;
  for (std::size_t i = 1; i < losses.size(); ++i) {
    if (variances[i - 1] < 0.5 && variances[i] >= 0.5) {
      const double frac = (0.5 - variances[i - 1]) / (variances[i] - variances[i - 1]);
      crossing = losses[i - 1] + frac * (losses[i] - losses[i - 1]);
      break;
    }
  }

  if (opts.format == "json") {
    nlohmann::json points = nlohmann::json::array();
    for (std::size_t i = 0; i < losses.size(); ++i) {
      points.push_back({{"chi_loss", losses[i]}, {"variance", variances[i]}});
    }
    nlohmann::json doc{{"chi2", cfg.chi2},
                       {"points", std::move(points)},
                       {"crossing_chi_loss", crossing}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    csv << "chi_loss,variance\n";
    for (std::size_t i = 0; i < losses.size(); ++i) {
      csv << geophase::detail::format_shortest(losses[i]) << ','
          << geophase::detail::format_shortest(variances[i]) << '\n';
    }
    write_output(opts, csv.str());
    write_sidecar(opts, nlohmann::json{{"chi2", cfg.chi2}, {"crossing_chi_loss", crossing}});
  }
  return exit_ok;
}

int run_thermal(const OutputOptions& opts) {
  const auto cfg = geophase::config::parse_thermal(load_config(opts.config_path));
  const auto m0 = geophase::post_pulse_moments(cfg.nbar_eff, cfg.chi2);
  const double omega = 2.0 * std::numbers::pi * cfg.f_m;
  const auto bath = geophase::BathParams::from_quality_factor(omega, cfg.q_factor, cfg.bath_nbar);
  std::vector<double> times(static_cast<std::size_t>(cfg.samples));
  for (int i = 0; i < cfg.samples; ++i) {
    times[i] = cfg.t_end * i / (cfg.samples - 1);
  }
  const auto values = geophase::variance_trajectory(m0, bath, times, cfg.form);

  nlohmann::json oracle;
  if (cfg.check_oracle) {
    const double period = 2.0 * std::numbers::pi / omega;
    const double span = std::min(cfg.t_end, 3.0 * period);
    const double dt = period / 4096.0;
    const auto sampled = geophase::covariance_ode_oracle(m0, bath, span, dt);
    double worst = 0.0;
    for (std::size_t i = 0; i < sampled.var_x.size(); ++i) {
      const double exact = geophase::variance_at(m0, bath, static_cast<double>(i) * dt, cfg.form);
      worst = std::max(worst, std::abs(sampled.var_x[i] - exact) / std::abs(exact));
    }
    oracle = worst;
  }

  if (opts.format == "json") {
    nlohmann::json doc{{"t", times}, {"var_x", values}};
    if (cfg.check_oracle) {
      doc["oracle_max_rel_deviation"] = oracle;
    }
    write_output(opts, doc.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    geophase::write_trajectory_csv(times, values, csv);
    write_output(opts, csv.str());
    if (cfg.check_oracle) {
      write_sidecar(opts, nlohmann::json{{"oracle_max_rel_deviation", oracle}});
    }
  }
  return exit_ok;
}

int run_sweep(const OutputOptions& opts) {
  const auto cfg = geophase::config::parse_sweep(load_config(opts.config_path));
  const auto sweep = geophase::sweep_squeezing(cfg.length, cfg.frequency, cfg.fixed);

  nlohmann::json contour = nlohmann::json::array();
  for (const auto& point : sweep.q_contour) {
    contour.push_back({{"L_m", point.length}, {"f_hz", point.f_m}});
  }
  const auto& best = sweep.min_cell();
  const auto& feasible = sweep.min_feasible_cell();
  nlohmann::json metadata{
      {"color_axis_truncation", sweep.color_axis_truncation},
      {"q_max_demonstrated", geophase::max_demonstrated_q},
      {"q_contour", std::move(contour)},
      {"min_cell", {{"L_m", best.length}, {"f_hz", best.f_m}, {"var_obs", best.var_obs}}},
      {"min_feasible_cell",
       {{"L_m", feasible.length}, {"f_hz", feasible.f_m}, {"var_obs", feasible.var_obs}}},
      {"length_m",
       {{"min", sweep.length_range.min}, {"max", sweep.length_range.max},
        {"count", sweep.length_range.count}}},
      {"frequency_hz",
       {{"min", sweep.frequency_range.min}, {"max", sweep.frequency_range.max},
        {"count", sweep.frequency_range.count}}}};

  bool any_violation = false;
  for (const auto& cell : sweep.cells) {
    any_violation = any_violation || !cell.violations.empty();
  }

  if (opts.format == "json") {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : sweep.cells) {
      cells.push_back({{"L_m", cell.length},
                       {"f_hz", cell.f_m},
                       {"Q", cell.q_factor},
                       {"g0_rad_s", cell.g0},
                       {"chi", cell.chi},
                       {"n_eff", cell.n_eff},
                       {"var_obs", cell.var_obs},
                       {"violations", cell.violations}});
    }
    nlohmann::json doc{{"metadata", std::move(metadata)}, {"cells", std::move(cells)}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    if (opts.out_path.empty()) {
      throw geophase::config::ConfigError(
          "sweep: --format csv needs --out (a metadata sidecar is written alongside)");
    }
    std::ostringstream csv;
    geophase::write_sweep_csv(sweep, csv);
    write_output(opts, csv.str());
    write_sidecar(opts, metadata);
  }
  return opts.strict && any_violation ? exit_violation : exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulsed optomechanical geometric-phase simulator"};
  app.require_subcommand(1);

  OutputOptions squeeze_opts, wigner_opts, nonclosure_opts, thermal_opts, sweep_opts;
  auto* squeeze = app.add_subcommand("squeeze", "Loop composition and mechanical squeezing report");
  add_common_options(squeeze, squeeze_opts, "json");
  auto* wigner = app.add_subcommand("wigner", "Wigner function of the x2 or x4 gate output");
  add_common_options(wigner, wigner_opts, "csv");
  auto* nonclosure = app.add_subcommand("nonclosure", "Readout variance vs loop non-closure");
  add_common_options(nonclosure, nonclosure_opts, "csv");
  auto* thermal = app.add_subcommand("thermal", "Variance trajectory after the pulse sequence");
  add_common_options(thermal, thermal_opts, "csv");
  auto* sweep = app.add_subcommand("sweep", "Observable squeezing over device geometries");
  add_common_options(sweep, sweep_opts, "csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (squeeze->parsed()) {
      return run_squeeze(squeeze_opts);
    }
    if (wigner->parsed()) {
      return run_wigner(wigner_opts);
    }
    if (nonclosure->parsed()) {
      return run_nonclosure(nonclosure_opts);
    }
    if (thermal->parsed()) {
      return run_thermal(thermal_opts);
    }
    if (sweep->parsed()) {
      return run_sweep(sweep_opts);
    }
  } catch (const geophase::config::ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return exit_config_error;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return exit_config_error;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return exit_ok;
}
