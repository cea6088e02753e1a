#pragma once

#include "pmlwave/quadrature.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace pmlwave {

// Flat run description mirroring the JSON config format one-to-one. Key
// names carry their units. Optional entries stay unset unless the file (or a
// preset) provides them.
struct RunConfig {
  std::string experiment = "custom"; // strip2d | wholespace2d | pointsource3d | custom
  int dim = 2;
  int degree = 4;
  QuadKind quadrature = QuadKind::GLL;

  double x_min_km = 0, x_max_km = 0;
  double y_min_km = 0, y_max_km = 0;
  double z_min_km = 0, z_max_km = 0;
  double dx_km = 0;
  std::optional<double> dy_km, dz_km; // default to dx_km

  double c_kms = 1.484;
  double rho_gcm3 = 1.0;

  // Reflection coefficients per face, all defaulting to absorbing (r = 0).
  double r_x_minus = 0, r_x_plus = 0;
  double r_y_minus = 0, r_y_plus = 0;
  double r_z_minus = 0, r_z_plus = 0;

  // "off" | "minus" | "plus" | "both" per axis.
  std::string pml_x = "off", pml_y = "off", pml_z = "off";
  double pml_delta_km = 10.0;
  std::optional<double> pml_d0_per_s; // explicit amplitude wins
  std::optional<double> pml_tol;      // else this, else the C0 model
  double pml_c0 = 10.0;
  double pml_omega_y = 1.0, pml_omega_z = 1.0;
  std::string damping_sampling = "nodal"; // nodal | element_constant

  double t_final_s = 0;
  double cfl = 0.35;
  int output_every_steps = 1;
  std::vector<double> snapshot_times_s;
  std::string output_dir; // empty = no files written

  // Pressure pulse p(x,0) = A exp(-ln 2 |x - x0|^2 / halfwidth^2).
  double ic_p_amplitude = 0;
  double ic_p_x0_km = 0, ic_p_y0_km = 0, ic_p_z0_km = 0;
  double ic_p_halfwidth_km = 3.0;

  // Point source (3D): all five keys or none.
  std::optional<double> source_x_km, source_y_km, source_z_km;
  std::optional<double> source_t0_s, source_sigma0_s;

  std::optional<double> receiver_x_km, receiver_y_km, receiver_z_km;

  long seed = 0;

  bool has_source() const {
    return source_x_km && source_y_km && source_z_km && source_t0_s &&
           source_sigma0_s;
  }
  bool has_receiver() const {
    return receiver_x_km && receiver_y_km && receiver_z_km;
  }
};

// Built-in experiment setups. Name "custom" returns the defaults above.
// Unknown names -> ConfigError.
RunConfig preset(const std::string& name);

// Parse a JSON object (text form). Starts from the preset named by the
// "experiment" entry, then applies every other key. Unknown keys, type
// mismatches, and malformed JSON -> ConfigError naming the problem.
RunConfig parse_config_text(const std::string& text);

// Same, reading the file at `path`.
RunConfig load_config(const std::string& path);

// Canonical JSON form: every always-present key in a fixed order, optionals
// only when set. parse_config_text(echo_config(c)) reproduces c exactly.
std::string echo_config(const RunConfig& cfg);

} // namespace pmlwave
