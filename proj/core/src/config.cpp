#include "pmlwave/config.hpp"

#include "pmlwave/errors.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace pmlwave {

namespace {

using nlohmann::ordered_json;

double as_double(const ordered_json& v, const std::string& key) {
  if (!v.is_number())
    throw ConfigError("config key \"" + key + "\" must be a number");
  return v.get<double>();
}

int as_int(const ordered_json& v, const std::string& key) {
  if (!v.is_number_integer())
    throw ConfigError("config key \"" + key + "\" must be an integer");
  return v.get<int>();
}

long as_long(const ordered_json& v, const std::string& key) {
  if (!v.is_number_integer())
    throw ConfigError("config key \"" + key + "\" must be an integer");
  return v.get<long>();
}

std::string as_string(const ordered_json& v, const std::string& key) {
  if (!v.is_string())
    throw ConfigError("config key \"" + key + "\" must be a string");
  return v.get<std::string>();
}

std::vector<double> as_double_array(const ordered_json& v,
                                    const std::string& key) {
  if (!v.is_array())
    throw ConfigError("config key \"" + key + "\" must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number())
      throw ConfigError("config key \"" + key + "\" must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

QuadKind parse_quadrature(const std::string& s) {
  if (s == "gll") return QuadKind::GLL;
  if (s == "gl") return QuadKind::GL;
  if (s == "glr") return QuadKind::GLR;
  throw ConfigError("config key \"quadrature\" must be one of gll, gl, glr");
}

std::string quadrature_name(QuadKind k) {
  switch (k) {
  case QuadKind::GLL: return "gll";
  case QuadKind::GL: return "gl";
  case QuadKind::GLR: return "glr";
  }
  return "gll";
}

void check_pml_mode(const std::string& value, const std::string& key) {
  if (value != "off" && value != "minus" && value != "plus" && value != "both")
    throw ConfigError("config key \"" + key +
                      "\" must be one of off, minus, plus, both");
}

void check_sampling(const std::string& value) {
  if (value != "nodal" && value != "element_constant")
    throw ConfigError(
        "config key \"damping_sampling\" must be nodal or element_constant");
}

void apply_key(RunConfig& c, const std::string& key, const ordered_json& v) {
  if (key == "experiment") return; // consumed before this pass
  if (key == "dim") c.dim = as_int(v, key);
  else if (key == "degree") c.degree = as_int(v, key);
  else if (key == "quadrature") c.quadrature = parse_quadrature(as_string(v, key));
  else if (key == "x_min_km") c.x_min_km = as_double(v, key);
  else if (key == "x_max_km") c.x_max_km = as_double(v, key);
  else if (key == "y_min_km") c.y_min_km = as_double(v, key);
  else if (key == "y_max_km") c.y_max_km = as_double(v, key);
  else if (key == "z_min_km") c.z_min_km = as_double(v, key);
  else if (key == "z_max_km") c.z_max_km = as_double(v, key);
  else if (key == "dx_km") c.dx_km = as_double(v, key);
  else if (key == "dy_km") c.dy_km = as_double(v, key);
  else if (key == "dz_km") c.dz_km = as_double(v, key);
  else if (key == "c_kms") c.c_kms = as_double(v, key);
  else if (key == "rho_gcm3") c.rho_gcm3 = as_double(v, key);
  else if (key == "r_x_minus") c.r_x_minus = as_double(v, key);
  else if (key == "r_x_plus") c.r_x_plus = as_double(v, key);
  else if (key == "r_y_minus") c.r_y_minus = as_double(v, key);
  else if (key == "r_y_plus") c.r_y_plus = as_double(v, key);
  else if (key == "r_z_minus") c.r_z_minus = as_double(v, key);
  else if (key == "r_z_plus") c.r_z_plus = as_double(v, key);
  else if (key == "pml_x") { c.pml_x = as_string(v, key); check_pml_mode(c.pml_x, key); }
  else if (key == "pml_y") { c.pml_y = as_string(v, key); check_pml_mode(c.pml_y, key); }
  else if (key == "pml_z") { c.pml_z = as_string(v, key); check_pml_mode(c.pml_z, key); }
  else if (key == "pml_delta_km") c.pml_delta_km = as_double(v, key);
  else if (key == "pml_d0_per_s") c.pml_d0_per_s = as_double(v, key);
  else if (key == "pml_tol") c.pml_tol = as_double(v, key);
  else if (key == "pml_c0") c.pml_c0 = as_double(v, key);
  else if (key == "pml_omega_y") c.pml_omega_y = as_double(v, key);
  else if (key == "pml_omega_z") c.pml_omega_z = as_double(v, key);
  else if (key == "damping_sampling") { c.damping_sampling = as_string(v, key); check_sampling(c.damping_sampling); }
  else if (key == "t_final_s") c.t_final_s = as_double(v, key);
  else if (key == "cfl") c.cfl = as_double(v, key);
  else if (key == "output_every_steps") c.output_every_steps = as_int(v, key);
  else if (key == "snapshot_times_s") c.snapshot_times_s = as_double_array(v, key);
  else if (key == "output_dir") c.output_dir = as_string(v, key);
  else if (key == "ic_p_amplitude") c.ic_p_amplitude = as_double(v, key);
  else if (key == "ic_p_x0_km") c.ic_p_x0_km = as_double(v, key);
  else if (key == "ic_p_y0_km") c.ic_p_y0_km = as_double(v, key);
  else if (key == "ic_p_z0_km") c.ic_p_z0_km = as_double(v, key);
  else if (key == "ic_p_halfwidth_km") c.ic_p_halfwidth_km = as_double(v, key);
  else if (key == "source_x_km") c.source_x_km = as_double(v, key);
  else if (key == "source_y_km") c.source_y_km = as_double(v, key);
  else if (key == "source_z_km") c.source_z_km = as_double(v, key);
  else if (key == "source_t0_s") c.source_t0_s = as_double(v, key);
  else if (key == "source_sigma0_s") c.source_sigma0_s = as_double(v, key);
  else if (key == "receiver_x_km") c.receiver_x_km = as_double(v, key);
  else if (key == "receiver_y_km") c.receiver_y_km = as_double(v, key);
  else if (key == "receiver_z_km") c.receiver_z_km = as_double(v, key);
  else if (key == "seed") c.seed = as_long(v, key);
  else throw ConfigError("unknown config key \"" + key + "\"");
}

} // namespace

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.experiment = name;
  if (name == "custom") {
    return c;
  }
  if (name == "strip2d") {
    c.dim = 2;
    c.x_min_km = -60; c.x_max_km = 60;
    c.y_min_km = 0;   c.y_max_km = 50;
    c.dx_km = 10;
    c.pml_x = "both";
    c.pml_delta_km = 10;
    c.pml_d0_per_s = 8.0;
    c.ic_p_amplitude = 1.0;
    c.ic_p_x0_km = 0; c.ic_p_y0_km = 25;
    c.ic_p_halfwidth_km = 3.0;
    c.t_final_s = 500;
    c.output_dir = "out/strip2d";
    return c;
  }
  if (name == "wholespace2d") {
    c.dim = 2;
    c.x_min_km = -60; c.x_max_km = 60;
    c.y_min_km = -10; c.y_max_km = 60;
    c.dx_km = 5;
    c.pml_x = "both"; c.pml_y = "both";
    c.pml_delta_km = 10;
    c.pml_d0_per_s = 8.0;
    c.ic_p_amplitude = 1.0;
    c.ic_p_x0_km = 0; c.ic_p_y0_km = 25;
    c.ic_p_halfwidth_km = 3.0;
    c.t_final_s = 500;
    c.output_dir = "out/wholespace2d";
    return c;
  }
  if (name == "pointsource3d") {
    c.dim = 3;
    c.quadrature = QuadKind::GL;
    c.x_min_km = 0; c.x_max_km = 5;
    c.y_min_km = 0; c.y_max_km = 5;
    c.z_min_km = 0; c.z_max_km = 5;
    c.dx_km = 5.0 / 9.0;
    c.pml_x = "both"; c.pml_y = "both"; c.pml_z = "both";
    c.pml_delta_km = 0.55;
    c.pml_tol = 1e-3;
    c.source_x_km = 1.5; c.source_y_km = 2.5; c.source_z_km = 2.5;
    c.source_t0_s = 0.7; c.source_sigma0_s = 0.1149;
    c.receiver_x_km = 3.5; c.receiver_y_km = 2.5; c.receiver_z_km = 2.5;
    c.t_final_s = 10;
    // Gauss nodes carry a larger spectral radius than Lobatto ones; at
    // CFL 0.35 the order-5 Taylor update sits outside its stability
    // envelope on this mesh (the run grows ~1.5x per step). 0.25 keeps
    // the full and layer-free variants comfortably inside.
    c.cfl = 0.25;
    c.output_dir = "out/pointsource3d";
    return c;
  }
  throw ConfigError("unknown experiment \"" + name +
                    "\" (expected strip2d, wholespace2d, pointsource3d, custom)");
}

RunConfig parse_config_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw ConfigError("config must be a JSON object");

  std::string name = "custom";
  if (auto it = j.find("experiment"); it != j.end())
    name = as_string(*it, "experiment");
  RunConfig c = preset(name);
  for (const auto& [key, value] : j.items()) apply_key(c, key, value);

  if (c.dim != 2 && c.dim != 3)
    throw ConfigError("config key \"dim\" must be 2 or 3");
  const bool any_source =
      c.source_x_km.has_value() || c.source_y_km.has_value() ||
      c.source_z_km.has_value() || c.source_t0_s.has_value() ||
      c.source_sigma0_s.has_value();
  if (c.has_source() != any_source)
    throw ConfigError("point source needs all of source_{x,y,z}_km, "
                      "source_t0_s, source_sigma0_s");
  const bool any_receiver =
      c.receiver_x_km.has_value() || c.receiver_y_km.has_value() ||
      c.receiver_z_km.has_value();
  if (c.has_receiver() != any_receiver)
    throw ConfigError("receiver needs all of receiver_{x,y,z}_km");
  if (c.output_every_steps < 1)
    throw ConfigError("config key \"output_every_steps\" must be >= 1");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string echo_config(const RunConfig& c) {
  ordered_json j;
  j["experiment"] = c.experiment;
  j["dim"] = c.dim;
  j["degree"] = c.degree;
  j["quadrature"] = quadrature_name(c.quadrature);
  j["x_min_km"] = c.x_min_km;
  j["x_max_km"] = c.x_max_km;
  j["y_min_km"] = c.y_min_km;
  j["y_max_km"] = c.y_max_km;
  if (c.dim == 3) {
    j["z_min_km"] = c.z_min_km;
    j["z_max_km"] = c.z_max_km;
  }
  j["dx_km"] = c.dx_km;
  if (c.dy_km) j["dy_km"] = *c.dy_km;
  if (c.dz_km) j["dz_km"] = *c.dz_km;
  j["c_kms"] = c.c_kms;
  j["rho_gcm3"] = c.rho_gcm3;
  j["r_x_minus"] = c.r_x_minus;
  j["r_x_plus"] = c.r_x_plus;
  j["r_y_minus"] = c.r_y_minus;
  j["r_y_plus"] = c.r_y_plus;
  if (c.dim == 3) {
    j["r_z_minus"] = c.r_z_minus;
    j["r_z_plus"] = c.r_z_plus;
  }
  j["pml_x"] = c.pml_x;
  j["pml_y"] = c.pml_y;
  if (c.dim == 3) j["pml_z"] = c.pml_z;
  j["pml_delta_km"] = c.pml_delta_km;
  if (c.pml_d0_per_s) j["pml_d0_per_s"] = *c.pml_d0_per_s;
  if (c.pml_tol) j["pml_tol"] = *c.pml_tol;
  j["pml_c0"] = c.pml_c0;
  j["pml_omega_y"] = c.pml_omega_y;
  if (c.dim == 3) j["pml_omega_z"] = c.pml_omega_z;
  j["damping_sampling"] = c.damping_sampling;
  j["t_final_s"] = c.t_final_s;
  j["cfl"] = c.cfl;
  j["output_every_steps"] = c.output_every_steps;
  j["snapshot_times_s"] = c.snapshot_times_s;
  j["output_dir"] = c.output_dir;
  j["ic_p_amplitude"] = c.ic_p_amplitude;
  j["ic_p_x0_km"] = c.ic_p_x0_km;
  j["ic_p_y0_km"] = c.ic_p_y0_km;
  if (c.dim == 3) j["ic_p_z0_km"] = c.ic_p_z0_km;
  j["ic_p_halfwidth_km"] = c.ic_p_halfwidth_km;
  if (c.has_source()) {
    j["source_x_km"] = *c.source_x_km;
    j["source_y_km"] = *c.source_y_km;
    j["source_z_km"] = *c.source_z_km;
    j["source_t0_s"] = *c.source_t0_s;
    j["source_sigma0_s"] = *c.source_sigma0_s;
  }
  if (c.has_receiver()) {
    j["receiver_x_km"] = *c.receiver_x_km;
    j["receiver_y_km"] = *c.receiver_y_km;
    j["receiver_z_km"] = *c.receiver_z_km;
  }
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

} // namespace pmlwave
