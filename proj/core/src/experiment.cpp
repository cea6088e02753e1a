#include "pmlwave/experiment.hpp"

#include "pmlwave/errors.hpp"
#include "pmlwave/output.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace pmlwave {

namespace {

std::array<std::array<bool, 2>, 3> parse_sides(const RunConfig& cfg) {
  std::array<std::array<bool, 2>, 3> sides{};
  const std::string* keys[3] = {&cfg.pml_x, &cfg.pml_y, &cfg.pml_z};
  for (int a = 0; a < 3; ++a) {
    const std::string& v = *keys[a];
    sides[a][0] = v == "minus" || v == "both";
    sides[a][1] = v == "plus" || v == "both";
  }
  return sides;
}

std::string fmt_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

struct CoreResult {
  RunArtifacts art;
  Scene scene;
  State q;
  double dt = 0;
  int steps = 0;

  CoreResult(Scene s, State st) : scene(std::move(s)), q(std::move(st)) {}
};

CoreResult run_core(const RunConfig& cfg, bool write_files) {
  Scene scene = build_scene(cfg);
  State q = initial_state(scene, cfg);
  CoreResult res(std::move(scene), std::move(q));
  Scene& sc = res.scene;

  RhsContext ctx = scene_context(sc);
  TaylorStepper stepper(ctx, cfg.degree + 1);

  if (!(cfg.t_final_s >= 0)) throw ConfigError("t_final_s must be >= 0");
  const double dt = cfl_dt(sc.mesh, sc.material, cfg.degree, cfg.cfl);
  const long n_full = static_cast<long>(std::floor(cfg.t_final_s / dt + 1e-12));
  const double remainder = cfg.t_final_s - n_full * dt;
  const bool partial = remainder > 1e-12 * dt;
  const long total = n_full + (partial ? 1 : 0);
  res.dt = dt;
  res.art.dt_s = dt;

  const std::string dir = cfg.output_dir;
  std::optional<CsvWriter> series_csv, receiver_csv;
  const bool analytic_receiver = cfg.dim == 3 && cfg.has_source();
  if (write_files) {
    write_text_file(dir + "/effective_config.json", echo_config(cfg));
    nlohmann::ordered_json derived;
    derived["dt_s"] = dt;
    derived["steps"] = total;
    derived["elements"] = sc.mesh.n_elements();
    derived["nodes_per_element"] = ctx.layout.nodes;
    derived["dofs"] = ctx.layout.size();
    derived["fields"] = ctx.layout.n_fields;
    if (sc.pml.any_active(sc.mesh.dim)) {
      if (std::isfinite(sc.resolved_tol)) derived["tol"] = sc.resolved_tol;
      derived["d0_per_s"] = sc.resolved_d0;
    }
    write_text_file(dir + "/derived.json", derived.dump(2) + "\n");
    series_csv.emplace(dir + "/series.csv",
                       std::vector<std::string>{"t_s", "energy",
                                                "linf_p_global",
                                                "linf_p_interior",
                                                "diss_flux_rate",
                                                "diss_boundary_rate"});
    if (cfg.has_receiver()) {
      std::vector<std::string> cols{"t_s", "p"};
      if (analytic_receiver) cols.push_back("p_analytic");
      receiver_csv.emplace(dir + "/receiver.csv", cols);
    }
  }

  const std::array<double, 3> rx{cfg.receiver_x_km.value_or(0),
                                 cfg.receiver_y_km.value_or(0),
                                 cfg.receiver_z_km.value_or(0)};
  double source_dist = 0;
  if (analytic_receiver) {
    const double ddx = rx[0] - *cfg.source_x_km;
    const double ddy = rx[1] - *cfg.source_y_km;
    const double ddz = rx[2] - *cfg.source_z_km;
    source_dist = std::sqrt(ddx * ddx + ddy * ddy + ddz * ddz);
  }

  std::vector<double> pending = cfg.snapshot_times_s;
  std::sort(pending.begin(), pending.end());

  auto sample_series = [&](double t) {
    TimeSample s;
    s.t_s = t;
    s.energy = discrete_energy(ctx, res.q);
    s.linf_p_global = max_abs_p(res.q);
    s.linf_p_interior = interior_max_abs_p(sc.mesh, sc.op, res.q, sc.interior);
    const FaceEnergyRates rates = face_energy_rates(ctx, res.q);
    s.diss_flux_rate = rates.flux_dissipation;
    s.diss_boundary_rate = rates.boundary_dissipation;
    res.art.series.push_back(s);
    if (series_csv)
      series_csv->row({s.t_s, s.energy, s.linf_p_global, s.linf_p_interior,
                       s.diss_flux_rate, s.diss_boundary_rate});
  };

  auto sample_receiver = [&](double t) {
    if (!cfg.has_receiver()) return;
    ReceiverSample r;
    r.t_s = t;
    r.p = sample_pressure(sc.mesh, sc.op, res.q, rx);
    r.p_analytic =
        analytic_receiver
            ? analytic_point_pressure(source_dist, t, cfg.c_kms,
                                      *cfg.source_t0_s, *cfg.source_sigma0_s)
            : std::numeric_limits<double>::quiet_NaN();
    res.art.receiver.push_back(r);
    if (receiver_csv) {
      std::vector<double> row{r.t_s, r.p};
      if (analytic_receiver) row.push_back(r.p_analytic);
      receiver_csv->row(row);
    }
  };

  auto take_snapshots = [&](double t_prev, double t_now) {
    while (!pending.empty() && pending.front() <= t_now + 1e-9) {
      const double st = pending.front();
      pending.erase(pending.begin());
      if (write_files && st > t_prev - 1e-9)
        write_vtk_snapshot(dir + "/snapshot_t" + fmt_time(st) + ".vtk",
                           sc.mesh, sc.op, res.q, t_now);
    }
  };

  sample_series(0.0);
  sample_receiver(0.0);
  take_snapshots(-1.0, 0.0);

  for (long k = 0; k < total; ++k) {
    const double t = k * dt;
    const double t_next = (k == n_full) ? cfg.t_final_s
                          : (k + 1 == total && !partial) ? cfg.t_final_s
                                                         : (k + 1) * dt;
    const double step_dt = t_next - t;
    try {
      stepper.step(res.q, t, step_dt);
    } catch (const NumericalError& e) {
      res.art.failure = e.what();
      res.art.failure_time_s = t;
      if (write_files) {
        nlohmann::ordered_json rec;
        rec["message"] = e.what();
        rec["time_s"] = t;
        write_text_file(dir + "/failure.json", rec.dump(2) + "\n");
      }
      break;
    }
    res.steps = static_cast<int>(k + 1);
    res.art.steps = res.steps;
    sample_receiver(t_next);
    take_snapshots(t, t_next);
    if ((k + 1) % cfg.output_every_steps == 0 || k + 1 == total)
      sample_series(t_next);
  }

  return res;
}

} // namespace

Scene build_scene(const RunConfig& cfg) {
  if (!(cfg.dx_km > 0)) throw ConfigError("dx_km must be > 0");
  const double dx = cfg.dx_km;
  const double dy = cfg.dy_km.value_or(dx);
  const double dz = cfg.dz_km.value_or(dx);

  Scene sc;
  sc.mesh = uniform_mesh(cfg.dim, {cfg.x_min_km, cfg.x_max_km},
                         {cfg.y_min_km, cfg.y_max_km},
                         {cfg.z_min_km, cfg.z_max_km}, {dx, dy, dz});
  sc.op = build_operators(cfg.quadrature, cfg.degree);

  const int nn = cfg.dim == 2 ? (cfg.degree + 1) * (cfg.degree + 1)
                              : (cfg.degree + 1) * (cfg.degree + 1) *
                                    (cfg.degree + 1);
  sc.material = constant_material(sc.mesh, nn, cfg.c_kms, cfg.rho_gcm3);

  sc.bc.r = {{{cfg.r_x_minus, cfg.r_x_plus},
              {cfg.r_y_minus, cfg.r_y_plus},
              {cfg.r_z_minus, cfg.r_z_plus}}};
  sc.bc.validate(cfg.dim);

  sc.pml.sides = parse_sides(cfg);
  if (cfg.dim == 2 && sc.pml.axis_active(2))
    throw ConfigError("pml_z requires dim = 3");
  sc.pml.delta = cfg.pml_delta_km;
  sc.pml.omega_y = cfg.pml_omega_y;
  sc.pml.omega_z = cfg.pml_omega_z;
  sc.pml.sampling = cfg.damping_sampling == "nodal"
                        ? PmlConfig::Sampling::Nodal
                        : PmlConfig::Sampling::ElementConstant;

  const double domain_lo[3] = {cfg.x_min_km, cfg.y_min_km, cfg.z_min_km};
  const double domain_hi[3] = {cfg.x_max_km, cfg.y_max_km, cfg.z_max_km};
  for (int a = 0; a < 3; ++a) {
    sc.interior[a] = {domain_lo[a], domain_hi[a]};
    if (a < cfg.dim) {
      if (sc.pml.sides[a][0]) sc.interior[a][0] += cfg.pml_delta_km;
      if (sc.pml.sides[a][1]) sc.interior[a][1] -= cfg.pml_delta_km;
    }
    sc.pml.interior[a] = sc.interior[a];
  }

  sc.resolved_tol = std::numeric_limits<double>::quiet_NaN();
  sc.resolved_d0 = 0;
  if (sc.pml.any_active(cfg.dim)) {
    if (cfg.pml_d0_per_s) {
      sc.resolved_d0 = *cfg.pml_d0_per_s;
      if (!(sc.resolved_d0 >= 0))
        throw ConfigError("pml_d0_per_s must be >= 0");
    } else if (cfg.pml_tol) {
      sc.resolved_tol = *cfg.pml_tol;
      sc.resolved_d0 = compute_d0(cfg.c_kms, cfg.pml_delta_km, sc.resolved_tol);
    } else {
      sc.resolved_tol = compute_tol(cfg.pml_c0, cfg.pml_delta_km, dx, cfg.degree);
      sc.resolved_d0 =
          derive_d0(cfg.c_kms, cfg.pml_delta_km, cfg.pml_c0, dx, cfg.degree);
    }
    sc.pml.d0 = sc.resolved_d0;
    sc.damping = sample_damping(sc.mesh, sc.op, sc.pml);
  } else {
    sc.damping = no_damping(sc.mesh);
  }

  if (cfg.has_source()) {
    std::array<double, 3> pos{*cfg.source_x_km, *cfg.source_y_km,
                              cfg.dim == 3 ? *cfg.source_z_km : 0.0};
    sc.source = make_point_source(sc.mesh, sc.op, pos, *cfg.source_t0_s,
                                  *cfg.source_sigma0_s);
  }
  return sc;
}

RhsContext scene_context(Scene& sc) {
  return make_context(sc.mesh, sc.op, sc.material, sc.damping, sc.bc,
                      sc.pml.omega_y, sc.pml.omega_z, sc.source);
}

State initial_state(const Scene& sc, const RunConfig& cfg) {
  State q(StateLayout::make(sc.mesh, sc.op.degree));
  if (cfg.ic_p_amplitude == 0.0) return q;
  if (!(cfg.ic_p_halfwidth_km > 0))
    throw ConfigError("ic_p_halfwidth_km must be > 0");

  const StateLayout& L = q.layout;
  const int n1 = sc.op.n();
  const double ln2 = std::log(2.0);
  const double w2 = cfg.ic_p_halfwidth_km * cfg.ic_p_halfwidth_km;
  const double x0[3] = {cfg.ic_p_x0_km, cfg.ic_p_y0_km, cfg.ic_p_z0_km};

  for (int n = 0; n < sc.mesh.counts[2]; ++n)
    for (int m = 0; m < sc.mesh.counts[1]; ++m)
      for (int l = 0; l < sc.mesh.counts[0]; ++l) {
        const int e = sc.mesh.index(l, m, n);
        double* p = q.field(e, L.field_p());
        const std::array<int, 3> el{l, m, n};
        for (int nd = 0; nd < L.nodes; ++nd) {
          const int idx[3] = {nd % n1, (nd / n1) % n1, nd / (n1 * n1)};
          double r2 = 0;
          for (int a = 0; a < sc.mesh.dim; ++a) {
            const double x =
                reference_to_physical(sc.mesh, a, el[a], sc.op.nodes[idx[a]]);
            r2 += (x - x0[a]) * (x - x0[a]);
          }
          p[nd] = cfg.ic_p_amplitude * std::exp(-ln2 * r2 / w2);
        }
      }
  return q;
}

RunArtifacts run_experiment(const RunConfig& cfg) {
  CoreResult res = run_core(cfg, !cfg.output_dir.empty());
  return std::move(res.art);
}

FinalField run_to_final(const RunConfig& cfg) {
  RunConfig quiet = cfg;
  quiet.output_dir.clear();
  CoreResult res = run_core(quiet, false);
  if (!res.art.failure.empty())
    throw NumericalError(res.art.failure, -1, "state", res.art.failure_time_s);
  return FinalField{std::move(res.scene), std::move(res.q), res.dt,
                    res.steps};
}

ConvergenceResult convergence_study(const RunConfig& base, char mode,
                                    const std::vector<double>& levels) {
  if (mode != 'h' && mode != 'p')
    throw ConfigError("convergence mode must be 'h' or 'p'");
  if (levels.size() < 2)
    throw ConfigError("convergence study needs at least two levels");

  ConvergenceResult result;
  result.mode = mode;

  for (double level : levels) {
    RunConfig cfg = base;
    cfg.output_dir.clear();
    cfg.pml_d0_per_s.reset();
    cfg.pml_tol.reset();
    if (mode == 'h') {
      cfg.dx_km = level;
      cfg.dy_km.reset();
      cfg.dz_km.reset();
    } else {
      const int deg = static_cast<int>(std::lround(level));
      if (std::abs(level - deg) > 1e-9)
        throw ConfigError("p-mode levels must be integer degrees");
      cfg.degree = deg;
    }

    FinalField run = run_to_final(cfg);

    RunConfig ref = cfg;
    const double c = cfg.c_kms;
    const double spacing[3] = {cfg.dx_km, cfg.dy_km.value_or(cfg.dx_km),
                               cfg.dz_km.value_or(cfg.dx_km)};
    double* lo[3] = {&ref.x_min_km, &ref.y_min_km, &ref.z_min_km};
    double* hi[3] = {&ref.x_max_km, &ref.y_max_km, &ref.z_max_km};
    for (int a = 0; a < cfg.dim; ++a) {
      const double margin =
          std::ceil(c * cfg.t_final_s / spacing[a]) * spacing[a];
      if (run.scene.pml.sides[a][0]) *lo[a] -= margin;
      if (run.scene.pml.sides[a][1]) *hi[a] += margin;
    }
    ref.pml_x = ref.pml_y = ref.pml_z = "off";
    FinalField reference = run_to_final(ref);

    ConvergenceLevel lev;
    lev.dx_km = cfg.dx_km;
    lev.degree = cfg.degree;
    lev.tol = run.scene.resolved_tol;
    lev.d0_per_s = run.scene.resolved_d0;
    lev.dt_s = run.dt_s;
    lev.interior_linf_error =
        interior_max_p_diff(run.scene.mesh, run.q, reference.scene.mesh,
                            reference.q, run.scene.op, run.scene.interior);
    result.levels.push_back(lev);
  }

  result.strictly_decreasing = true;
  for (std::size_t i = 1; i < result.levels.size(); ++i)
    if (!(result.levels[i].interior_linf_error <
          result.levels[i - 1].interior_linf_error))
      result.strictly_decreasing = false;

  if (mode == 'h') {
    std::vector<double> hs, errs;
    for (const auto& lev : result.levels) {
      hs.push_back(lev.dx_km);
      errs.push_back(lev.interior_linf_error);
    }
    result.observed_order = fit_order(hs, errs);
  } else {
    result.observed_order = std::numeric_limits<double>::quiet_NaN();
  }

  if (!base.output_dir.empty()) {
    CsvWriter csv(base.output_dir + "/convergence.csv",
                  {"dx_km", "degree", "tol", "d0_per_s", "dt_s",
                   "interior_linf_error"});
    for (const auto& lev : result.levels)
      csv.row({lev.dx_km, static_cast<double>(lev.degree), lev.tol,
               lev.d0_per_s, lev.dt_s, lev.interior_linf_error});
  }
  return result;
}

} // namespace pmlwave
