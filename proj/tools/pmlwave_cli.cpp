// Command-line front end: run experiments, convergence studies, operator
// spectra, and the built-in property self-checks.

#include "pmlwave/analysis.hpp"
#include "pmlwave/errors.hpp"
#include "pmlwave/experiment.hpp"
#include "pmlwave/output.hpp"

#include "CLI11.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>

namespace {

using namespace pmlwave;

void apply_thread_override() {
  const char* env = std::getenv("PMLWAVE_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1)
    throw ConfigError("PMLWAVE_THREADS must be a positive integer");
#ifdef _OPENMP
  omp_set_num_threads(static_cast<int>(n));
#endif
}

int cmd_run(const std::string& config_path) {
  const RunConfig cfg = load_config(config_path);
  const RunArtifacts art = run_experiment(cfg);

  std::printf("experiment      %s\n", cfg.experiment.c_str());
  std::printf("dt              %.6g s\n", art.dt_s);
  std::printf("steps taken     %d\n", art.steps);
  if (!art.series.empty()) {
    const TimeSample& last = art.series.back();
    std::printf("final time      %.6g s\n", last.t_s);
    std::printf("final Linf |p|  %.6g\n", last.linf_p_global);
    std::printf("final energy    %.6g\n", last.energy);
  }
  if (!cfg.output_dir.empty())
    std::printf("outputs in      %s\n", cfg.output_dir.c_str());
  if (!art.failure.empty()) {
    std::fprintf(stderr, "numerical failure at t = %.6g s: %s\n",
                 art.failure_time_s, art.failure.c_str());
    return 3;
  }
  return 0;
}

int cmd_converge(const std::string& config_path, const std::string& mode,
                 std::vector<double> levels) {
  if (mode != "h" && mode != "p")
    throw ConfigError("--mode must be h or p");
  const RunConfig cfg = load_config(config_path);
  if (levels.empty())
    levels = (mode == "h") ? std::vector<double>{10, 5, 2.5}
                           : std::vector<double>{2, 4, 6};

  const ConvergenceResult res = convergence_study(cfg, mode[0], levels);

  std::printf("%10s %6s %12s %12s %12s %14s\n", "dx_km", "P", "tol",
              "d0_per_s", "dt_s", "interior_err");
  for (const auto& lev : res.levels)
    std::printf("%10.4g %6d %12.4g %12.4g %12.4g %14.6g\n", lev.dx_km,
                lev.degree, lev.tol, lev.d0_per_s, lev.dt_s,
                lev.interior_linf_error);
  if (mode == "h")
    std::printf("observed order  %.3f\n", res.observed_order);
  std::printf("strictly decreasing  %s\n",
              res.strictly_decreasing ? "yes" : "no");
  if (!cfg.output_dir.empty())
    std::printf("table written to %s/convergence.csv\n",
                cfg.output_dir.c_str());
  return 0;
}

int cmd_spectrum(const std::string& config_path) {
  const RunConfig cfg = load_config(config_path);
  Scene scene = build_scene(cfg);
  RhsContext ctx = scene_context(scene);
  if (ctx.layout.size() > 4096)
    throw ConfigError("spectrum needs <= 4096 unknowns; shrink the mesh or "
                      "the polynomial degree");

  SpectrumResult spec = operator_spectrum(ctx);
  std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() > b.real();
              return a.imag() > b.imag();
            });

  std::ostringstream csv;
  csv << "re_per_s,im_per_s\n";
  char buf[80];
  for (const auto& ev : spec.eigenvalues) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", ev.real(), ev.imag());
    csv << buf;
  }
  if (cfg.output_dir.empty()) {
    std::fputs(csv.str().c_str(), stdout);
  } else {
    write_text_file(cfg.output_dir + "/spectrum.csv", csv.str());
    std::printf("eigenvalues written to %s/spectrum.csv\n",
                cfg.output_dir.c_str());
  }
  std::printf("unknowns            %zu\n", ctx.layout.size());
  std::printf("spectral abscissa   %.6e\n", spec.abscissa);
  std::printf("operator norm (inf) %.6e\n", spec.norm_inf);
  std::printf("eigenpair residual  %.6e\n", spec.max_residual);
  return 0;
}

bool report(const char* name, bool ok, const std::string& detail) {
  std::printf("[SELFTEST] %-28s %s%s%s\n", name, ok ? "PASS" : "FAIL",
              detail.empty() ? "" : "  ", detail.c_str());
  return ok;
}

int cmd_selftest() {
  bool all = true;
  char detail[160];

  // SBP identity and quadrature exactness for every kind and degree.
  {
    double worst_sbp = 0, worst_exact = 0;
    for (QuadKind kind : {QuadKind::GLL, QuadKind::GL, QuadKind::GLR}) {
      for (int P = 1; P <= 8; ++P) {
        const Operators1D op = build_operators(kind, P);
        const int n = op.n();
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double b = op.e_right[i] * op.e_right[j] -
                             op.e_left[i] * op.e_left[j];
            worst_sbp = std::max(
                std::abs(op.Q[i * n + j] + op.Q[j * n + i] - b), worst_sbp);
          }
        const int exact_deg = kind == QuadKind::GLL ? 2 * P - 1
                              : kind == QuadKind::GL ? 2 * P + 1
                                                     : 2 * P;
        for (int d = 0; d <= exact_deg; ++d) {
          double integral = 0;
          for (int i = 0; i < n; ++i)
            integral += op.weights[i] * std::pow(op.nodes[i], d);
          const double ref = (d % 2 == 1) ? 0.0 : 2.0 / (d + 1);
          worst_exact = std::max(std::abs(integral - ref), worst_exact);
        }
      }
    }
    std::snprintf(detail, sizeof detail, "max SBP defect %.2e, quad error %.2e",
                  worst_sbp, worst_exact);
    all &= report("operators: SBP + exactness", worst_sbp <= 1e-12 &&
                                                    worst_exact <= 1e-12,
                  detail);
  }

  // Interface hat states preserve the outgoing characteristics.
  {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1, 1), zdist(0.3, 3.0);
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const double pm = u(rng), vm = u(rng), Zm = zdist(rng);
      const double pp = u(rng), vp = u(rng), Zp = zdist(rng);
      const TraceState hat = interface_hat(pm, vm, Zm, pp, vp, Zp);
      worst = std::max(worst, std::abs((Zm * hat.vn_hat + hat.p_hat) -
                                       (Zm * vm + pm)));
      worst = std::max(worst, std::abs((Zp * hat.vn_hat - hat.p_hat) -
                                       (Zp * vp - pp)));
    }
    std::snprintf(detail, sizeof detail, "max defect %.2e", worst);
    all &= report("flux: characteristic identity", worst <= 1e-13, detail);
  }

  // Chain-rule energy rate equals the face breakdown on random states.
  {
    double worst = 0;
    for (int dim : {2, 3}) {
      RunConfig cfg;
      cfg.dim = dim;
      cfg.degree = 3;
      cfg.x_min_km = 0; cfg.x_max_km = 4;
      cfg.y_min_km = 0; cfg.y_max_km = 2;
      cfg.z_min_km = 0; cfg.z_max_km = 2;
      cfg.dx_km = 1;
      cfg.r_x_minus = -1; cfg.r_y_plus = 1;
      Scene scene = build_scene(cfg);
      RhsContext ctx = scene_context(scene);
      State q(ctx.layout), dq(ctx.layout);
      std::mt19937_64 rng(777 + dim);
      std::uniform_real_distribution<double> u(-1, 1);
      for (int trial = 0; trial < 10; ++trial) {
        // Random physical fields; the auxiliary fields stay zero, since the
        // undamped budget covers only pressure and velocity.
        q.fill(0.0);
        for (int e = 0; e < ctx.layout.n_elements; ++e)
          for (int f = 0; f <= dim; ++f) {
            double* v = q.field(e, f);
            for (int nd = 0; nd < ctx.layout.nodes; ++nd) v[nd] = u(rng);
          }
        apply_operator(ctx, q, dq);
        const double chain = energy_rate_chain(ctx, q, dq);
        const FaceEnergyRates rates = face_energy_rates(ctx, q);
        const double face = -rates.flux_dissipation - rates.boundary_dissipation;
        worst = std::max(worst,
                         std::abs(chain - face) / std::max(1.0, std::abs(face)));
      }
    }
    std::snprintf(detail, sizeof detail, "max relative defect %.2e", worst);
    all &= report("energy: rate identity", worst <= 1e-10, detail);
  }

  // Two identical short runs produce bit-identical states.
  {
    RunConfig cfg;
    cfg.dim = 2;
    cfg.degree = 4;
    cfg.x_min_km = -20; cfg.x_max_km = 20;
    cfg.y_min_km = 0; cfg.y_max_km = 20;
    cfg.dx_km = 10;
    cfg.pml_x = "both";
    cfg.pml_delta_km = 10;
    cfg.pml_d0_per_s = 8.0;
    cfg.ic_p_amplitude = 1;
    cfg.ic_p_x0_km = 0; cfg.ic_p_y0_km = 10;
    cfg.t_final_s = 3;
    const FinalField a = run_to_final(cfg);
    const FinalField b = run_to_final(cfg);
    const bool same = a.q.data == b.q.data;
    all &= report("determinism: repeated run", same,
                  same ? "bit-identical" : "states differ");
  }

  return all ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acoustic wave solver with energy-stable absorbing layers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string mode = "h";
  std::vector<double> levels;

  CLI::App* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "JSON config file")->required();

  CLI::App* conv =
      app.add_subcommand("converge", "Convergence study around a config");
  conv->add_option("config", config_path, "JSON config file")->required();
  conv->add_option("--mode", mode, "h (element size) or p (degree)");
  conv->add_option("--levels", levels,
                   "refinement levels (dx values for h, degrees for p)")
      ->delimiter(',');

  CLI::App* spec =
      app.add_subcommand("spectrum", "Eigenvalues of the semi-discrete operator");
  spec->add_option("config", config_path, "JSON config file")->required();

  app.add_subcommand("selftest", "Built-in operator and energy property checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    apply_thread_override();
    if (run->parsed()) return cmd_run(config_path);
    if (conv->parsed()) return cmd_converge(config_path, mode, levels);
    if (spec->parsed()) return cmd_spectrum(config_path);
    return cmd_selftest();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
