#include "pmlwave/errors.hpp"
#include "pmlwave/experiment.hpp"

#include "doctest.h"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace pmlwave;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(bool(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

// Small absorbing strip with one-element layers on both x sides.
RunConfig small_strip() {
  RunConfig c;
  c.degree = 3;
  c.x_min_km = -30;
  c.x_max_km = 30;
  c.y_min_km = 0;
  c.y_max_km = 20;
  c.dx_km = 10;
  c.pml_x = "both";
  c.pml_delta_km = 10;
  c.pml_d0_per_s = 8.0;
  c.ic_p_amplitude = 1.0;
  c.ic_p_x0_km = 0;
  c.ic_p_y0_km = 10;
  c.t_final_s = 5;
  return c;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const char* name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("experiment: scene assembly for the strip preset") {
  const Scene sc = build_scene(preset("strip2d"));
  CHECK(sc.mesh.counts[0] == 12);
  CHECK(sc.mesh.counts[1] == 5);
  CHECK(sc.interior[0][0] == doctest::Approx(-50.0));
  CHECK(sc.interior[0][1] == doctest::Approx(50.0));
  CHECK(sc.interior[1][0] == doctest::Approx(0.0));
  CHECK(sc.interior[1][1] == doctest::Approx(50.0));
  CHECK(sc.resolved_d0 == 8.0);
  CHECK(std::isnan(sc.resolved_tol));
  CHECK(sc.pml.sides[0][0]);
  CHECK(sc.pml.sides[0][1]);
  CHECK(!sc.pml.sides[1][0]);
  // Only the outermost element columns carry damping.
  for (int e = 0; e < sc.mesh.n_elements(); ++e) {
    const int l = e % sc.mesh.counts[0];
    CHECK((sc.damping.element_active[e] != 0) == (l == 0 || l == 11));
  }
}

TEST_CASE("experiment: scene assembly for the 3D point-source preset") {
  const Scene sc = build_scene(preset("pointsource3d"));
  CHECK(sc.mesh.dim == 3);
  CHECK(sc.mesh.counts[0] == 9);
  CHECK(sc.resolved_tol == 1e-3);
  CHECK(sc.resolved_d0 ==
        doctest::Approx(compute_d0(1.484, 0.55, 1e-3)).epsilon(1e-14));
  CHECK(sc.resolved_d0 == doctest::Approx(37.276).epsilon(1e-3));
  REQUIRE(sc.source.has_value());
  CHECK(sc.interior[2][0] == doctest::Approx(0.55));
  CHECK(sc.interior[2][1] == doctest::Approx(4.45));
}

TEST_CASE("experiment: damping amplitude falls back to the tolerance model") {
  RunConfig c = small_strip();
  c.pml_d0_per_s.reset();
  const Scene sc = build_scene(c);
  CHECK(sc.resolved_tol == compute_tol(c.pml_c0, 10.0, 10.0, 3));
  CHECK(sc.resolved_d0 == derive_d0(c.c_kms, 10.0, c.pml_c0, 10.0, 3));
  CHECK(sc.resolved_d0 > 0.0);
}

TEST_CASE("experiment: scene rejects inconsistent settings") {
  RunConfig c = small_strip();
  c.pml_z = "both";
  CHECK_THROWS_AS((void)build_scene(c), ConfigError);
  RunConfig d = small_strip();
  d.dx_km = 0;
  CHECK_THROWS_AS((void)build_scene(d), ConfigError);
}

TEST_CASE("experiment: the initial pulse is collocated exactly") {
  const RunConfig cfg = preset("strip2d");
  const Scene sc = build_scene(cfg);
  const State q = initial_state(sc, cfg);
  // (0, 25) is a grid node of the P = 4 Lobatto mesh, so the peak is exact.
  CHECK(max_abs_p(q) == 1.0);
  const StateLayout& L = q.layout;
  for (int e = 0; e < sc.mesh.n_elements(); ++e)
    for (int f = 1; f < L.n_fields; ++f) {
      const double* v = q.field(e, f);
      for (int nd = 0; nd < L.nodes; ++nd) REQUIRE(v[nd] == 0.0);
    }
}

TEST_CASE("experiment: a short run produces the expected artifacts") {
  TempDir tmp("pmlwave_exp_run");
  RunConfig c = small_strip();
  c.output_dir = (tmp.path / "a").string();
  c.snapshot_times_s = {0.0, 2.0};
  c.receiver_x_km = 5.0;
  c.receiver_y_km = 10.0;
  c.receiver_z_km = 0.0;

  const RunArtifacts art = run_experiment(c);
  CHECK(art.failure.empty());
  const double dt_ref = 0.35 / (7.0 * 1.484) * 10.0;
  CHECK(art.dt_s == doctest::Approx(dt_ref).epsilon(1e-14));
  CHECK(art.steps == 15); // 14 full steps plus the partial one
  REQUIRE(art.series.size() == 16);
  CHECK(art.series.front().t_s == 0.0);
  CHECK(art.series.back().t_s == 5.0);
  CHECK(art.receiver.size() == 16);
  CHECK(std::isnan(art.receiver.back().p_analytic)); // 2D has no reference

  const double e0 = art.series.front().energy;
  CHECK(e0 > 0.0);
  for (std::size_t i = 1; i < art.series.size(); ++i) {
    CHECK(art.series[i].energy <= art.series[i - 1].energy + 1e-10 * e0);
    CHECK(art.series[i].diss_flux_rate >= 0.0);
    CHECK(art.series[i].diss_boundary_rate >= -1e-14);
  }

  const fs::path dir = c.output_dir;
  const RunConfig echoed =
      parse_config_text(read_file(dir / "effective_config.json"));
  CHECK(echoed.t_final_s == 5.0);
  CHECK(echo_config(echoed) == echo_config(c));

  const auto derived =
      nlohmann::ordered_json::parse(read_file(dir / "derived.json"));
  CHECK(derived.at("steps").get<int>() == 15);
  CHECK(derived.at("elements").get<int>() == 12);
  CHECK(derived.at("dofs").get<std::size_t>() == 12u * 4u * 16u);
  CHECK(derived.at("d0_per_s").get<double>() == 8.0);

  CHECK(count_lines(read_file(dir / "series.csv")) == 17);    // header + 16
  CHECK(count_lines(read_file(dir / "receiver.csv")) == 17);
  CHECK(fs::exists(dir / "snapshot_t0.vtk"));
  CHECK(fs::exists(dir / "snapshot_t2.vtk"));
}

TEST_CASE("experiment: repeated runs are bit-identical") {
  TempDir tmp("pmlwave_exp_repeat");
  RunConfig c = small_strip();
  c.output_dir = (tmp.path / "r1").string();
  const RunArtifacts a = run_experiment(c);
  c.output_dir = (tmp.path / "r2").string();
  const RunArtifacts b = run_experiment(c);
  REQUIRE(a.series.size() == b.series.size());
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    CHECK(a.series[i].energy == b.series[i].energy);
    CHECK(a.series[i].linf_p_global == b.series[i].linf_p_global);
    CHECK(a.series[i].linf_p_interior == b.series[i].linf_p_interior);
    CHECK(a.series[i].diss_flux_rate == b.series[i].diss_flux_rate);
  }
  CHECK(read_file(tmp.path / "r1" / "series.csv") ==
        read_file(tmp.path / "r2" / "series.csv"));
}

TEST_CASE("experiment: an unstable step size is reported, not thrown") {
  TempDir tmp("pmlwave_exp_blowup");
  RunConfig c = small_strip();
  c.cfl = 10.0; // far beyond the stability limit
  c.t_final_s = 2000.0;
  c.output_dir = (tmp.path / "b").string();

  const RunArtifacts art = run_experiment(c);
  REQUIRE(!art.failure.empty());
  CHECK(art.failure.find("non-finite") != std::string::npos);
  CHECK(art.failure_time_s > 0.0);
  CHECK(fs::exists(fs::path(c.output_dir) / "failure.json"));
  const auto rec = nlohmann::ordered_json::parse(
      read_file(fs::path(c.output_dir) / "failure.json"));
  CHECK(rec.at("time_s").get<double>() == art.failure_time_s);

  c.output_dir.clear();
  CHECK_THROWS_AS((void)run_to_final(c), NumericalError);
}

TEST_CASE("experiment: refinement drives the interior layer error down") {
  TempDir tmp("pmlwave_exp_conv");
  RunConfig base = small_strip();
  base.y_max_km = 10;
  base.ic_p_y0_km = 5;
  base.pml_d0_per_s.reset();
  base.t_final_s = 20; // wave enters the layer around t = 13.5
  base.output_dir = (tmp.path / "c").string();

  const ConvergenceResult res = convergence_study(base, 'h', {10, 5});
  REQUIRE(res.levels.size() == 2);
  CHECK(res.mode == 'h');
  for (const auto& lev : res.levels) {
    CHECK(lev.tol > 0.0);
    CHECK(lev.d0_per_s > 0.0);
    CHECK(lev.interior_linf_error > 0.0);
    CHECK(lev.interior_linf_error < 0.5); // far below the unit pulse
  }
  CHECK(res.levels[0].dx_km == 10.0);
  CHECK(res.levels[1].dx_km == 5.0);
  CHECK(res.strictly_decreasing);
  CHECK(res.observed_order > 1.5);
  CHECK(count_lines(read_file(tmp.path / "c" / "convergence.csv")) == 3);

  base.output_dir.clear();
  base.dx_km = 5;
  const ConvergenceResult pres = convergence_study(base, 'p', {2, 3});
  CHECK(pres.levels[0].degree == 2);
  CHECK(pres.levels[1].degree == 3);
  CHECK(pres.strictly_decreasing);
  CHECK(std::isnan(pres.observed_order));
}

TEST_CASE("experiment: convergence study input checks") {
  const RunConfig base = small_strip();
  CHECK_THROWS_AS((void)convergence_study(base, 'x', {10, 5}), ConfigError);
  CHECK_THROWS_AS((void)convergence_study(base, 'h', {10}), ConfigError);
  CHECK_THROWS_AS((void)convergence_study(base, 'p', {2.5, 3}), ConfigError);
}
