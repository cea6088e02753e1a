#include "pmlwave/config.hpp"
#include "pmlwave/errors.hpp"

#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace pmlwave;

TEST_CASE("config: built-in experiments") {
  SUBCASE("strip") {
    const RunConfig c = preset("strip2d");
    CHECK(c.dim == 2);
    CHECK(c.degree == 4);
    CHECK(c.quadrature == QuadKind::GLL);
    CHECK(c.x_min_km == -60);
    CHECK(c.x_max_km == 60);
    CHECK(c.y_min_km == 0);
    CHECK(c.y_max_km == 50);
    CHECK(c.dx_km == 10);
    CHECK(c.pml_x == "both");
    CHECK(c.pml_y == "off");
    CHECK(c.pml_delta_km == 10);
    REQUIRE(c.pml_d0_per_s.has_value());
    CHECK(*c.pml_d0_per_s == 8.0);
    CHECK(c.ic_p_amplitude == 1.0);
    CHECK(c.ic_p_y0_km == 25);
    CHECK(c.ic_p_halfwidth_km == 3.0);
    CHECK(c.t_final_s == 500);
    CHECK(c.cfl == 0.35);
    CHECK(c.c_kms == 1.484);
    CHECK(!c.has_source());
    CHECK(!c.has_receiver());
  }
  SUBCASE("whole space") {
    const RunConfig c = preset("wholespace2d");
    CHECK(c.y_min_km == -10);
    CHECK(c.y_max_km == 60);
    CHECK(c.dx_km == 5);
    CHECK(c.pml_x == "both");
    CHECK(c.pml_y == "both");
    REQUIRE(c.pml_d0_per_s.has_value());
    CHECK(*c.pml_d0_per_s == 8.0);
  }
  SUBCASE("3D point source") {
    const RunConfig c = preset("pointsource3d");
    CHECK(c.dim == 3);
    CHECK(c.quadrature == QuadKind::GL);
    CHECK(c.dx_km == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
    CHECK(c.pml_x == "both");
    CHECK(c.pml_y == "both");
    CHECK(c.pml_z == "both");
    CHECK(c.pml_delta_km == 0.55);
    CHECK(!c.pml_d0_per_s.has_value());
    REQUIRE(c.pml_tol.has_value());
    CHECK(*c.pml_tol == 1e-3);
    REQUIRE(c.has_source());
    CHECK(*c.source_x_km == 1.5);
    CHECK(*c.source_t0_s == 0.7);
    CHECK(*c.source_sigma0_s == 0.1149);
    REQUIRE(c.has_receiver());
    CHECK(*c.receiver_x_km == 3.5);
    CHECK(c.t_final_s == 10);
    // Reduced step: Gauss nodes need a tighter CFL than the 2D presets.
    CHECK(c.cfl == 0.25);
  }
  SUBCASE("custom is the defaults") {
    const RunConfig c = preset("custom");
    CHECK(c.dim == 2);
    CHECK(c.t_final_s == 0);
    CHECK(c.pml_x == "off");
  }
  SUBCASE("unknown name") {
    CHECK_THROWS_AS((void)preset("strip3d"), ConfigError);
  }
}

TEST_CASE("config: parsing starts from the preset and applies overrides") {
  const RunConfig c = parse_config_text(
      R"({"experiment":"strip2d","pml_omega_y":0.0,"t_final_s":200,"quadrature":"glr"})");
  CHECK(c.experiment == "strip2d");
  CHECK(c.pml_omega_y == 0.0);
  CHECK(c.t_final_s == 200);
  CHECK(c.quadrature == QuadKind::GLR);
  CHECK(c.x_min_km == -60); // untouched preset value
  CHECK(*c.pml_d0_per_s == 8.0);
}

TEST_CASE("config: errors carry the offending key") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      (void)parse_config_text(text);
      FAIL("expected ConfigError for " << text);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error(R"({"dx_kmm": 10})", "dx_kmm");
  expect_error(R"({"degree": "four"})", "degree");
  expect_error(R"({"degree": 4.5})", "degree");
  expect_error(R"({"quadrature": "lobatto"})", "quadrature");
  expect_error(R"({"pml_x": "on"})", "pml_x");
  expect_error(R"({"damping_sampling": "centroid"})", "damping_sampling");
  expect_error(R"({"snapshot_times_s": 3})", "snapshot_times_s");
  expect_error(R"({"snapshot_times_s": ["a"]})", "snapshot_times_s");
  expect_error(R"({"dim": 4})", "dim");
  expect_error(R"({"output_every_steps": 0})", "output_every_steps");
  expect_error(R"({"experiment": 7})", "experiment");
  expect_error("[1,2]", "object");
  expect_error("{not json", "JSON");
}

TEST_CASE("config: a point source is all-or-nothing") {
  CHECK_THROWS_AS((void)parse_config_text(R"({"source_x_km": 1.0})"),
                  ConfigError);
  CHECK_THROWS_AS(
      (void)parse_config_text(
          R"({"source_x_km":1,"source_y_km":1,"source_z_km":1,"source_t0_s":0.7})"),
      ConfigError);
  CHECK_THROWS_AS((void)parse_config_text(R"({"receiver_z_km": 1.0})"),
                  ConfigError);
  const RunConfig ok = parse_config_text(
      R"({"dim":3,"source_x_km":1,"source_y_km":1,"source_z_km":1,
          "source_t0_s":0.7,"source_sigma0_s":0.1,
          "receiver_x_km":2,"receiver_y_km":2,"receiver_z_km":2})");
  CHECK(ok.has_source());
  CHECK(ok.has_receiver());
}

TEST_CASE("config: echo round-trips every preset") {
  for (const std::string name :
       {"custom", "strip2d", "wholespace2d", "pointsource3d"}) {
    RunConfig c = preset(name);
    const std::string first = echo_config(c);
    const RunConfig back = parse_config_text(first);
    CHECK(echo_config(back) == first);
  }
}

TEST_CASE("config: echo round-trips custom overrides") {
  RunConfig c = preset("wholespace2d");
  c.dy_km = 2.5;
  c.snapshot_times_s = {0.0, 125.0, 250.0};
  c.r_x_minus = -1.0;
  c.seed = 42;
  c.output_dir = "scratch/run1";
  const std::string first = echo_config(c);
  const RunConfig back = parse_config_text(first);
  CHECK(echo_config(back) == first);
  REQUIRE(back.dy_km.has_value());
  CHECK(*back.dy_km == 2.5);
  CHECK(back.snapshot_times_s == c.snapshot_times_s);
  CHECK(back.r_x_minus == -1.0);
  CHECK(back.seed == 42);
}

TEST_CASE("config: loading from disk") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pmlwave_config_test";
  fs::create_directories(dir);
  const fs::path path = dir / "run.json";
  {
    std::ofstream out(path);
    out << R"({"experiment":"strip2d","t_final_s": 1.0})";
  }
  const RunConfig c = load_config(path.string());
  CHECK(c.t_final_s == 1.0);
  CHECK(c.x_max_km == 60);
  CHECK_THROWS_AS((void)load_config((dir / "missing.json").string()),
                  ConfigError);
  fs::remove_all(dir);
}
