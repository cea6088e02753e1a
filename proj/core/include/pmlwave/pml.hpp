#pragma once

#include "pmlwave/mesh.hpp"
#include "pmlwave/quadrature.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace pmlwave {

// Absorbing-layer description. Each active axis carries two layers of width
// delta outside the interior interval [interior[a][0], interior[a][1]]; the
// damping follows the cubic ramp d0 ((depth)/delta)^3 (exponent fixed at 3).
//
// omega_y/omega_z weight the stabilizing face terms of the auxiliary
// equations; 1 is the provably stable scheme, 0 reproduces the classical
// unstabilized coupling (kept only to demonstrate its blow-up).
struct PmlConfig {
  enum class Sampling {
    Nodal,             // profile evaluated at every quadrature node
    ElementConstant,   // profile evaluated once at the element centroid
  };

  // sides[axis] = {layer below the interior, layer above it}. One-sided
  // layers are allowed (e.g. a single layer terminating the right end).
  std::array<std::array<bool, 2>, 3> sides{{{false, false},
                                            {false, false},
                                            {false, false}}};
  std::array<std::array<double, 2>, 3> interior{};   // per active axis
  double delta = 0;                                  // layer width (km)
  double d0 = 0;                                     // peak damping (1/s)
  double omega_y = 1.0;
  double omega_z = 1.0;
  Sampling sampling = Sampling::Nodal;

  bool axis_active(int a) const { return sides[a][0] || sides[a][1]; }
  bool any_active(int dim) const {
    for (int a = 0; a < dim; ++a)
      if (axis_active(a)) return true;
    return false;
  }
};

// Cubic ramp of eqn-style |x| profiles: 0 inside |x| <= interior_halfwidth,
// d0 ((|x| - interior_halfwidth)/delta)^3 in the layer.
double cubic_profile(double x, double interior_halfwidth, double delta,
                     double d0);

// Relative PML error model tol = C0 [(1/delta) (dx/(P+1))]^(P+1).
// Returns the exact formula value; callers deriving d0 from it clamp
// tol >= 1 down to 0.99 first (see derive_d0).
double compute_tol(double C0, double delta, double dx, int degree);

// Damping amplitude d0 = (4c)/(2 delta) ln(1/tol).
double compute_d0(double c, double delta, double tol);

// The tol -> d0 chain used by experiment configs: clamps tol into (0, 0.99]
// so very coarse meshes still produce a positive amplitude.
double derive_d0(double c, double delta, double C0, double dx, int degree);

// Nodal damping values, one array per axis in state layout (element-major,
// node-minor). Inactive axes have empty arrays. element_active flags the
// elements with any nonzero damping so the solver can skip clean elements.
struct DampingField {
  int dim = 2;
  std::array<std::vector<double>, 3> d;
  std::vector<std::uint8_t> element_active;

  bool any() const;
  double value(int axis, std::size_t node_index) const {
    return d[axis].empty() ? 0.0 : d[axis][node_index];
  }
};

// Evaluate the config's profiles on every node of the mesh. Validates the
// layer geometry: each active axis needs a nonempty interior interval whose
// delta-wide layers end exactly at the domain boundary (1e-9 km slack).
// Throws ConfigError for invalid layer geometry.
DampingField sample_damping(const Mesh& mesh, const Operators1D& op,
                            const PmlConfig& pml);

// All-zero damping (no layers anywhere).
DampingField no_damping(const Mesh& mesh);

} // namespace pmlwave
