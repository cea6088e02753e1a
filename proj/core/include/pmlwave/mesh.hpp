#pragma once

#include <array>
#include <vector>

namespace pmlwave {

// Axis-aligned uniform Cartesian mesh, 2D or 3D. Axis order is x, y, z;
// in 2D only axes 0 and 1 carry data and the z count is 1 by convention.
// Coordinates are in km.
struct Mesh {
  int dim = 2;
  std::array<int, 3> counts{1, 1, 1};          // elements per axis (L, M, N)
  std::array<double, 3> lo{0, 0, 0};           // domain lower corner
  std::array<double, 3> spacing{0, 0, 0};      // element width per axis
  std::array<std::vector<double>, 3> edges;    // counts[a]+1 edge coordinates

  int n_elements() const { return counts[0] * counts[1] * counts[2]; }
  int index(int l, int m, int n = 0) const {
    return l + counts[0] * (m + counts[1] * n);
  }
  // Element volume Jacobian: product of spacing/2 over the active axes.
  double jacobian() const {
    double j = 1.0;
    for (int a = 0; a < dim; ++a) j *= 0.5 * spacing[a];
    return j;
  }
};

// Uniform mesh over [lo, hi] per axis. The spacing must divide each extent to
// 1e-12 relative accuracy, otherwise ConfigError. Pass dim = 2 with the z
// range ignored, or dim = 3.
Mesh uniform_mesh(int dim,
                  std::array<double, 2> x_range,
                  std::array<double, 2> y_range,
                  std::array<double, 2> z_range,
                  std::array<double, 3> spacing);

// Map reference coordinate xi in [-1,1] to the physical coordinate inside
// element `elem` along `axis`: x = edge + (spacing/2) (1 + xi).
// ContractViolation if |xi| > 1 or the indices are out of range.
double reference_to_physical(const Mesh& mesh, int axis, int elem, double xi);

// Nodal material fields, one value per element node in the same layout as
// the solution state (element-major, node-minor). kappa = rho c^2, Z = rho c.
struct Material {
  std::vector<double> kappa;
  std::vector<double> rho;
  std::vector<double> c;
  std::vector<double> Z;

  double max_c() const;
};

// Derive c and Z from nodal kappa/rho (both > 0, sizes equal).
Material make_material(std::vector<double> kappa, std::vector<double> rho);

// Homogeneous medium: wave speed c (km/s) and density rho (g/cm^3) at every
// node of every element.
Material constant_material(const Mesh& mesh, int nodes_per_element, double c,
                           double rho);

} // namespace pmlwave
