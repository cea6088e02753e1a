#include "pmlwave/mesh.hpp"

#include "pmlwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pmlwave {

namespace {

const char* axis_name(int a) { return a == 0 ? "x" : (a == 1 ? "y" : "z"); }

int divide_extent(double lo, double hi, double h, int axis) {
  if (!(hi > lo))
    throw ConfigError(std::string("empty ") + axis_name(axis) + " range");
  if (!(h > 0))
    throw ConfigError(std::string("non-positive spacing on axis ") +
                      axis_name(axis));
  const double extent = hi - lo;
  const double ratio = extent / h;
  const int count = static_cast<int>(std::lround(ratio));
  if (count < 1 || std::abs(count * h - extent) > 1e-12 * extent)
    throw ConfigError("spacing " + std::to_string(h) + " does not divide the " +
                      axis_name(axis) + " extent " + std::to_string(extent));
  return count;
}

} // namespace

Mesh uniform_mesh(int dim,
                  std::array<double, 2> x_range,
                  std::array<double, 2> y_range,
                  std::array<double, 2> z_range,
                  std::array<double, 3> spacing) {
  if (dim != 2 && dim != 3)
    throw ConfigError("dim must be 2 or 3, got " + std::to_string(dim));

  Mesh mesh;
  mesh.dim = dim;
  const std::array<std::array<double, 2>, 3> ranges{x_range, y_range, z_range};
  for (int a = 0; a < dim; ++a) {
    mesh.counts[a] = divide_extent(ranges[a][0], ranges[a][1], spacing[a], a);
    mesh.lo[a] = ranges[a][0];
    mesh.spacing[a] = spacing[a];
    mesh.edges[a].resize(mesh.counts[a] + 1);
    for (int e = 0; e <= mesh.counts[a]; ++e)
      mesh.edges[a][e] = ranges[a][0] + e * spacing[a];
    mesh.edges[a].back() = ranges[a][1];   // exact upper bound
  }
  return mesh;
}

double reference_to_physical(const Mesh& mesh, int axis, int elem, double xi) {
  if (axis < 0 || axis >= mesh.dim)
    throw ContractViolation("reference_to_physical: axis out of range");
  if (elem < 0 || elem >= mesh.counts[axis])
    throw ContractViolation("reference_to_physical: element out of range");
  if (std::abs(xi) > 1.0 + 1e-12)
    throw ContractViolation("reference_to_physical: xi outside [-1, 1]");
  return mesh.edges[axis][elem] + 0.5 * mesh.spacing[axis] * (1.0 + xi);
}

double Material::max_c() const {
  return c.empty() ? 0.0 : *std::max_element(c.begin(), c.end());
}

Material make_material(std::vector<double> kappa, std::vector<double> rho) {
  if (kappa.size() != rho.size())
    throw ContractViolation("make_material: kappa/rho size mismatch");
  Material mat;
  mat.kappa = std::move(kappa);
  mat.rho = std::move(rho);
  mat.c.resize(mat.kappa.size());
  mat.Z.resize(mat.kappa.size());
  for (std::size_t i = 0; i < mat.kappa.size(); ++i) {
    if (!(mat.kappa[i] > 0) || !(mat.rho[i] > 0))
      throw ConfigError("material requires kappa > 0 and rho > 0");
    mat.c[i] = std::sqrt(mat.kappa[i] / mat.rho[i]);
    mat.Z[i] = mat.rho[i] * mat.c[i];
  }
  return mat;
}

Material constant_material(const Mesh& mesh, int nodes_per_element, double c,
                           double rho) {
  if (!(c > 0) || !(rho > 0))
    throw ConfigError("material requires c > 0 and rho > 0");
  const std::size_t total =
      static_cast<std::size_t>(mesh.n_elements()) * nodes_per_element;
  return make_material(std::vector<double>(total, rho * c * c),
                       std::vector<double>(total, rho));
}

} // namespace pmlwave
