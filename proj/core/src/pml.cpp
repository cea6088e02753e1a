#include "pmlwave/pml.hpp"

#include "pmlwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pmlwave {

namespace {

const char* axis_name(int a) { return a == 0 ? "x" : (a == 1 ? "y" : "z"); }

double ramp(double depth, double delta, double d0) {
  if (depth <= 0) return 0.0;
  const double s = depth / delta;
  return d0 * s * s * s;
}

// Penetration depth of coordinate x into the layers of axis a, clamped to
// the layer width (sampling never legitimately exceeds it; roundoff might).
double layer_depth(const PmlConfig& pml, int a, double x) {
  double depth = 0.0;
  if (pml.sides[a][0] && x < pml.interior[a][0])
    depth = pml.interior[a][0] - x;
  else if (pml.sides[a][1] && x > pml.interior[a][1])
    depth = x - pml.interior[a][1];
  return std::min(depth, pml.delta);
}

void validate_geometry(const Mesh& mesh, const PmlConfig& pml) {
  if (!pml.any_active(mesh.dim)) return;
  if (!(pml.delta > 0))
    throw ConfigError("PML layer width delta must be > 0");
  if (!(pml.d0 >= 0))
    throw ConfigError("PML amplitude d0 must be >= 0");
  constexpr double slack = 1e-9;
  for (int a = 0; a < mesh.dim; ++a) {
    if (!pml.axis_active(a)) continue;
    const double lo = pml.interior[a][0], hi = pml.interior[a][1];
    const double dom_lo = mesh.lo[a];
    const double dom_hi = mesh.lo[a] + mesh.counts[a] * mesh.spacing[a];
    if (!(hi - lo > 0))
      throw ConfigError(std::string("PML layers leave no interior on axis ") +
                        axis_name(a) + " (layer wider than the domain)");
    const double want_lo = pml.sides[a][0] ? lo - pml.delta : lo;
    const double want_hi = pml.sides[a][1] ? hi + pml.delta : hi;
    if (std::abs(want_lo - dom_lo) > slack || std::abs(want_hi - dom_hi) > slack)
      throw ConfigError(std::string("PML layers on axis ") + axis_name(a) +
                        " do not end at the domain boundary");
  }
}

} // namespace

double cubic_profile(double x, double interior_halfwidth, double delta,
                     double d0) {
  if (!(delta > 0))
    throw ContractViolation("cubic_profile: delta must be > 0");
  const double depth = std::abs(x) - interior_halfwidth;
  if (depth <= 0) return 0.0;
  const double s = depth / delta;
  return d0 * s * s * s;
}

double compute_tol(double C0, double delta, double dx, int degree) {
  if (!(C0 > 0) || !(delta > 0) || !(dx > 0) || degree < 1)
    throw ContractViolation("compute_tol: arguments out of range");
  return C0 * std::pow(dx / (delta * (degree + 1)), degree + 1);
}

double compute_d0(double c, double delta, double tol) {
  // All three come straight from user settings (c_kms, pml_delta_km, pml_tol).
  if (!(c > 0) || !(delta > 0) || !(tol > 0) || !(tol < 1))
    throw ConfigError("damping amplitude needs c > 0, delta > 0 and a "
                      "tolerance in (0, 1)");
  return (4.0 * c) / (2.0 * delta) * std::log(1.0 / tol);
}

double derive_d0(double c, double delta, double C0, double dx, int degree) {
  double tol = compute_tol(C0, delta, dx, degree);
  if (tol >= 1.0) tol = 0.99;   // very coarse mesh: keep the amplitude positive
  return compute_d0(c, delta, tol);
}

bool DampingField::any() const {
  return std::any_of(element_active.begin(), element_active.end(),
                     [](std::uint8_t f) { return f != 0; });
}

DampingField no_damping(const Mesh& mesh) {
  DampingField field;
  field.dim = mesh.dim;
  field.element_active.assign(mesh.n_elements(), 0);
  return field;
}

DampingField sample_damping(const Mesh& mesh, const Operators1D& op,
                            const PmlConfig& pml) {
  validate_geometry(mesh, pml);
  if (!pml.any_active(mesh.dim)) return no_damping(mesh);

  const int n1 = op.n();
  const int nn = mesh.dim == 2 ? n1 * n1 : n1 * n1 * n1;
  const int ne = mesh.n_elements();

  DampingField field;
  field.dim = mesh.dim;
  field.element_active.assign(ne, 0);
  for (int a = 0; a < mesh.dim; ++a)
    if (pml.axis_active(a))
      field.d[a].assign(static_cast<std::size_t>(ne) * nn, 0.0);

  // Damping along an axis depends only on that axis's coordinate, so sample
  // per (element-slab, node) once and broadcast across the other axes.
  for (int a = 0; a < mesh.dim; ++a) {
    if (!pml.axis_active(a)) continue;
    std::vector<double> per_node(static_cast<std::size_t>(mesh.counts[a]) * n1);
    for (int ea = 0; ea < mesh.counts[a]; ++ea) {
      if (pml.sampling == PmlConfig::Sampling::ElementConstant) {
        const double xc = reference_to_physical(mesh, a, ea, 0.0);
        const double dc = ramp(layer_depth(pml, a, xc), pml.delta, pml.d0);
        for (int i = 0; i < n1; ++i) per_node[ea * n1 + i] = dc;
      } else {
        for (int i = 0; i < n1; ++i) {
          const double x = reference_to_physical(mesh, a, ea, op.nodes[i]);
          per_node[ea * n1 + i] = ramp(layer_depth(pml, a, x), pml.delta, pml.d0);
        }
      }
    }
    const int L = mesh.counts[0], M = mesh.counts[1], N = mesh.counts[2];
    for (int n = 0; n < N; ++n)
      for (int m = 0; m < M; ++m)
        for (int l = 0; l < L; ++l) {
          const int e = mesh.index(l, m, n);
          const int ea = (a == 0) ? l : (a == 1 ? m : n);
          double* dst = field.d[a].data() + static_cast<std::size_t>(e) * nn;
          bool nonzero = false;
          for (int node = 0; node < nn; ++node) {
            const int ia = (a == 0) ? node % n1
                                    : (a == 1 ? (node / n1) % n1 : node / (n1 * n1));
            dst[node] = per_node[ea * n1 + ia];
            nonzero = nonzero || dst[node] != 0.0;
          }
          if (nonzero) field.element_active[e] = 1;
        }
  }
  return field;
}

} // namespace pmlwave
