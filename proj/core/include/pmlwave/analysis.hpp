#pragma once

#include "pmlwave/rhs.hpp"

#include <array>
#include <complex>
#include <vector>

namespace pmlwave {

// Discrete energy 1/2 sum_e J sum_nodes w (p^2/kappa + rho |v|^2). The
// auxiliary fields do not contribute.
double discrete_energy(const RhsContext& ctx, const State& q);

// d/dt of the discrete energy evaluated by the chain rule from a state and
// its time derivative.
double energy_rate_chain(const RhsContext& ctx, const State& q,
                         const State& dq);

// Same quantity split into its face contributions, valid for the undamped,
// source-free operator: dE/dt = -flux_dissipation - boundary_dissipation.
struct FaceEnergyRates {
  double flux_dissipation;     // sum over all faces of w (F^2 + G^2)/Z
  double boundary_dissipation; // sum over exterior faces of -+ w p_hat v_hat
};
FaceEnergyRates face_energy_rates(RhsContext& ctx, const State& q);

// Pressure of a point source -g(t) delta(x) in a 3D whole space:
// p(r,t) = -g'(t - r/c) / (4 pi r c^2).
double analytic_point_pressure(double r, double t, double c, double t0,
                               double sigma0);

// Pointwise pressure probes.
double max_abs_p(const State& q);

using Box = std::array<std::array<double, 2>, 3>;

// Max |p| over nodes inside the box (inclusive, 1e-9 slack).
double interior_max_abs_p(const Mesh& mesh, const Operators1D& op,
                          const State& q, const Box& box);

// Max |p_a - p_b| over nodes of mesh_a inside the box. mesh_b must use the
// same spacing and node set and cover mesh_a at an integer element offset.
double interior_max_p_diff(const Mesh& mesh_a, const State& qa,
                           const Mesh& mesh_b, const State& qb,
                           const Operators1D& op, const Box& box);

// Interpolates the pressure field at a physical point.
double sample_pressure(const Mesh& mesh, const Operators1D& op, const State& q,
                       std::array<double, 3> position);

// Least-squares slope of log(err) against log(h).
double fit_order(const std::vector<double>& h, const std::vector<double>& err);

// Dense matrix of the semi-discrete operator (row-major, n = layout.size()),
// built column-by-column through the matrix-free kernel. Guarded against
// accidentally huge systems.
std::vector<double> dense_operator(RhsContext& ctx);

struct SpectrumResult {
  std::vector<std::complex<double>> eigenvalues;
  double abscissa;     // max real part
  double norm_inf;     // max row sum of the dense operator
  double max_residual; // max_k ||A v_k - lambda_k v_k||_2 / ||v_k||_2
};

// Full eigenvalue set of the semi-discrete operator with a residual check of
// every eigenpair.
SpectrumResult operator_spectrum(RhsContext& ctx);

} // namespace pmlwave
