#include "pmlwave/analysis.hpp"

#include "pmlwave/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace pmlwave {

namespace {

inline bool inside(double x, const std::array<double, 2>& iv) {
  return x >= iv[0] - 1e-9 && x <= iv[1] + 1e-9;
}

} // namespace

double discrete_energy(const RhsContext& ctx, const State& q) {
  const StateLayout& L = ctx.layout;
  const double J = ctx.mesh->jacobian();
  double total = 0.0;
  for (int e = 0; e < L.n_elements; ++e) {
    const std::size_t mat0 = static_cast<std::size_t>(e) * L.nodes;
    const double* kap = ctx.material->kappa.data() + mat0;
    const double* rho = ctx.material->rho.data() + mat0;
    const double* p = q.field(e, L.field_p());
    double acc = 0.0;
    for (int nd = 0; nd < L.nodes; ++nd) {
      double v2 = 0.0;
      for (int a = 0; a < L.dim; ++a) {
        const double va = q.field(e, L.field_vel(a))[nd];
        v2 += va * va;
      }
      acc += ctx.node_weight[nd] *
             0.5 * (p[nd] * p[nd] / kap[nd] + rho[nd] * v2);
    }
    total += J * acc;
  }
  return total;
}

double energy_rate_chain(const RhsContext& ctx, const State& q,
                         const State& dq) {
  const StateLayout& L = ctx.layout;
  const double J = ctx.mesh->jacobian();
  double total = 0.0;
  for (int e = 0; e < L.n_elements; ++e) {
    const std::size_t mat0 = static_cast<std::size_t>(e) * L.nodes;
    const double* kap = ctx.material->kappa.data() + mat0;
    const double* rho = ctx.material->rho.data() + mat0;
    const double* p = q.field(e, L.field_p());
    const double* dp = dq.field(e, L.field_p());
    double acc = 0.0;
    for (int nd = 0; nd < L.nodes; ++nd) {
      double dot = p[nd] * dp[nd] / kap[nd];
      for (int a = 0; a < L.dim; ++a)
        dot += rho[nd] * q.field(e, L.field_vel(a))[nd] *
               dq.field(e, L.field_vel(a))[nd];
      acc += ctx.node_weight[nd] * dot;
    }
    total += J * acc;
  }
  return total;
}

FaceEnergyRates face_energy_rates(RhsContext& ctx, const State& q) {
  compute_face_values(ctx, q);
  const StateLayout& L = ctx.layout;
  const FaceValues& fv = ctx.faces;
  FaceEnergyRates rates{0.0, 0.0};
  for (int e = 0; e < L.n_elements; ++e) {
    for (int a = 0; a < L.dim; ++a) {
      const double fj = ctx.face_jacobian[a];
      const std::size_t minus = fv.side_index(L.dim, e, a, Side::Minus, 0);
      const std::size_t plus = fv.side_index(L.dim, e, a, Side::Plus, 0);
      const std::size_t face = fv.face_index(L.dim, e, a, 0);
      const bool ext_minus = ctx.neighbor_of(e, a, Side::Minus) < 0;
      const bool ext_plus = ctx.neighbor_of(e, a, Side::Plus) < 0;
      for (int fn = 0; fn < fv.nf; ++fn) {
        const double w = fj * ctx.face_weight[a][fn];
        const double F = fv.F[face + fn];
        const double G = fv.G[face + fn];
        rates.flux_dissipation +=
            w * (F * F / fv.trace_Z[minus + fn] + G * G / fv.trace_Z[plus + fn]);
        if (ext_minus)
          rates.boundary_dissipation -=
              w * fv.hat_p[minus + fn] * fv.hat_vn[minus + fn];
        if (ext_plus)
          rates.boundary_dissipation +=
              w * fv.hat_p[plus + fn] * fv.hat_vn[plus + fn];
      }
    }
  }
  return rates;
}

double analytic_point_pressure(double r, double t, double c, double t0,
                               double sigma0) {
  if (!(r > 0)) throw ContractViolation("analytic_point_pressure: r must be > 0");
  if (!(c > 0)) throw ContractViolation("analytic_point_pressure: c must be > 0");
  const double four_pi = 4.0 * std::numbers::pi;
  return -gaussian_stf(t - r / c, t0, sigma0, 1) / (four_pi * r * c * c);
}

double max_abs_p(const State& q) {
  const StateLayout& L = q.layout;
  double m = 0.0;
  for (int e = 0; e < L.n_elements; ++e) {
    const double* p = q.field(e, L.field_p());
    for (int nd = 0; nd < L.nodes; ++nd) m = std::max(m, std::abs(p[nd]));
  }
  return m;
}

double interior_max_abs_p(const Mesh& mesh, const Operators1D& op,
                          const State& q, const Box& box) {
  const StateLayout& L = q.layout;
  const int n1 = op.n();
  double m = 0.0;
  for (int n = 0; n < mesh.counts[2]; ++n)
    for (int mm = 0; mm < mesh.counts[1]; ++mm)
      for (int l = 0; l < mesh.counts[0]; ++l) {
        const int e = mesh.index(l, mm, n);
        const double* p = q.field(e, L.field_p());
        const std::array<int, 3> el{l, mm, n};
        for (int nd = 0; nd < L.nodes; ++nd) {
          const int idx[3] = {nd % n1, (nd / n1) % n1, nd / (n1 * n1)};
          bool in = true;
          for (int a = 0; a < mesh.dim; ++a) {
            const double x =
                reference_to_physical(mesh, a, el[a], op.nodes[idx[a]]);
            if (!inside(x, box[a])) {
              in = false;
              break;
            }
          }
          if (in) m = std::max(m, std::abs(p[nd]));
        }
      }
  return m;
}

double interior_max_p_diff(const Mesh& mesh_a, const State& qa,
                           const Mesh& mesh_b, const State& qb,
                           const Operators1D& op, const Box& box) {
  if (mesh_a.dim != mesh_b.dim)
    throw ContractViolation("interior_max_p_diff: dimension mismatch");
  std::array<int, 3> off{0, 0, 0};
  for (int a = 0; a < mesh_a.dim; ++a) {
    if (std::abs(mesh_a.spacing[a] - mesh_b.spacing[a]) >
        1e-12 * mesh_a.spacing[a])
      throw ContractViolation("interior_max_p_diff: spacing mismatch");
    const double shift = (mesh_a.lo[a] - mesh_b.lo[a]) / mesh_a.spacing[a];
    off[a] = static_cast<int>(std::lround(shift));
    if (std::abs(shift - off[a]) > 1e-9)
      throw ContractViolation("interior_max_p_diff: meshes are not aligned");
  }

  const StateLayout& L = qa.layout;
  const int n1 = op.n();
  double m = 0.0;
  for (int n = 0; n < mesh_a.counts[2]; ++n)
    for (int mm = 0; mm < mesh_a.counts[1]; ++mm)
      for (int l = 0; l < mesh_a.counts[0]; ++l) {
        const int lb = l + off[0], mb = mm + off[1], nb = n + off[2];
        if (lb < 0 || lb >= mesh_b.counts[0] || mb < 0 ||
            mb >= mesh_b.counts[1] || nb < 0 || nb >= mesh_b.counts[2])
          throw ContractViolation(
              "interior_max_p_diff: reference mesh does not cover the mesh");
        const double* pa = qa.field(mesh_a.index(l, mm, n), L.field_p());
        const double* pb =
            qb.field(mesh_b.index(lb, mb, nb), qb.layout.field_p());
        const std::array<int, 3> el{l, mm, n};
        for (int nd = 0; nd < L.nodes; ++nd) {
          const int idx[3] = {nd % n1, (nd / n1) % n1, nd / (n1 * n1)};
          bool in = true;
          for (int a = 0; a < mesh_a.dim; ++a) {
            const double x =
                reference_to_physical(mesh_a, a, el[a], op.nodes[idx[a]]);
            if (!inside(x, box[a])) {
              in = false;
              break;
            }
          }
          if (in) m = std::max(m, std::abs(pa[nd] - pb[nd]));
        }
      }
  return m;
}

double sample_pressure(const Mesh& mesh, const Operators1D& op, const State& q,
                       std::array<double, 3> position) {
  const int n1 = op.n();
  std::array<int, 3> el{0, 0, 0};
  std::array<std::vector<double>, 3> basis;
  for (int a = 0; a < mesh.dim; ++a) {
    const double s = (position[a] - mesh.lo[a]) / mesh.spacing[a];
    if (s < -1e-9 || s > mesh.counts[a] + 1e-9)
      throw ConfigError("sample point outside the mesh on axis " +
                        std::string(1, "xyz"[a]));
    el[a] = std::clamp(static_cast<int>(s), 0, mesh.counts[a] - 1);
    basis[a] = basis_at(op, std::clamp(2.0 * (s - el[a]) - 1.0, -1.0, 1.0));
  }
  const double* p =
      q.field(mesh.index(el[0], el[1], el[2]), q.layout.field_p());
  double val = 0.0;
  for (int nd = 0; nd < q.layout.nodes; ++nd) {
    const int i = nd % n1, j = (nd / n1) % n1, k = nd / (n1 * n1);
    double w = basis[0][i] * basis[1][j];
    if (mesh.dim == 3) w *= basis[2][k];
    val += w * p[nd];
  }
  return val;
}

double fit_order(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2)
    throw ContractViolation("fit_order: need at least two samples");
  std::vector<double> lh(h.size()), le(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0) || !(err[i] > 0))
      throw ContractViolation("fit_order: samples must be positive");
    lh[i] = std::log(h[i]);
    le[i] = std::log(err[i]);
  }
  double mh = 0, me = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    mh += lh[i];
    me += le[i];
  }
  mh /= h.size();
  me /= h.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    num += (lh[i] - mh) * (le[i] - me);
    den += (lh[i] - mh) * (lh[i] - mh);
  }
  return num / den;
}

std::vector<double> dense_operator(RhsContext& ctx) {
  const std::size_t n = ctx.layout.size();
  if (n > 4096)
    throw ContractViolation("dense_operator: system too large to assemble");
  std::vector<double> A(n * n);
  State unit(ctx.layout), col(ctx.layout);
  for (std::size_t j = 0; j < n; ++j) {
    unit.fill(0.0);
    unit.data[j] = 1.0;
    apply_operator(ctx, unit, col);
    for (std::size_t i = 0; i < n; ++i) A[i * n + j] = col.data[i];
  }
  return A;
}

SpectrumResult operator_spectrum(RhsContext& ctx) {
  const std::vector<double> raw = dense_operator(ctx);
  const Eigen::Index n = static_cast<Eigen::Index>(ctx.layout.size());
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = raw[i * n + j];

  SpectrumResult out;
  out.norm_inf = A.cwiseAbs().rowwise().sum().maxCoeff();

  Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigenvalue iteration failed to converge", -1,
                         "operator", 0.0);

  const auto& lambda = es.eigenvalues();
  const auto& V = es.eigenvectors();
  const Eigen::MatrixXcd R = A * V - V * lambda.asDiagonal();

  out.eigenvalues.resize(n);
  out.abscissa = -std::numeric_limits<double>::infinity();
  out.max_residual = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues[k] = lambda(k);
    out.abscissa = std::max(out.abscissa, lambda(k).real());
    out.max_residual =
        std::max(out.max_residual, R.col(k).norm() / V.col(k).norm());
  }
  return out;
}

} // namespace pmlwave
