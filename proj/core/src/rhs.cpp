#include "pmlwave/rhs.hpp"

#include "pmlwave/errors.hpp"

#include <cmath>
#include <string>

namespace pmlwave {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024;

// Nodes of a face of constant `axis` form the tensor grid of the other axes;
// node = base(fn) + i*stride with i running along `axis`.
inline void face_base_stride(int dim, int n1, int axis, int fn, int& base,
                             int& stride) {
  if (axis == 0) {
    base = fn * n1;
    stride = 1;
  } else if (axis == 1) {
    base = (dim == 2) ? fn : fn % n1 + (fn / n1) * n1 * n1;
    stride = n1;
  } else {
    base = fn;
    stride = n1 * n1;
  }
}

struct Workspace {
  std::vector<double> div, der, fz, gz;
  Workspace(int nn, int nf) : div(nn), der(nn), fz(nf), gz(nf) {}
};

void assemble_element(RhsContext& ctx, const State& q, int e, Workspace& ws,
                      State& dq) {
  const StateLayout& L = ctx.layout;
  const Operators1D& op = *ctx.op;
  const int dim = L.dim, n1 = L.n1, nn = L.nodes, nf = ctx.faces.nf;
  const std::size_t mat0 = static_cast<std::size_t>(e) * nn;

  const double* kap = ctx.material->kappa.data() + mat0;
  const double* rho = ctx.material->rho.data() + mat0;

  const bool damped = ctx.damping->element_active.empty()
                          ? false
                          : ctx.damping->element_active[e] != 0;
  const double* dmp[3] = {nullptr, nullptr, nullptr};
  for (int a = 0; a < dim; ++a)
    if (!ctx.damping->d[a].empty()) dmp[a] = ctx.damping->d[a].data() + mat0;

  const double* p = q.field(e, L.field_p());
  const double* sig = q.field(e, L.field_sigma());
  const double* psi = dim == 3 ? q.field(e, L.field_psi()) : nullptr;

  double* dp = dq.field(e, L.field_p());
  double* dsig = dq.field(e, L.field_sigma());
  double* dpsi = dim == 3 ? dq.field(e, L.field_psi()) : nullptr;

  // Volume terms: divergence of velocity into ws.div; the y/z parts feed the
  // auxiliary equations before being accumulated.
  for (int a = 0; a < dim; ++a) {
    const double* vel = q.field(e, L.field_vel(a));
    volume_derivative(op, dim, a, ctx.two_over_dx[a], vel, ws.der.data());
    if (a == 1) {
      if (damped) {
        for (int nd = 0; nd < nn; ++nd) {
          const double dx = dmp[0] ? dmp[0][nd] : 0.0;
          const double dy = dmp[1] ? dmp[1][nd] : 0.0;
          dsig[nd] = -dy * sig[nd] - (dy - dx) * ws.der[nd];
        }
      } else {
        for (int nd = 0; nd < nn; ++nd) dsig[nd] = 0.0;
      }
    } else if (a == 2) {
      if (damped) {
        for (int nd = 0; nd < nn; ++nd) {
          const double dx = dmp[0] ? dmp[0][nd] : 0.0;
          const double dz = dmp[2] ? dmp[2][nd] : 0.0;
          dpsi[nd] = -dz * psi[nd] - (dz - dx) * ws.der[nd];
        }
      } else {
        for (int nd = 0; nd < nn; ++nd) dpsi[nd] = 0.0;
      }
    }
    if (a == 0) {
      for (int nd = 0; nd < nn; ++nd) ws.div[nd] = ws.der[nd];
    } else {
      for (int nd = 0; nd < nn; ++nd) ws.div[nd] += ws.der[nd];
    }
  }

  // Pressure rate: dp/dt = -d_x p - kappa (div u + sigma + psi) - penalties.
  for (int nd = 0; nd < nn; ++nd) {
    double acc = ws.div[nd] + sig[nd];
    if (psi) acc += psi[nd];
    dp[nd] = -kap[nd] * acc;
  }
  if (damped && dmp[0])
    for (int nd = 0; nd < nn; ++nd) dp[nd] -= dmp[0][nd] * p[nd];

  // Velocity rates: dv_a/dt = -d_a v_a - (1/rho) grad_a p - penalties.
  for (int a = 0; a < dim; ++a) {
    const double* vel = q.field(e, L.field_vel(a));
    double* dvel = dq.field(e, L.field_vel(a));
    volume_derivative(op, dim, a, ctx.two_over_dx[a], p, ws.der.data());
    for (int nd = 0; nd < nn; ++nd) dvel[nd] = -ws.der[nd] / rho[nd];
    if (damped && dmp[a])
      for (int nd = 0; nd < nn; ++nd) dvel[nd] -= dmp[a][nd] * vel[nd];
  }

  // Face penalties.
  const FaceValues& fv = ctx.faces;
  for (int a = 0; a < dim; ++a) {
    const double* F = &fv.F[fv.face_index(dim, e, a, 0)];
    const double* G = &fv.G[fv.face_index(dim, e, a, 0)];
    const double* Zm = &fv.trace_Z[fv.side_index(dim, e, a, Side::Minus, 0)];
    const double* Zp = &fv.trace_Z[fv.side_index(dim, e, a, Side::Plus, 0)];
    for (int fn = 0; fn < nf; ++fn) {
      ws.fz[fn] = F[fn] / Zm[fn];
      ws.gz[fn] = G[fn] / Zp[fn];
    }
    double* dvel = dq.field(e, L.field_vel(a));
    double* daux = (a == 1) ? dsig : (a == 2 ? dpsi : nullptr);
    const double omega = (a == 1) ? ctx.omega_y : ctx.omega_z;
    for (int ia : ctx.penalty_rows) {
      const double scale = ctx.two_over_dx[a] * ctx.inv_h[ia];
      const double cl = scale * op.e_left[ia];
      const double cr = scale * op.e_right[ia];
      for (int fn = 0; fn < nf; ++fn) {
        int base, stride;
        face_base_stride(dim, n1, a, fn, base, stride);
        const int nd = base + ia * stride;
        const double pen_p = cl * ws.fz[fn] - cr * ws.gz[fn];
        dp[nd] -= kap[nd] * pen_p;
        dvel[nd] -= (cl * F[fn] + cr * G[fn]) / rho[nd];
        if (daux && damped) {
          const double dx = dmp[0] ? dmp[0][nd] : 0.0;
          const double da = dmp[a] ? dmp[a][nd] : 0.0;
          daux[nd] -= omega * (da - dx) * pen_p;
        }
      }
    }
  }
}

} // namespace

double gaussian_stf(double t, double t0, double sigma, int deriv) {
  if (!(sigma > 0)) throw ContractViolation("gaussian_stf: sigma must be > 0");
  if (deriv < 0) throw ContractViolation("gaussian_stf: deriv must be >= 0");
  const double tau = (t - t0) / sigma;
  const double g = std::exp(-0.5 * tau * tau) / (sigma * kSqrt2Pi);
  if (deriv == 0) return g;
  // g^(k)(t) = (-1)^k He_k(tau) g(t) / sigma^k with probabilists' Hermite
  // polynomials He_{k+1} = tau He_k - k He_{k-1}.
  double he0 = 1.0, he1 = tau;
  for (int k = 2; k <= deriv; ++k) {
    const double he2 = tau * he1 - (k - 1) * he0;
    he0 = he1;
    he1 = he2;
  }
  const double he = (deriv == 0) ? he0 : he1;
  const double sign = (deriv % 2 == 0) ? 1.0 : -1.0;
  return sign * he * g / std::pow(sigma, deriv);
}

PointSource make_point_source(const Mesh& mesh, const Operators1D& op,
                              std::array<double, 3> position, double t0,
                              double sigma0) {
  if (!(sigma0 > 0)) throw ConfigError("source sigma0 must be > 0");
  PointSource src;
  src.position = position;
  src.t0 = t0;
  src.sigma0 = sigma0;

  const int n1 = op.n();
  std::array<int, 3> elem_axis{0, 0, 0};
  std::array<std::vector<double>, 3> basis;
  for (int a = 0; a < mesh.dim; ++a) {
    const double x = position[a];
    const double lo = mesh.lo[a];
    const double hi = mesh.lo[a] + mesh.counts[a] * mesh.spacing[a];
    if (!(x > lo && x < hi))
      throw ConfigError("source position outside the mesh on axis " +
                        std::string(1, "xyz"[a]));
    const double s = (x - lo) / mesh.spacing[a];
    const int el = std::min(static_cast<int>(s), mesh.counts[a] - 1);
    const double frac = s - el;
    if (frac < 1e-12 || frac > 1.0 - 1e-12)
      throw ConfigError("source position lies on an element boundary on axis " +
                        std::string(1, "xyz"[a]));
    elem_axis[a] = el;
    basis[a] = basis_at(op, 2.0 * frac - 1.0);
  }
  src.element = mesh.index(elem_axis[0], elem_axis[1],
                           mesh.dim == 3 ? elem_axis[2] : 0);

  const int nn = mesh.dim == 2 ? n1 * n1 : n1 * n1 * n1;
  src.weights.resize(nn);
  const double jac = mesh.jacobian();
  for (int nd = 0; nd < nn; ++nd) {
    const int i = nd % n1, j = (nd / n1) % n1, k = nd / (n1 * n1);
    double w = basis[0][i] / op.weights[i] * basis[1][j] / op.weights[j];
    if (mesh.dim == 3) w *= basis[2][k] / op.weights[k];
    src.weights[nd] = w / jac;
  }
  return src;
}

RhsContext make_context(const Mesh& mesh, const Operators1D& op,
                        const Material& material, const DampingField& damping,
                        const BoundarySpec& bc, double omega_y, double omega_z,
                        std::optional<PointSource> source) {
  bc.validate(mesh.dim);

  RhsContext ctx;
  ctx.mesh = &mesh;
  ctx.op = &op;
  ctx.material = &material;
  ctx.damping = &damping;
  ctx.layout = StateLayout::make(mesh, op.degree);
  ctx.bc = bc;
  ctx.omega_y = omega_y;
  ctx.omega_z = omega_z;
  ctx.source = std::move(source);

  const int dim = mesh.dim, n1 = op.n();
  const int ne = mesh.n_elements(), nn = ctx.layout.nodes;

  if (material.kappa.size() != static_cast<std::size_t>(ne) * nn)
    throw ContractViolation("make_context: material size mismatch");
  for (int a = 0; a < dim; ++a)
    if (!damping.d[a].empty() &&
        damping.d[a].size() != static_cast<std::size_t>(ne) * nn)
      throw ContractViolation("make_context: damping size mismatch");
  if (ctx.source && (ctx.source->element < 0 || ctx.source->element >= ne ||
                     ctx.source->weights.size() != static_cast<std::size_t>(nn)))
    throw ContractViolation("make_context: source does not match the mesh");

  for (int a = 0; a < dim; ++a) ctx.two_over_dx[a] = 2.0 / mesh.spacing[a];

  ctx.neighbor.assign(static_cast<std::size_t>(ne) * 6, -1);
  const int Lc = mesh.counts[0], Mc = mesh.counts[1], Nc = mesh.counts[2];
  for (int n = 0; n < Nc; ++n)
    for (int m = 0; m < Mc; ++m)
      for (int l = 0; l < Lc; ++l) {
        const int e = mesh.index(l, m, n);
        int* nb = ctx.neighbor.data() + static_cast<std::size_t>(e) * 6;
        if (l > 0) nb[0] = mesh.index(l - 1, m, n);
        if (l < Lc - 1) nb[1] = mesh.index(l + 1, m, n);
        if (m > 0) nb[2] = mesh.index(l, m - 1, n);
        if (m < Mc - 1) nb[3] = mesh.index(l, m + 1, n);
        if (dim == 3 && n > 0) nb[4] = mesh.index(l, m, n - 1);
        if (dim == 3 && n < Nc - 1) nb[5] = mesh.index(l, m, n + 1);
      }

  ctx.inv_h.resize(n1);
  for (int i = 0; i < n1; ++i) ctx.inv_h[i] = 1.0 / op.weights[i];
  for (int i = 0; i < n1; ++i)
    if (op.e_left[i] != 0.0 || op.e_right[i] != 0.0) ctx.penalty_rows.push_back(i);

  ctx.node_weight.resize(nn);
  for (int nd = 0; nd < nn; ++nd) {
    const int i = nd % n1, j = (nd / n1) % n1, k = nd / (n1 * n1);
    double w = op.weights[i] * op.weights[j];
    if (dim == 3) w *= op.weights[k];
    ctx.node_weight[nd] = w;
  }

  const int nf = dim == 2 ? n1 : n1 * n1;
  for (int a = 0; a < dim; ++a) {
    ctx.face_weight[a].resize(nf);
    for (int fn = 0; fn < nf; ++fn) {
      double w;
      if (dim == 2) {
        w = op.weights[fn];
      } else {
        w = op.weights[fn % n1] * op.weights[fn / n1];
      }
      ctx.face_weight[a][fn] = w;
    }
    double fj = 1.0;
    for (int b = 0; b < dim; ++b)
      if (b != a) fj *= 0.5 * mesh.spacing[b];
    ctx.face_jacobian[a] = fj;
  }

  ctx.faces.nf = nf;
  const std::size_t sides = static_cast<std::size_t>(ne) * dim * 2 * nf;
  const std::size_t faces = static_cast<std::size_t>(ne) * dim * nf;
  ctx.faces.trace_p.resize(sides);
  ctx.faces.trace_vn.resize(sides);
  ctx.faces.trace_Z.resize(sides);
  ctx.faces.hat_p.resize(sides);
  ctx.faces.hat_vn.resize(sides);
  ctx.faces.F.resize(faces);
  ctx.faces.G.resize(faces);
  return ctx;
}

void volume_derivative(const Operators1D& op, int dim, int axis,
                       double two_over_dx, const double* in, double* out) {
  const int n1 = op.n();
  const double* D = op.D.data();
  if (axis == 0) {
    const int lines = dim == 2 ? n1 : n1 * n1;
    for (int line = 0; line < lines; ++line) {
      const double* src = in + line * n1;
      double* dst = out + line * n1;
      for (int i = 0; i < n1; ++i) {
        double s = 0.0;
        const double* Di = D + i * n1;
        for (int m = 0; m < n1; ++m) s += Di[m] * src[m];
        dst[i] = two_over_dx * s;
      }
    }
  } else if (axis == 1) {
    const int planes = dim == 2 ? 1 : n1;
    for (int k = 0; k < planes; ++k)
      for (int i = 0; i < n1; ++i) {
        const double* src = in + i + k * n1 * n1;
        double* dst = out + i + k * n1 * n1;
        for (int j = 0; j < n1; ++j) {
          double s = 0.0;
          const double* Dj = D + j * n1;
          for (int m = 0; m < n1; ++m) s += Dj[m] * src[m * n1];
          dst[j * n1] = two_over_dx * s;
        }
      }
  } else {
    const int nsq = n1 * n1;
    for (int ij = 0; ij < nsq; ++ij) {
      const double* src = in + ij;
      double* dst = out + ij;
      for (int k = 0; k < n1; ++k) {
        double s = 0.0;
        const double* Dk = D + k * n1;
        for (int m = 0; m < n1; ++m) s += Dk[m] * src[m * nsq];
        dst[k * nsq] = two_over_dx * s;
      }
    }
  }
}

void face_penalty(const Operators1D& op, int dim, int axis, double two_over_dx,
                  PenaltyStyle style, const double* F, const double* G,
                  const double* Zm, const double* Zp, double* out) {
  const int n1 = op.n();
  const int nf = dim == 2 ? n1 : n1 * n1;
  for (int ia = 0; ia < n1; ++ia) {
    const double cl = two_over_dx / op.weights[ia] * op.e_left[ia];
    const double cr = two_over_dx / op.weights[ia] * op.e_right[ia];
    if (cl == 0.0 && cr == 0.0) continue;
    for (int fn = 0; fn < nf; ++fn) {
      int base, stride;
      face_base_stride(dim, n1, axis, fn, base, stride);
      double term;
      if (style == PenaltyStyle::Pressure)
        term = cl * F[fn] / Zm[fn] - cr * G[fn] / Zp[fn];
      else
        term = cl * F[fn] + cr * G[fn];
      out[base + ia * stride] += term;
    }
  }
}

void compute_face_values(RhsContext& ctx, const State& q) {
  const StateLayout& L = ctx.layout;
  const Operators1D& op = *ctx.op;
  const int dim = L.dim, n1 = L.n1, nf = ctx.faces.nf;
  const int ne = L.n_elements;
  FaceValues& fv = ctx.faces;

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int e = 0; e < ne; ++e) {
    const double* Znode = ctx.material->Z.data() +
                          static_cast<std::size_t>(e) * L.nodes;
    for (int a = 0; a < dim; ++a) {
      const double* p = q.field(e, L.field_p());
      const double* vn = q.field(e, L.field_vel(a));
      for (int s = 0; s < 2; ++s) {
        const double* evec = s == 0 ? op.e_left.data() : op.e_right.data();
        const std::size_t out0 =
            fv.side_index(dim, e, a, s == 0 ? Side::Minus : Side::Plus, 0);
        for (int fn = 0; fn < nf; ++fn) {
          int base, stride;
          face_base_stride(dim, n1, a, fn, base, stride);
          double tp = 0, tv = 0, tz = 0;
          for (int i = 0; i < n1; ++i) {
            const double w = evec[i];
            if (w == 0.0) continue;
            const int nd = base + i * stride;
            tp += w * p[nd];
            tv += w * vn[nd];
            tz += w * Znode[nd];
          }
          fv.trace_p[out0 + fn] = tp;
          fv.trace_vn[out0 + fn] = tv;
          fv.trace_Z[out0 + fn] = tz;
        }
      }
    }
  }

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int e = 0; e < ne; ++e) {
    for (int a = 0; a < dim; ++a) {
      for (int s = 0; s < 2; ++s) {
        const Side side = s == 0 ? Side::Minus : Side::Plus;
        const std::size_t own = fv.side_index(dim, e, a, side, 0);
        const int nb = ctx.neighbor_of(e, a, side);
        for (int fn = 0; fn < nf; ++fn) {
          const double po = fv.trace_p[own + fn];
          const double vo = fv.trace_vn[own + fn];
          const double Zo = fv.trace_Z[own + fn];
          TraceState hat;
          if (nb >= 0) {
            const Side opp = side == Side::Minus ? Side::Plus : Side::Minus;
            const std::size_t other = fv.side_index(dim, nb, a, opp, 0);
            const double pn = fv.trace_p[other + fn];
            const double vnn = fv.trace_vn[other + fn];
            const double Zn = fv.trace_Z[other + fn];
            // The face normal points along +axis: the minus-side data comes
            // from the element below the face.
            hat = side == Side::Minus ? interface_hat(pn, vnn, Zn, po, vo, Zo)
                                      : interface_hat(po, vo, Zo, pn, vnn, Zn);
          } else {
            hat = boundary_hat(po, vo, Zo, ctx.bc.at(a, side), side);
          }
          fv.hat_p[own + fn] = hat.p_hat;
          fv.hat_vn[own + fn] = hat.vn_hat;
          const double fl = fluctuation(po, vo, Zo, hat, side);
          if (side == Side::Minus)
            fv.F[fv.face_index(dim, e, a, fn)] = fl;
          else
            fv.G[fv.face_index(dim, e, a, fn)] = fl;
        }
      }
    }
  }
}

void apply_operator(RhsContext& ctx, const State& q, State& dq) {
  if (q.layout.size() != ctx.layout.size() || dq.layout.size() != ctx.layout.size())
    throw ContractViolation("apply_operator: state/layout mismatch");
  compute_face_values(ctx, q);
  const int ne = ctx.layout.n_elements;
#ifdef _OPENMP
#pragma omp parallel
  {
    Workspace ws(ctx.layout.nodes, ctx.faces.nf);
#pragma omp for schedule(static)
    for (int e = 0; e < ne; ++e) assemble_element(ctx, q, e, ws, dq);
  }
#else
  Workspace ws(ctx.layout.nodes, ctx.faces.nf);
  for (int e = 0; e < ne; ++e) assemble_element(ctx, q, e, ws, dq);
#endif
}

void add_source(const RhsContext& ctx, double scale, State& dq) {
  if (!ctx.source || scale == 0.0) return;
  const PointSource& src = *ctx.source;
  double* dp = dq.field(src.element, ctx.layout.field_p());
  for (int nd = 0; nd < ctx.layout.nodes; ++nd)
    dp[nd] -= scale * src.weights[nd];
}

void rhs(RhsContext& ctx, const State& q, double t, State& dq) {
  if (auto bad = find_nonfinite(q))
    throw NumericalError("non-finite value in state",
                         bad->element, q.layout.field_name(bad->field), t);
  apply_operator(ctx, q, dq);
  if (ctx.source)
    add_source(ctx, gaussian_stf(t, ctx.source->t0, ctx.source->sigma0), dq);
}

} // namespace pmlwave
