#pragma once

#include "pmlwave/flux.hpp"
#include "pmlwave/mesh.hpp"
#include "pmlwave/pml.hpp"
#include "pmlwave/quadrature.hpp"
#include "pmlwave/state.hpp"

#include <array>
#include <optional>
#include <vector>

namespace pmlwave {

// Gaussian source time function g(t) = exp(-(t-t0)^2/(2 sigma^2))/(sigma sqrt(2 pi))
// and its time derivatives (probabilists' Hermite recurrence), deriv >= 0.
double gaussian_stf(double t, double t0, double sigma, int deriv = 0);

// Dirac point source collocated on the nodal basis of its containing element.
// weights integrate to 1 against a constant in the element's mass inner
// product; the wavelet enters the pressure rate as -weights * g(t).
struct PointSource {
  std::array<double, 3> position{0, 0, 0};
  double t0 = 0;
  double sigma0 = 1;
  int element = -1;
  std::vector<double> weights;                 // one value per element node
};

// Locate the element and build the collocation weights. ConfigError if the
// position lies outside the mesh or on an element boundary.
PointSource make_point_source(const Mesh& mesh, const Operators1D& op,
                              std::array<double, 3> position, double t0,
                              double sigma0);

// One-sided face data for every element face, in face-node order (the tensor
// grid of the axes other than the face's). F lives on minus faces, G on plus
// faces; hat_* is the single-valued face state (stored per side; both sides
// of an interior face hold identical values).
struct FaceValues {
  int nf = 0;    // face nodes per face = (degree+1)^(dim-1)
  std::vector<double> trace_p, trace_vn, trace_Z;   // [e][axis][side][fn]
  std::vector<double> hat_p, hat_vn;                // [e][axis][side][fn]
  std::vector<double> F, G;                         // [e][axis][fn]

  std::size_t side_index(int dim, int e, int axis, Side s, int fn) const {
    return (static_cast<std::size_t>(e) * dim + axis) * 2 * nf +
           (s == Side::Plus ? nf : 0) + fn;
  }
  std::size_t face_index(int dim, int e, int axis, int fn) const {
    return (static_cast<std::size_t>(e) * dim + axis) * nf + fn;
  }
};

// Everything a right-hand-side evaluation needs, plus precomputed index
// tables and reusable face workspace. Pointees must outlive the context.
struct RhsContext {
  const Mesh* mesh = nullptr;
  const Operators1D* op = nullptr;
  const Material* material = nullptr;
  const DampingField* damping = nullptr;
  StateLayout layout;
  BoundarySpec bc;
  double omega_y = 1.0;
  double omega_z = 1.0;
  std::optional<PointSource> source;

  // Precomputed tables.
  std::array<double, 3> two_over_dx{0, 0, 0};
  std::vector<int> neighbor;          // [e][axis][side] -> element or -1
  std::vector<double> inv_h;          // 1/weights
  std::vector<int> penalty_rows;      // 1D rows with nonzero e(-1) or e(+1)
  std::vector<double> node_weight;    // per element node: prod of 1D weights
  std::array<std::vector<double>, 3> face_weight;  // per axis, per face node
  std::array<double, 3> face_jacobian{1, 1, 1};    // prod of other spacings/2

  FaceValues faces;                   // workspace reused across evaluations

  int neighbor_of(int e, int axis, Side s) const {
    return neighbor[(static_cast<std::size_t>(e) * 3 + axis) * 2 +
                    (s == Side::Plus ? 1 : 0)];
  }
};

RhsContext make_context(const Mesh& mesh, const Operators1D& op,
                        const Material& material, const DampingField& damping,
                        const BoundarySpec& bc, double omega_y = 1.0,
                        double omega_z = 1.0,
                        std::optional<PointSource> source = std::nullopt);

// Reference-coordinate derivative along one axis scaled by two_over_dx:
// out = (2/dx) (D applied along `axis`) in. in/out hold one element's nodes.
void volume_derivative(const Operators1D& op, int dim, int axis,
                       double two_over_dx, const double* in, double* out);

// Face-penalty increment of one axis, written (+=) onto out:
//   pressure style: (2/dx) H^-1 [ e(-1) F/Z - e(+1) G/Z ]
//   velocity style: (2/dx) H^-1 [ e(-1) F   + e(+1) G   ]
// F, G, Zm, Zp are face-node arrays (Z* ignored for velocity style).
enum class PenaltyStyle { Pressure, Velocity };
void face_penalty(const Operators1D& op, int dim, int axis, double two_over_dx,
                  PenaltyStyle style, const double* F, const double* G,
                  const double* Zm, const double* Zp, double* out);

// Phase 1+2: extrapolate traces, solve every face, fill ctx.faces.
void compute_face_values(RhsContext& ctx, const State& q);

// dq = A q: the full spatial operator including PML coupling and face
// penalties, excluding the source term. dq is overwritten. Deterministic for
// any thread count (element-local writes only).
void apply_operator(RhsContext& ctx, const State& q, State& dq);

// dq.p -= scale * source weights (no-op without a source).
void add_source(const RhsContext& ctx, double scale, State& dq);

// dq = A q + source(t). Throws NumericalError naming the first non-finite
// entry of q.
void rhs(RhsContext& ctx, const State& q, double t, State& dq);

} // namespace pmlwave
