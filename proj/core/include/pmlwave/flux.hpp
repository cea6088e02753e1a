#pragma once

#include "pmlwave/errors.hpp"

#include <array>
#include <cmath>

namespace pmlwave {

// Face side along an axis: Minus is the face at local xi = -1, Plus at +1.
enum class Side { Minus, Plus };

// Reflection coefficients of the outer boundary faces, r[axis][side],
// each in [-1, 1]: r = 0 absorbing, |r| = 1 fully reflecting walls.
struct BoundarySpec {
  std::array<std::array<double, 2>, 3> r{{{0, 0}, {0, 0}, {0, 0}}};

  double at(int axis, Side side) const {
    return r[axis][side == Side::Minus ? 0 : 1];
  }
  void validate(int dim) const {
    for (int a = 0; a < dim; ++a)
      for (int s = 0; s < 2; ++s)
        if (!(std::abs(r[a][s]) <= 1.0))
          throw ConfigError("reflection coefficient |r| must be <= 1");
  }
};

// Local characteristic amplitudes of the trace (p, v_n) with impedance Z.
inline double chi_minus(double p, double vn, double Z) {
  return 0.5 * (Z * vn + p);
}
inline double chi_plus(double p, double vn, double Z) {
  return 0.5 * (Z * vn - p);
}

// Single-valued face state (p_hat, v_hat) shared by both sides of a face.
struct TraceState {
  double p_hat = 0;
  double vn_hat = 0;
};

// Interface state from the two one-sided traces. Solves the face Riemann
// problem subject to continuity of p_hat and v_hat while preserving the
// outgoing characteristic of each side:
//   Z^- v_hat + p_hat = Z^- v^- + p^-,   Z^+ v_hat - p_hat = Z^+ v^+ - p^+.
inline TraceState interface_hat(double p_m, double vn_m, double Z_m,
                                double p_p, double vn_p, double Z_p) {
  const double den = Z_m + Z_p;
  TraceState h;
  h.vn_hat = (Z_m * vn_m + Z_p * vn_p + p_m - p_p) / den;
  h.p_hat = (Z_p * p_m + Z_m * p_p + Z_m * Z_p * (vn_m - vn_p)) / den;
  return h;
}

// Outer-boundary state enforcing (1-r)/2 Z v_hat -/+ (1+r)/2 p_hat = 0 with
// the minus-face/plus-face sign while preserving the outgoing characteristic.
// Closed forms, no division by 1 +/- r, so r = +/-1 needs no special case.
inline TraceState boundary_hat(double p, double vn, double Z, double r,
                               Side side) {
  TraceState h;
  if (side == Side::Minus) {
    const double q = Z * vn - p;          // outgoing at a minus face
    h.p_hat = -0.5 * (1.0 - r) * q;
    h.vn_hat = 0.5 * (1.0 + r) * q / Z;
  } else {
    const double q = Z * vn + p;          // outgoing at a plus face
    h.p_hat = 0.5 * (1.0 - r) * q;
    h.vn_hat = 0.5 * (1.0 + r) * q / Z;
  }
  return h;
}

// Flux fluctuation seen by the element owning the trace (p, vn):
//   minus face: F = chi_minus(p, vn) - chi_minus(p_hat, vn_hat)
//   plus face:  G = chi_plus(p, vn) - chi_plus(p_hat, vn_hat)
// Both vanish when the trace already satisfies the face condition.
inline double fluctuation(double p, double vn, double Z, const TraceState& h,
                          Side side) {
  if (side == Side::Minus)
    return 0.5 * (Z * (vn - h.vn_hat) + (p - h.p_hat));
  return 0.5 * (Z * (vn - h.vn_hat) - (p - h.p_hat));
}

} // namespace pmlwave
