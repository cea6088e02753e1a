#pragma once

#include "pmlwave/rhs.hpp"
#include "pmlwave/state.hpp"

namespace pmlwave {

// Global time step dt = cfl / ((2P+1) c_max) * min element extent.
double cfl_dt(const Mesh& mesh, const Material& material, int degree,
              double cfl);

// Taylor-series step of order K = degree + 1: q(t+dt) = sum_k dt^k/k! q^(k),
// with q^(k+1) obtained by applying the semi-discrete operator to q^(k) and
// adding the k-th time derivative of the source wavelet. Uses two scratch
// states of the same layout.
class TaylorStepper {
public:
  TaylorStepper(RhsContext& ctx, int order);

  int order() const { return order_; }

  // Advances q from t by dt in place. Throws NumericalError when the updated
  // state contains non-finite values.
  void step(State& q, double t, double dt);

private:
  RhsContext* ctx_;
  int order_;
  State deriv_;
  State scratch_;
};

} // namespace pmlwave
