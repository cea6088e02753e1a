#include "pmlwave/time_integration.hpp"

#include "pmlwave/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pmlwave {

double cfl_dt(const Mesh& mesh, const Material& material, int degree,
              double cfl) {
  if (!(cfl > 0)) throw ConfigError("cfl must be > 0");
  double min_dx = mesh.spacing[0];
  for (int a = 1; a < mesh.dim; ++a) min_dx = std::min(min_dx, mesh.spacing[a]);
  const double cmax = material.max_c();
  return cfl / ((2.0 * degree + 1.0) * cmax) * min_dx;
}

TaylorStepper::TaylorStepper(RhsContext& ctx, int order)
    : ctx_(&ctx), order_(order), deriv_(ctx.layout), scratch_(ctx.layout) {
  if (order < 1) throw ContractViolation("TaylorStepper: order must be >= 1");
}

void TaylorStepper::step(State& q, double t, double dt) {
  if (auto bad = find_nonfinite(q))
    throw NumericalError("non-finite value in state", bad->element,
                         q.layout.field_name(bad->field), t);

  const std::size_t n = q.data.size();
  double* acc = q.data.data();

  // deriv_ holds q^(k); build q^(k+1) in scratch_ and accumulate dt^k/k!.
  deriv_.data = q.data;
  double factor = 1.0;
  for (int k = 0; k < order_; ++k) {
    factor *= dt / (k + 1);
    apply_operator(*ctx_, deriv_, scratch_);
    if (ctx_->source)
      add_source(*ctx_,
                 gaussian_stf(t, ctx_->source->t0, ctx_->source->sigma0, k),
                 scratch_);
    std::swap(deriv_.data, scratch_.data);
    const double* d = deriv_.data.data();
    for (std::size_t i = 0; i < n; ++i) acc[i] += factor * d[i];
  }

  if (auto bad = find_nonfinite(q))
    throw NumericalError("time step produced a non-finite value", bad->element,
                         q.layout.field_name(bad->field), t + dt);
}

} // namespace pmlwave
