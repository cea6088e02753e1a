#pragma once

#include "pmlwave/analysis.hpp"
#include "pmlwave/config.hpp"
#include "pmlwave/time_integration.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pmlwave {

// Everything the semi-discrete operator points at, assembled from a config.
// Keep the scene in place while any RhsContext built from it is alive.
struct Scene {
  Mesh mesh;
  Operators1D op;
  Material material;
  PmlConfig pml;
  DampingField damping;
  BoundarySpec bc;
  std::optional<PointSource> source;
  Box interior;        // domain minus active layers
  double resolved_tol; // NaN when d0 was given directly or no layer is active
  double resolved_d0;  // 0 when no layer is active
};

Scene build_scene(const RunConfig& cfg);
RhsContext scene_context(Scene& scene);

// Zero state plus the configured Gaussian pressure pulse (if any).
State initial_state(const Scene& scene, const RunConfig& cfg);

struct TimeSample {
  double t_s;
  double energy;
  double linf_p_global;
  double linf_p_interior;
  double diss_flux_rate;
  double diss_boundary_rate;
};

struct ReceiverSample {
  double t_s;
  double p;
  double p_analytic; // NaN when no analytic reference applies
};

struct RunArtifacts {
  double dt_s = 0;
  int steps = 0;
  std::vector<TimeSample> series;       // every output_every_steps, plus t=0 and t_final
  std::vector<ReceiverSample> receiver; // every step, when a receiver is set
  std::string failure;                  // empty on success
  double failure_time_s = 0;
};

// Advances the configured problem to t_final. With output_dir set, writes
// the effective config echo, a derived-quantities record, the time-series
// CSV, the receiver CSV, and VTK snapshots; a numerical failure stops the
// run, leaves the partial outputs plus failure.json behind, and is reported
// through `failure` rather than thrown.
RunArtifacts run_experiment(const RunConfig& cfg);

// Same stepping loop, but keeps the final state (for error evaluation
// against another run) and writes nothing.
struct FinalField {
  Scene scene;
  State q;
  double dt_s = 0;
  int steps = 0;
};
FinalField run_to_final(const RunConfig& cfg);

struct ConvergenceLevel {
  double dx_km = 0;
  int degree = 0;
  double tol = 0;
  double d0_per_s = 0;
  double dt_s = 0;
  double interior_linf_error = 0;
};

struct ConvergenceResult {
  char mode = 'h';
  std::vector<ConvergenceLevel> levels;
  double observed_order = 0; // least-squares slope (h mode only, else NaN)
  bool strictly_decreasing = false;
};

// Interior error of each refinement level against an enlarged-domain
// reference: the damped layers are removed and the domain extended on those
// sides far enough that no signal reaches the new boundary by t_final, so
// the difference isolates the layer error. h-mode levels are element sizes,
// p-mode levels are polynomial degrees. The damping amplitude follows the
// tolerance model at every level (explicit d0/tol settings are ignored).
// With output_dir set, writes convergence.csv.
ConvergenceResult convergence_study(const RunConfig& base, char mode,
                                    const std::vector<double>& levels);

} // namespace pmlwave
