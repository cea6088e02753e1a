#include "pmlwave/state.hpp"

#include "pmlwave/errors.hpp"

#include <cmath>

namespace pmlwave {

StateLayout StateLayout::make(const Mesh& mesh, int degree) {
  if (degree < 1) throw ContractViolation("StateLayout: degree < 1");
  StateLayout l;
  l.dim = mesh.dim;
  l.degree = degree;
  l.n1 = degree + 1;
  l.nodes = l.n1 * l.n1 * (mesh.dim == 3 ? l.n1 : 1);
  l.n_fields = mesh.dim == 2 ? 4 : 6;
  l.n_elements = mesh.n_elements();
  return l;
}

const char* StateLayout::field_name(int f) const {
  static const char* names2d[] = {"p", "u", "v", "sigma"};
  static const char* names3d[] = {"p", "u", "v", "w", "sigma", "psi"};
  if (f < 0 || f >= n_fields) return "?";
  return dim == 2 ? names2d[f] : names3d[f];
}

std::optional<NonFinite> find_nonfinite(const State& st) {
  const StateLayout& l = st.layout;
  const double* d = st.data.data();
  const std::size_t total = l.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!std::isfinite(d[idx])) {
      const int node = static_cast<int>(idx % l.nodes);
      const int field = static_cast<int>((idx / l.nodes) % l.n_fields);
      const int elem = static_cast<int>(idx / l.element_values());
      return NonFinite{elem, field, node};
    }
  }
  return std::nullopt;
}

} // namespace pmlwave
