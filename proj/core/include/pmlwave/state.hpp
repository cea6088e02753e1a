#pragma once

#include "pmlwave/mesh.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace pmlwave {

// Nodal DG solution. Field order is dimension-dependent with no dummy slots:
//   2D: p, u, v, sigma            (sigma = y-direction PML auxiliary)
//   3D: p, u, v, w, sigma, psi    (psi = z-direction auxiliary)
// The velocity of axis a is field 1+a; sigma is 1+dim, psi (3D) is 2+dim.
struct StateLayout {
  int dim = 2;
  int degree = 1;
  int n1 = 2;               // nodes per axis = degree+1
  int nodes = 4;            // nodes per element = n1^dim
  int n_fields = 4;
  int n_elements = 0;

  static StateLayout make(const Mesh& mesh, int degree);

  int field_p() const { return 0; }
  int field_vel(int axis) const { return 1 + axis; }
  int field_sigma() const { return 1 + dim; }
  int field_psi() const { return 2 + dim; }     // 3D only
  bool is_aux(int f) const { return f > dim; }

  int node(int i, int j, int k = 0) const { return i + n1 * (j + n1 * k); }
  std::size_t element_values() const {
    return static_cast<std::size_t>(n_fields) * nodes;
  }
  std::size_t size() const {
    return static_cast<std::size_t>(n_elements) * element_values();
  }
  std::size_t at(int elem, int field, int node) const {
    return (static_cast<std::size_t>(elem) * n_fields + field) * nodes + node;
  }

  const char* field_name(int f) const;
};

struct State {
  StateLayout layout;
  std::vector<double> data;

  explicit State(const StateLayout& l) : layout(l), data(l.size(), 0.0) {}

  double* field(int elem, int f) { return data.data() + layout.at(elem, f, 0); }
  const double* field(int elem, int f) const {
    return data.data() + layout.at(elem, f, 0);
  }
  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

struct NonFinite {
  int element;
  int field;
  int node;
};

// First non-finite entry, if any (element-major scan, deterministic).
std::optional<NonFinite> find_nonfinite(const State& st);

} // namespace pmlwave
