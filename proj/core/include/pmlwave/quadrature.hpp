#pragma once

#include <span>
#include <vector>

namespace pmlwave {

// Families of collocation rules on [-1,1] with N = degree+1 nodes.
//   GLL: Gauss-Lobatto-Legendre, both endpoints, exact to degree 2N-3.
//   GL:  Gauss-Legendre, no endpoints, exact to degree 2N-1.
//   GLR: left Gauss-Lobatto-Radau, includes -1 only, exact to degree 2N-2.
enum class QuadKind { GLL, GL, GLR };

const char* to_string(QuadKind kind);

struct QuadRule {
  QuadKind kind;
  int degree = 0;                // polynomial degree P, N = P+1 nodes
  std::vector<double> nodes;     // strictly increasing in [-1,1]
  std::vector<double> weights;   // positive, sum to 2

  int n() const { return degree + 1; }
};

// Throws ConfigError unless 1 <= degree <= 12.
QuadRule build_rule(QuadKind kind, int degree);

// Collocation operators for the nodal Lagrange basis on a rule's nodes,
// all row-major (P+1) x (P+1).
//
// D is the differentiation matrix, Q = H D with H = diag(weights), and the
// summation-by-parts identity  Q + Q^T = B = e(1) e(1)^T - e(-1) e(-1)^T
// holds because every rule here integrates degree 2P-1 exactly. When an
// endpoint is not a node (GL both ends, GLR the right end), face values are
// recovered by extrapolation with e(-1)/e(1).
struct Operators1D {
  QuadKind kind;
  int degree = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> D;
  std::vector<double> Q;
  std::vector<double> B;
  std::vector<double> e_left;    // Lagrange basis at xi = -1
  std::vector<double> e_right;   // Lagrange basis at xi = +1
  std::vector<double> bary;      // barycentric weights of the node set

  int n() const { return degree + 1; }
  double d(int i, int j) const { return D[i * (degree + 1) + j]; }
};

Operators1D build_operators(QuadKind kind, int degree);

// All Lagrange cardinal functions L_i(xi), |xi| <= 1 (ContractViolation
// otherwise). Exact cardinality at the nodes.
std::vector<double> basis_at(const Operators1D& op, double xi);

// Evaluate the nodal interpolant sum_i values[i] L_i(xi).
double interpolate_to_point(const Operators1D& op,
                            std::span<const double> values, double xi);

} // namespace pmlwave
