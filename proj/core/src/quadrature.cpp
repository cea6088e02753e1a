#include "pmlwave/quadrature.hpp"

#include "pmlwave/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace pmlwave {

namespace {

constexpr int kMaxDegree = 12;
constexpr double kNewtonTol = 1e-15;

// Legendre P_n(x) and P_n'(x) by the three-term recurrence; stable for the
// small n used here.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  double d0 = 0.0, d1 = 1.0;
  if (n == 0) { p = p0; dp = d0; return; }
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    const double d2 = ((2 * k + 1) * (p1 + x * d1) - k * d0) / (k + 1);
    p0 = p1; p1 = p2;
    d0 = d1; d1 = d2;
  }
  p = p1; dp = d1;
}

double legendre_value(int n, double x) {
  double p, dp;
  legendre(n, x, p, dp);
  return p;
}

// f and f' for the polynomial whose interior roots define each rule.
struct RootFunction {
  QuadKind kind;
  int degree;

  void eval(double x, double& f, double& df) const {
    double p, dp;
    switch (kind) {
      case QuadKind::GL:
        legendre(degree + 1, x, f, df);
        return;
      case QuadKind::GLL:
        // Interior nodes are the roots of P_P'. P'' from the Legendre ODE,
        // valid away from the endpoints where these roots live.
        legendre(degree, x, p, dp);
        f = dp;
        df = (2.0 * x * dp - degree * (degree + 1) * p) / (1.0 - x * x);
        return;
      case QuadKind::GLR: {
        // Radau polynomial P_P + P_{P+1} deflated by its (1+x) factor so the
        // built-in root at -1 cannot capture the Newton iteration.
        double pa, da, pb, db;
        legendre(degree, x, pa, da);
        legendre(degree + 1, x, pb, db);
        const double g = pa + pb, dg = da + db;
        f = g / (1.0 + x);
        df = (dg * (1.0 + x) - g) / ((1.0 + x) * (1.0 + x));
        return;
      }
    }
    std::abort();
  }
};

// Bracketed Newton: bisection until the bracket is tight, then Newton steps
// confined to the bracket. Converges to ~1e-16 for these well-separated roots.
double polish_root(const RootFunction& fn, double lo, double hi) {
  double flo, dflo, fhi, dfhi;
  fn.eval(lo, flo, dflo);
  fn.eval(hi, fhi, dfhi);
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double f, df;
    fn.eval(x, f, df);
    if (f == 0.0) return x;
    if ((f < 0) == (flo < 0)) { lo = x; flo = f; } else { hi = x; fhi = f; }
    double step = (df != 0.0) ? -f / df : 0.0;
    double xn = x + step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);   // fall back to bisection
    if (std::abs(xn - x) <= kNewtonTol) return xn;
    x = xn;
  }
  return x;
}

// All roots of fn in (lo, hi), located by a sign-change scan. The root counts
// are known per family, so the caller can assert completeness.
std::vector<double> scan_roots(const RootFunction& fn, double lo, double hi,
                               int expected) {
  std::vector<double> roots;
  const int cells = 256 * (fn.degree + 2);
  double x0 = lo, f0, df0;
  fn.eval(x0, f0, df0);
  for (int c = 1; c <= cells; ++c) {
    const double x1 = lo + (hi - lo) * static_cast<double>(c) / cells;
    double f1, df1;
    fn.eval(x1, f1, df1);
    if ((f0 < 0) != (f1 < 0)) roots.push_back(polish_root(fn, x0, x1));
    x0 = x1; f0 = f1;
  }
  if (static_cast<int>(roots.size()) != expected)
    throw ContractViolation("quadrature root scan found " +
                            std::to_string(roots.size()) + " roots, expected " +
                            std::to_string(expected));
  return roots;
}

} // namespace

const char* to_string(QuadKind kind) {
  switch (kind) {
    case QuadKind::GLL: return "gll";
    case QuadKind::GL: return "gl";
    case QuadKind::GLR: return "glr";
  }
  return "?";
}

QuadRule build_rule(QuadKind kind, int degree) {
  if (degree < 1 || degree > kMaxDegree)
    throw ConfigError("polynomial degree must be in [1, " +
                      std::to_string(kMaxDegree) + "], got " +
                      std::to_string(degree));

  QuadRule rule;
  rule.kind = kind;
  rule.degree = degree;
  const int n = degree + 1;
  const RootFunction fn{kind, degree};

  switch (kind) {
    case QuadKind::GL: {
      rule.nodes = scan_roots(fn, -1.0 + 1e-12, 1.0 - 1e-12, n);
      for (double x : rule.nodes) {
        double p, dp;
        legendre(n, x, p, dp);
        rule.weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
      }
      break;
    }
    case QuadKind::GLL: {
      rule.nodes.push_back(-1.0);
      if (degree >= 2) {
        auto interior = scan_roots(fn, -1.0 + 1e-9, 1.0 - 1e-9, degree - 1);
        rule.nodes.insert(rule.nodes.end(), interior.begin(), interior.end());
      }
      rule.nodes.push_back(1.0);
      for (double x : rule.nodes) {
        const double p = legendre_value(degree, x);
        rule.weights.push_back(2.0 / (degree * n * p * p));
      }
      break;
    }
    case QuadKind::GLR: {
      rule.nodes.push_back(-1.0);
      auto interior = scan_roots(fn, -1.0 + 1e-9, 1.0 - 1e-12, degree);
      rule.nodes.insert(rule.nodes.end(), interior.begin(), interior.end());
      rule.weights.push_back(2.0 / (static_cast<double>(n) * n));
      for (std::size_t i = 1; i < rule.nodes.size(); ++i) {
        const double x = rule.nodes[i];
        const double p = legendre_value(degree, x);
        rule.weights.push_back((1.0 - x) / (static_cast<double>(n) * n * p * p));
      }
      break;
    }
  }
  return rule;
}

Operators1D build_operators(QuadKind kind, int degree) {
  const QuadRule rule = build_rule(kind, degree);
  const int n = rule.n();

  Operators1D op;
  op.kind = kind;
  op.degree = degree;
  op.nodes = rule.nodes;
  op.weights = rule.weights;

  // Barycentric weights of the node set.
  op.bary.assign(n, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) op.bary[i] /= (op.nodes[i] - op.nodes[j]);

  // Differentiation matrix D_ij = L_j'(x_i); the diagonal by the
  // negative-sum trick so constants differentiate to exactly zero.
  op.D.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dij = (op.bary[j] / op.bary[i]) / (op.nodes[i] - op.nodes[j]);
      op.D[i * n + j] = dij;
      diag -= dij;
    }
    op.D[i * n + i] = diag;
  }

  op.e_left = basis_at(op, -1.0);
  op.e_right = basis_at(op, 1.0);

  op.Q.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      op.Q[i * n + j] = op.weights[i] * op.D[i * n + j];

  op.B.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      op.B[i * n + j] = op.e_right[i] * op.e_right[j] - op.e_left[i] * op.e_left[j];

  return op;
}

std::vector<double> basis_at(const Operators1D& op, double xi) {
  if (std::abs(xi) > 1.0 + 1e-12)
    throw ContractViolation("basis_at: xi = " + std::to_string(xi) +
                            " outside [-1, 1]");
  const int n = op.n();
  std::vector<double> L(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (std::abs(xi - op.nodes[i]) < 1e-14) { L[i] = 1.0; return L; }
  }
  double denom = 0.0;
  for (int i = 0; i < n; ++i) {
    L[i] = op.bary[i] / (xi - op.nodes[i]);
    denom += L[i];
  }
  for (int i = 0; i < n; ++i) L[i] /= denom;
  return L;
}

double interpolate_to_point(const Operators1D& op,
                            std::span<const double> values, double xi) {
  if (static_cast<int>(values.size()) != op.n())
    throw ContractViolation("interpolate_to_point: value count mismatch");
  const std::vector<double> L = basis_at(op, xi);
  double s = 0.0;
  for (int i = 0; i < op.n(); ++i) s += L[i] * values[i];
  return s;
}

} // namespace pmlwave
