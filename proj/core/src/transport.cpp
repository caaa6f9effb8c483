#include "cdlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cdlab {

namespace {

struct AtomView {
  const Eigen::VectorXd* nodes;
  std::vector<double> cum;  // cumulative masses, cum.back() ~ 1
};

AtomView atoms(const WeightedGrid& grid, const GridDensity& f) {
  AtomView a;
  a.nodes = &grid.nodes;
  a.cum.resize(grid.n);
  double acc = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    acc += f.values[i] * grid.weights[i];
    a.cum[i] = acc;
  }
  return a;
}

constexpr double kEps = 1e-15;

// Next breakpoint strictly past u on the f side; the last atom covers the
// remaining mass up to 1 (densities may carry a 1e-10 mass defect).
double side_break(const AtomView& a, int idx, double u) {
  const int n = static_cast<int>(a.cum.size());
  return (idx < n - 1 && a.cum[idx] > u + kEps) ? a.cum[idx] : 1.0;
}

// Exact integral of (F^{-1} - G^{-1})^2 over [0,1] for node-supported
// measures, accumulated on the merged breakpoint mesh refined by `mesh`
// uniform points (the integrand is constant on every piece).
double quantile_cost(const AtomView& f, const AtomView& g, int mesh) {
  const int n = static_cast<int>(f.cum.size());
  double total = 0.0, u = 0.0;
  int i = 0, j = 0, k = 1;
  while (u < 1.0 - kEps) {
    while (i < n - 1 && f.cum[i] <= u + kEps) ++i;
    while (j < n - 1 && g.cum[j] <= u + kEps) ++j;
    double next = std::min(side_break(f, i, u), side_break(g, j, u));
    while (k < mesh && static_cast<double>(k) / mesh <= u + kEps) ++k;
    next = std::min(next, static_cast<double>(k) / mesh);
    const double d = (*f.nodes)[i] - (*g.nodes)[j];
    if (next > u) total += (next - u) * d * d;
    u = std::max(next, u + kEps);
  }
  return total;
}

// Atom of g covering mass coordinate vf, and the mass remaining inside it
// before the next g breakpoint (or the cover wrap at 1).
struct CoverAtom {
  int idx;
  double room;
};

CoverAtom cover_atom(const AtomView& g, double vf) {
  const int n = static_cast<int>(g.cum.size());
  const int j = static_cast<int>(
      std::upper_bound(g.cum.begin(), g.cum.end() - 1, vf + kEps) -
      g.cum.begin());
  const double room =
      (j < n - 1 && g.cum[j] > vf + kEps) ? g.cum[j] - vf : 1.0 - vf;
  return {j, room};
}

// Circle cost at mass shift alpha: the second quantile function is read on
// the universal cover, G^{-1}(u + alpha) = x_j + floor(u + alpha) * ell.
double circle_cost(const AtomView& f, const AtomView& g, double alpha,
                   double ell) {
  const int n = static_cast<int>(f.cum.size());
  double total = 0.0, u = 0.0;
  int i = 0;
  while (u < 1.0 - kEps) {
    while (i < n - 1 && f.cum[i] <= u + kEps) ++i;
    const double v = u + alpha;
    const double lift = std::floor(v);
    const CoverAtom ca = cover_atom(g, v - lift);
    double next = std::min(side_break(f, i, u), u + ca.room);
    next = std::min(next, 1.0);
    const double d = (*f.nodes)[i] - ((*g.nodes)[ca.idx] + lift * ell);
    if (next > u) total += (next - u) * d * d;
    u = std::max(next, u + kEps);
  }
  return total;
}

void require_grid(const WeightedGrid& grid, const GridDensity& f,
                  const char* what) {
  if (f.values.size() != grid.n) throw ShapeError(std::string(what) +
                                                  ": density length mismatch");
}

struct ShiftScan {
  double alpha = 0.0;
  double cost = 0.0;
};

ShiftScan minimize_circle_cost(const AtomView& fa, const AtomView& ga,
                               double ell) {
  // Coarse scan over [-1, 1]; the cover cost is convex in the shift.
  ShiftScan best{0.0, circle_cost(fa, ga, 0.0, ell)};
  const int coarse = 64;
  int best_k = 0;
  for (int k = -coarse; k <= coarse; ++k) {
    const double a = static_cast<double>(k) / coarse;
    const double c = circle_cost(fa, ga, a, ell);
    if (c < best.cost) {
      best = {a, c};
      best_k = k;
    }
  }
  double lo = static_cast<double>(best_k - 1) / coarse;
  double hi = static_cast<double>(best_k + 1) / coarse;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double c1 = circle_cost(fa, ga, x1, ell);
  double c2 = circle_cost(fa, ga, x2, ell);
  for (int it = 0; it < 120 && hi - lo > 1e-13; ++it) {
    if (c1 <= c2) {
      hi = x2;
      x2 = x1;
      c2 = c1;
      x1 = hi - gr * (hi - lo);
      c1 = circle_cost(fa, ga, x1, ell);
    } else {
      lo = x1;
      x1 = x2;
      c1 = c2;
      x2 = lo + gr * (hi - lo);
      c2 = circle_cost(fa, ga, x2, ell);
    }
    if (c1 < best.cost) best = {x1, c1};
    if (c2 < best.cost) best = {x2, c2};
  }
  return best;
}

}  // namespace

W2Result w2_quantile(const WeightedGrid& grid, const GridDensity& f,
                     const GridDensity& g) {
  if (grid.kind != GridKind::interval)
    throw Error("w2_quantile: requires an interval grid (use w2_circle)");
  require_grid(grid, f, "w2_quantile");
  require_grid(grid, g, "w2_quantile");
  const double c = quantile_cost(atoms(grid, f), atoms(grid, g), 10 * grid.n);
  W2Result r;
  r.distance = std::sqrt(std::max(c, 0.0));
  r.method = W2Method::quantile;
  return r;
}

W2Result w2_circle(const WeightedGrid& grid, const GridDensity& f,
                   const GridDensity& g) {
  if (grid.kind != GridKind::circle)
    throw Error("w2_circle: requires a circle grid (use w2_quantile)");
  require_grid(grid, f, "w2_circle");
  require_grid(grid, g, "w2_circle");
  const ShiftScan best =
      minimize_circle_cost(atoms(grid, f), atoms(grid, g), grid.length());
  W2Result r;
  r.distance = std::sqrt(std::max(best.cost, 0.0));
  r.method = W2Method::circle_offset;
  return r;
}

W2Result w2(const WeightedGrid& grid, const GridDensity& f,
            const GridDensity& g) {
  return grid.kind == GridKind::circle ? w2_circle(grid, f, g)
                                       : w2_quantile(grid, f, g);
}

W2Result w2_lp(const WeightedGrid& grid, const GridDensity& f,
               const GridDensity& g) {
  if (grid.n > 128)
    throw ScaleError("w2_lp: dense LP oracle is limited to n <= 128");
  require_grid(grid, f, "w2_lp");
  require_grid(grid, g, "w2_lp");
  const int n = grid.n;
  Eigen::MatrixXd cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = grid.distance(i, j);
      cost(i, j) = d * d;
    }
  Eigen::VectorXd p = f.values.cwiseProduct(grid.weights);
  Eigen::VectorXd q = g.values.cwiseProduct(grid.weights);
  // The densities carry unit mass within 1e-10; rebalance exactly for the
  // simplex solver.
  q *= p.sum() / q.sum();

  TransportPlan plan;
  plan.coupling = detail::solve_transport(cost, p, q);
  plan.row_residual = (plan.coupling.rowwise().sum() - p).cwiseAbs().maxCoeff();
  plan.col_residual =
      (plan.coupling.colwise().sum().transpose() - q).cwiseAbs().maxCoeff();
  plan.mass_residual = std::abs(plan.coupling.sum() - 1.0);

  W2Result r;
  r.distance = std::sqrt(std::max(plan.coupling.cwiseProduct(cost).sum(), 0.0));
  r.method = W2Method::lp;
  r.plan = std::move(plan);
  return r;
}

double discrete_lipschitz(const WeightedGrid& grid, const GridFunction& psi) {
  if (psi.size() != grid.n) throw ShapeError("discrete_lipschitz: length");
  double lip = 0.0;
  const int last = grid.kind == GridKind::circle ? grid.n : grid.n - 1;
  for (int i = 0; i < last; ++i) {
    const int j = (i + 1) % grid.n;
    lip = std::max(lip, std::abs(psi[j] - psi[i]) / grid.dx);
  }
  return lip;
}

GridFunction hopf_lax(const WeightedGrid& grid, const GridFunction& psi,
                      double s) {
  if (!(s > 0.0)) throw Error("hopf_lax: s must be positive");
  if (psi.size() != grid.n) throw ShapeError("hopf_lax: length mismatch");
  GridFunction out(grid.n);
  const double inv2s = 1.0 / (2.0 * s);
  for (int i = 0; i < grid.n; ++i) {
    double best = psi[i];
    for (int j = 0; j < grid.n; ++j) {
      const double d = grid.distance(i, j);
      best = std::min(best, psi[j] + d * d * inv2s);
    }
    out[i] = best;
  }
  return out;
}

GridFunction hj_residual(const WeightedGrid& grid, const GridFunction& psi,
                         double s, double ds) {
  if (!(s > ds && ds > 0.0)) throw Error("hj_residual: need s > ds > 0");
  const GridFunction qm = hopf_lax(grid, psi, s - ds);
  const GridFunction q0 = hopf_lax(grid, psi, s);
  const GridFunction qp = hopf_lax(grid, psi, s + ds);
  GridFunction res(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    double dminus = 0.0, dplus = 0.0;
    if (grid.kind == GridKind::circle || i > 0)
      dminus = (q0[i] - q0[(i + grid.n - 1) % grid.n]) / grid.dx;
    if (grid.kind == GridKind::circle || i + 1 < grid.n)
      dplus = (q0[(i + 1) % grid.n] - q0[i]) / grid.dx;
    // Godunov flux for H(p) = p^2/2.
    const double slope = std::max(std::max(dminus, 0.0), std::max(-dplus, 0.0));
    res[i] = (qp[i] - qm[i]) / (2.0 * ds) + 0.5 * slope * slope;
  }
  return res;
}

double kantorovich_lower_bound(const WeightedGrid& grid, const GridDensity& f,
                               const GridDensity& g, const GridFunction& psi,
                               double s) {
  if (!(s > 0.0)) throw Error("kantorovich_lower_bound: s must be positive");
  require_grid(grid, f, "kantorovich_lower_bound");
  require_grid(grid, g, "kantorovich_lower_bound");
  const GridFunction qs = hopf_lax(grid, psi, s);
  return (integrate(grid, qs.cwiseProduct(f.values)) -
          integrate(grid, psi.cwiseProduct(g.values))) /
         s;
}

namespace detail {
double circle_best_shift(const WeightedGrid& grid, const GridDensity& f,
                         const GridDensity& g) {
  return minimize_circle_cost(atoms(grid, f), atoms(grid, g), grid.length())
      .alpha;
}
}  // namespace detail

GridDensity w2_geodesic(const WeightedGrid& grid, const GridDensity& f,
                        const GridDensity& g, double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw Error("w2_geodesic: s must lie in [0,1]");
  require_grid(grid, f, "w2_geodesic");
  require_grid(grid, g, "w2_geodesic");

  Eigen::VectorXd mass = Eigen::VectorXd::Zero(grid.n);
  const double ell = grid.length();

  auto deposit = [&](double y, double piece) {
    if (piece <= 0.0) return;
    if (grid.kind == GridKind::circle) {
      double t = (y - grid.a) / grid.dx;
      t -= std::floor(t / grid.n) * grid.n;
      int k0 = static_cast<int>(std::floor(t)) % grid.n;
      const double frac = t - std::floor(t);
      const int k1 = (k0 + 1) % grid.n;
      mass[k0] += (1.0 - frac) * piece;
      mass[k1] += frac * piece;
    } else {
      const double t = (y - grid.a) / grid.dx - 0.5;
      if (t <= 0.0) {
        mass[0] += piece;
      } else if (t >= grid.n - 1) {
        mass[grid.n - 1] += piece;
      } else {
        const int k0 = static_cast<int>(std::floor(t));
        const double frac = t - k0;
        mass[k0] += (1.0 - frac) * piece;
        mass[k0 + 1] += frac * piece;
      }
    }
  };

  const AtomView fa = atoms(grid, f), ga = atoms(grid, g);
  const int n = grid.n;
  if (grid.kind == GridKind::interval) {
    double u = 0.0;
    int i = 0, j = 0;
    while (u < 1.0 - kEps) {
      while (i < n - 1 && fa.cum[i] <= u + kEps) ++i;
      while (j < n - 1 && ga.cum[j] <= u + kEps) ++j;
      const double next = std::min(side_break(fa, i, u), side_break(ga, j, u));
      deposit((1.0 - s) * grid.nodes[i] + s * grid.nodes[j], next - u);
      u = std::max(next, u + kEps);
    }
  } else {
    const double alpha = detail::circle_best_shift(grid, f, g);
    double u = 0.0;
    int i = 0;
    while (u < 1.0 - kEps) {
      while (i < n - 1 && fa.cum[i] <= u + kEps) ++i;
      const double v = u + alpha;
      const double lift = std::floor(v);
      const CoverAtom ca = cover_atom(ga, v - lift);
      double next = std::min(side_break(fa, i, u), u + ca.room);
      next = std::min(next, 1.0);
      const double gpos = grid.nodes[ca.idx] + lift * ell;
      deposit((1.0 - s) * grid.nodes[i] + s * gpos, next - u);
      u = std::max(next, u + kEps);
    }
  }

  Eigen::VectorXd values = mass.cwiseQuotient(grid.weights);
  return normalize_density(grid, std::move(values));
}

}  // namespace cdlab
