#pragma once

#include <optional>
#include <vector>

#include "cdlab/grid.hpp"

namespace cdlab {

/// Coupling between two node-supported measures.  Row i sums to the first
/// density's mass at node i, column j to the second's.
struct TransportPlan {
  Eigen::MatrixXd coupling;
  double row_residual = 0.0;
  double col_residual = 0.0;
  double mass_residual = 0.0;
};

enum class W2Method { quantile, circle_offset, lp };

struct W2Result {
  double distance = 0.0;
  W2Method method = W2Method::quantile;
  std::optional<TransportPlan> plan;
};

/// Quadratic Wasserstein distance on an interval grid through the monotone
/// quantile coupling.  The integral of |F^{-1} - G^{-1}|^2 du is evaluated
/// on the merged breakpoint mesh of both cumulative distributions refined
/// by a uniform mesh of 10n points; the integrand is constant on every
/// piece, so the quadrature is exact and agrees with the LP optimum.
W2Result w2_quantile(const WeightedGrid& grid, const GridDensity& f,
                     const GridDensity& g);

/// Circle distance: the quantile cost with the second CDF shifted by a mass
/// offset, minimized over the offset (coarse scan of 64 offsets, then
/// golden-section refinement; the objective is convex in the shift).
W2Result w2_circle(const WeightedGrid& grid, const GridDensity& f,
                   const GridDensity& g);

/// Exact optimal coupling by a dense network simplex on the n x n squared
/// distance cost.  Cross-validation oracle; n <= 128.
W2Result w2_lp(const WeightedGrid& grid, const GridDensity& f,
               const GridDensity& g);

/// Distance by the method matching the grid kind.
W2Result w2(const WeightedGrid& grid, const GridDensity& f,
            const GridDensity& g);

/// Displacement interpolation at parameter s in [0,1]: the monotone pairing
/// is interpolated linearly in position and re-binned onto the grid by
/// mass-conservative two-node deposition.
GridDensity w2_geodesic(const WeightedGrid& grid, const GridDensity& f,
                        const GridDensity& g, double s);

/// Inf-convolution over the grid nodes:
///   (Q_s psi)(x_i) = min_j { psi_j + d(x_i,x_j)^2 / (2s) }.
GridFunction hopf_lax(const WeightedGrid& grid, const GridFunction& psi,
                      double s);

/// Pointwise residual of d/ds Q_s psi + |grad Q_s psi|^2 / 2 = 0, with a
/// centered difference in s and a Godunov upwind slope in x.
GridFunction hj_residual(const WeightedGrid& grid, const GridFunction& psi,
                         double s, double ds);

/// Dual value (1/s) ( int Q_s psi f dmu - int psi g dmu ); always a lower
/// bound for W2^2(f mu, g mu) / (2 s^2).
double kantorovich_lower_bound(const WeightedGrid& grid, const GridDensity& f,
                               const GridDensity& g, const GridFunction& psi,
                               double s);

/// Lipschitz seminorm over adjacent node pairs (equals the all-pairs
/// seminorm for the path metrics used here).
double discrete_lipschitz(const WeightedGrid& grid, const GridFunction& psi);

namespace detail {
// Best mass shift for the circle cost; exposed for the geodesic pairing.
double circle_best_shift(const WeightedGrid& grid, const GridDensity& f,
                         const GridDensity& g);

// Dense balanced transportation problem: minimize sum c(i,j) x(i,j) with
// row sums `supply` and column sums `demand`.  Returns the optimal plan.
Eigen::MatrixXd solve_transport(const Eigen::MatrixXd& cost,
                                const Eigen::VectorXd& supply,
                                const Eigen::VectorXd& demand);
}  // namespace detail

}  // namespace cdlab
