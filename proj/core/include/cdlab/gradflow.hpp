#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cdlab/check.hpp"

namespace cdlab::gradflow {

using Vec = Eigen::VectorXd;

/// Smooth potential on R^d with its gradient (analytic, or central
/// differences with step grad_step when no gradient is supplied).
struct PotentialSpec {
  int dimension = 1;
  std::function<double(const Vec&)> F;
  std::function<Vec(const Vec&)> gradF;  // may be empty
  double grad_step = 1e-6;

  Vec grad(const Vec& x) const;
};

PotentialSpec quadratic_potential(int dimension);   // |x|^2 / 2
PotentialSpec double_well_potential();              // (x^2 - 1)^2 / 4, d = 1

/// Verifies |gradF - FD(F)| <= 10 * grad_step on sampled points of the box.
void validate_gradient(const PotentialSpec& pot, const Vec& box_lo,
                       const Vec& box_hi, int samples, unsigned seed);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  double dt = 0.0;
  std::string scheme = "rk4";
};

/// Classical RK4 integration of dX/dt = -grad F.  Diverging trajectories
/// (|X| beyond `bound`) raise an error.
Trajectory flow_rk4(const PotentialSpec& pot, const Vec& x0, double T,
                    double dt, double bound = 1e6);

/// Directional convexity test phi''(s) >= R |h|^2 + phi'(s)^2 / m with
/// phi(s) = F(x + s h), sampled over segments [x, x+h] inside the box.
CheckReport check_cd_convexity(const PotentialSpec& pot, double R, double m,
                               const Vec& box_lo, const Vec& box_hi,
                               int n_samples, double h_fd, unsigned seed);

/// Squared-distance contraction with the subtracted potential-difference
/// term along two flows, one report per requested time.
std::vector<CheckReport> check_flow_contraction(const PotentialSpec& pot,
                                                double R, double m,
                                                const Vec& x0, const Vec& y0,
                                                double T, double dt, double du,
                                                const std::vector<double>& times);

/// Converse direction at a point: (a) the derivative-at-zero inequality for
/// endpoints x and x + eps h, and (b) its eps -> 0 Richardson limit against
/// the closed-form convexity margin at (x, h).
std::vector<CheckReport> check_converse_taylor(const PotentialSpec& pot,
                                               double R, double m, const Vec& x,
                                               const Vec& h,
                                               const std::vector<double>& eps_list,
                                               double h_fd, double tol);

}  // namespace cdlab::gradflow
