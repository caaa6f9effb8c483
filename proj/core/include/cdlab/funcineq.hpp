#pragma once

#include <vector>

#include "cdlab/functionals.hpp"
#include "cdlab/grid.hpp"
#include "cdlab/semigroup.hpp"

namespace cdlab {

/// Entropy-energy bound Ent(f) <= (m/2) log(1 + I(f)/(m R)), R > 0.
CheckReport check_entropy_energy(const WeightedGrid& grid,
                                 const GeneratorMatrix& gen,
                                 const CurvatureParams& params,
                                 const GridDensity& f, double tol);

/// The weaker log-Sobolev form Ent(f) <= I(f)/(2R); always implied by the
/// entropy-energy bound through log(1+x) <= x.
CheckReport check_log_sobolev(const WeightedGrid& grid,
                              const GeneratorMatrix& gen,
                              const CurvatureParams& params,
                              const GridDensity& f, double tol);

/// Fisher information decay along the flow: the closed-form bound
///   I(P_t f) <= m R I(f) / (e^{2Rt}(I(f) + mR) - I(f))
/// at each time (R > 0), plus the differential form
///   dI/dt <= -2R I - (2/m) I^2
/// by central differences at the interior times (any R).
std::vector<CheckReport> check_fisher_decay(const WeightedGrid& grid,
                                            const GeneratorMatrix& gen,
                                            const SpectralDecomposition& spec,
                                            const CurvatureParams& params,
                                            const GridDensity& f,
                                            const std::vector<double>& times,
                                            double tol, double h = 1e-3);

/// Instantaneous entropy creation: Ent(P_t f) <= (m/2) log(1/(1 - e^{-2Rt})).
std::vector<CheckReport> check_entropy_creation(
    const WeightedGrid& grid, const SpectralDecomposition& spec,
    const CurvatureParams& params, const GridDensity& f,
    const std::vector<double>& times, double tol);

/// de Bruijn residual |Ent(f) - Ent(P_t f) - int_0^t I(P_s f) ds| with
/// Simpson quadrature at step du.
CheckReport check_de_bruijn(const WeightedGrid& grid,
                            const GeneratorMatrix& gen,
                            const SpectralDecomposition& spec,
                            const GridDensity& f, double t, double du,
                            double tol);

/// Dimensional HWI-type bound at zero curvature on the circle:
///   sinh^2(Ent(f)/(2m)) <= W2(f mu, mu) sqrt(I(f)) / (4m).
CheckReport check_hwi(const WeightedGrid& grid, const GeneratorMatrix& gen,
                      double m, const GridDensity& f, double tol);

/// Smoothing consequence Ent(P_t f) <= (m/2) max{C, log(W2^2(f mu, mu)/(m t))}
/// with a calibrated constant C (reported in the metadata).
std::vector<CheckReport> check_hwi_regularization(
    const WeightedGrid& grid, const SpectralDecomposition& spec, double m,
    const GridDensity& f, const std::vector<double>& times, double tol,
    double C = 0.0);

/// One-time sweep producing the default HWI smoothing constant: the largest
/// plateau level 2 Ent(P_t f)/m observed where the log branch is inactive,
/// padded by `slack`.
double calibrate_hwi_constant(const WeightedGrid& grid,
                              const SpectralDecomposition& spec, double m,
                              const std::vector<GridDensity>& family,
                              const std::vector<double>& times,
                              double slack = 0.25);

/// Two-sided finite-difference probe of the metric-derivative identity
///   W2^2(P_{t+delta} f, P_t f)/delta^2 -> I(P_t f),
/// Richardson-extrapolated over delta_list; non-settling extrapolation
/// clears `conclusive`.
CheckReport check_metric_derivative(const WeightedGrid& grid,
                                    const GeneratorMatrix& gen,
                                    const SpectralDecomposition& spec,
                                    const GridDensity& f, double t,
                                    const std::vector<double>& delta_list,
                                    double tol);

}  // namespace cdlab
