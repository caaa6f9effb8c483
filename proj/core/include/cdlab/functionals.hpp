#pragma once

#include "cdlab/grid.hpp"

namespace cdlab {

/// Scalar that may be +infinity (the entropy/Fisher convention for densities
/// outside the admissible class).
struct ScalarReport {
  double value = 0.0;
  bool finite = true;

  static ScalarReport of(double v) { return {v, true}; }
  static ScalarReport infinite() { return {0.0, false}; }
};

/// Distance-comparison kernel under curvature r:
///   sin(sqrt(r) x)/sqrt(r)   r > 0  (monotone branch sqrt(r) x < pi only),
///   x                        r = 0,
///   sinh(sqrt(-r) x)/sqrt(-r) r < 0.
/// |r| below 1e-12 uses the r = 0 branch for continuity.
double s_r(double r, double x);

// Ent(f) = int f log f dmu with the 0 log 0 = 0 convention.
ScalarReport entropy(const WeightedGrid& grid, const GridDensity& f);

// Fisher information I(f) = int Gamma(f)/f dmu.  Nodes where f < floor but
// Gamma(f) is not negligible make the result +infinity.
ScalarReport fisher(const GeneratorMatrix& gen, const GridDensity& f,
                    double floor = 1e-12);

// U_m(f) = exp(-Ent(f)/m); 1 at m = +infinity, 0 when the entropy is
// infinite.
double u_m(const WeightedGrid& grid, const GridDensity& f, double m);

}  // namespace cdlab
