#pragma once

#include <vector>

#include "cdlab/grid.hpp"

namespace cdlab {

/// Eigendecomposition of the generator in the measure-weighted inner
/// product.  The similarity D^{1/2} L D^{-1/2} with D = diag(w) is
/// symmetric by reversibility, so the heat semigroup can be applied
/// exactly (up to roundoff) as Q exp(t Lambda) Q^T in that frame.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;  // sorted descending, eigenvalues[0] ~ 0
  Eigen::MatrixXd vectors;      // orthonormal columns in the symmetric frame
  Eigen::VectorXd sqrt_w;
  WeightedGrid grid;

  int n() const { return grid.n; }
  double spectral_gap() const { return -eigenvalues[1]; }
};

SpectralDecomposition spectral(const GeneratorMatrix& gen);

// P_t f.  Mass, positivity (up to roundoff) and the semigroup law are exact
// consequences of the spectral form.
GridFunction evolve(const SpectralDecomposition& spec, const GridFunction& f,
                    double t);

std::vector<GridFunction> evolve_path(const SpectralDecomposition& spec,
                                      const GridFunction& f,
                                      const std::vector<double>& times);

GridDensity evolve_density(const SpectralDecomposition& spec,
                           const GridDensity& f, double t);

}  // namespace cdlab
