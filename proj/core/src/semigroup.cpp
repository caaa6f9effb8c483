#include "cdlab/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace cdlab {

SpectralDecomposition spectral(const GeneratorMatrix& gen) {
  const int n = gen.n();
  SpectralDecomposition sd;
  sd.grid = gen.grid;
  sd.sqrt_w = gen.grid.weights.cwiseSqrt();

  Eigen::MatrixXd S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      S(i, j) = gen.entries(i, j) * sd.sqrt_w[i] / sd.sqrt_w[j];
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  // Scale-relative gate: entries grow like 1/dx^2.
  if (asym > 1e-9 * std::max(1.0, S.cwiseAbs().maxCoeff()))
    throw Error("spectral: generator is not reversible (residual " +
                std::to_string(asym) + ")");
  S = 0.5 * (S + S.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw Error("spectral: eigendecomposition failed");

  // Eigen sorts ascending; flip to descending so the zero mode comes first.
  sd.eigenvalues = es.eigenvalues().reverse();
  sd.vectors = es.eigenvectors().rowwise().reverse();

  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if (sd.eigenvalues[0] > 1e-10 * scale)
    throw Error("spectral: positive eigenvalue " +
                std::to_string(sd.eigenvalues[0]));
  // Pin the conservative mode exactly; it is known analytically.
  sd.eigenvalues[0] = 0.0;
  if (n > 1 && sd.eigenvalues[1] > -1e-10 * scale)
    throw Error("spectral: grid appears disconnected (repeated zero mode)");

  const Eigen::MatrixXd recon = sd.vectors *
                                sd.eigenvalues.asDiagonal() *
                                sd.vectors.transpose();
  if ((recon - S).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw Error("spectral: reconstruction residual above gate");
  return sd;
}

GridFunction evolve(const SpectralDecomposition& spec, const GridFunction& f,
                    double t) {
  if (f.size() != spec.n()) throw ShapeError("evolve: length mismatch");
  if (t < 0.0) throw Error("evolve: negative time");
  Eigen::VectorXd c = spec.vectors.transpose() *
                      (spec.sqrt_w.cwiseProduct(f));
  for (int k = 0; k < c.size(); ++k) c[k] *= std::exp(t * spec.eigenvalues[k]);
  return (spec.vectors * c).cwiseQuotient(spec.sqrt_w);
}

std::vector<GridFunction> evolve_path(const SpectralDecomposition& spec,
                                      const GridFunction& f,
                                      const std::vector<double>& times) {
  if (!std::is_sorted(times.begin(), times.end()))
    throw Error("evolve_path: times must be sorted");
  if (!times.empty() && times.front() < 0.0)
    throw Error("evolve_path: negative time");
  std::vector<GridFunction> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(evolve(spec, f, t));
  return out;
}

GridDensity evolve_density(const SpectralDecomposition& spec,
                           const GridDensity& f, double t) {
  GridFunction v = evolve(spec, f.values, t);
  // Clamp the roundoff-level negatives the spectral form can leave behind.
  for (int i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0) {
      if (v[i] < -1e-9)
        throw PositivityError("evolve_density: negativity beyond roundoff");
      v[i] = 0.0;
    }
  }
  return normalize_density(spec.grid, std::move(v));
}

}  // namespace cdlab
