#include "cdlab/functionals.hpp"

#include <cmath>
#include <sstream>

namespace cdlab {

double s_r(double r, double x) {
  if (x < 0.0) throw Error("s_r: negative argument");
  if (std::abs(r) < 1e-12) return x;
  if (r > 0.0) {
    const double sq = std::sqrt(r);
    if (sq * x >= std::acos(-1.0)) {
      std::ostringstream os;
      os << "s_r: sqrt(r) x = " << sq * x << " leaves the monotone branch";
      throw BranchError(os.str());
    }
    return std::sin(sq * x) / sq;
  }
  const double sq = std::sqrt(-r);
  return std::sinh(sq * x) / sq;
}

ScalarReport entropy(const WeightedGrid& grid, const GridDensity& f) {
  if (f.values.size() != grid.n) throw ShapeError("entropy: length mismatch");
  double acc = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double v = f.values[i];
    if (v > 0.0) acc += grid.weights[i] * v * std::log(v);
  }
  return ScalarReport::of(acc);
}

ScalarReport fisher(const GeneratorMatrix& gen, const GridDensity& f,
                    double floor) {
  if (!(floor > 0.0)) throw Error("fisher: floor must be positive");
  const GridFunction gf = gamma(gen, f.values);
  double acc = 0.0;
  for (int i = 0; i < gen.n(); ++i) {
    const double v = f.values[i];
    if (v < floor) {
      if (gf[i] > 1e-12) return ScalarReport::infinite();
      continue;
    }
    acc += gen.grid.weights[i] * gf[i] / v;
  }
  return ScalarReport::of(acc);
}

double u_m(const WeightedGrid& grid, const GridDensity& f, double m) {
  if (!(m > 0.0)) throw Error("u_m: m must be positive");
  const ScalarReport ent = entropy(grid, f);
  if (!ent.finite) return 0.0;
  if (!std::isfinite(m)) return 1.0;
  return std::exp(-ent.value / m);
}

}  // namespace cdlab
