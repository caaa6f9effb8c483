#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdlab/check.hpp"
#include "cdlab/grid.hpp"

namespace cdlab {

struct SpaceSpec {
  std::string name;
  GridKind kind = GridKind::circle;
  int n = 0;
  double a = 0.0, b = 0.0;
  std::string potential = "zero";  // zero | quadratic | poly
  std::vector<double> poly;        // coefficients c0 + c1 x + ...
  bool normalize = true;
};

struct CurvatureSpec {
  std::string name;
  double R = 0.0;
  double m = 0.0;  // <= 0 encodes +infinity
  double falsify_dR = -1.0;  // < 0: use 0.5 |R*| + 0.1
  double falsify_kappa = 10.0;
};

struct DensitySpec {
  std::string name;
  std::string preset = "uniform";
  std::map<std::string, double> params;
};

struct ExperimentSpec {
  std::string name;
  std::string check;
  std::string space;
  std::string curvature;
  std::vector<std::string> densities;  // family or {f} / {f, g}
  std::vector<double> times;
  double du = 0.0;          // 0: per-time default t/64
  double tol_override = -1.0;
  bool expect_fail = false;
  std::map<std::string, std::string> extra;
};

struct RunConfig {
  std::vector<SpaceSpec> spaces;
  std::vector<CurvatureSpec> curvatures;
  std::vector<DensitySpec> densities;
  std::vector<ExperimentSpec> experiments;
  TolerancePolicy tol;
  std::string output_dir = "out";
  unsigned long long seed = 0;

  const SpaceSpec* find_space(const std::string& n) const;
  const CurvatureSpec* find_curvature(const std::string& n) const;
  const DensitySpec* find_density(const std::string& n) const;
};

/// Parses the sectioned key = value run configuration.  All validation
/// errors are collected and reported together in the thrown ConfigError.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text,
                            const std::string& origin = "<string>");

const std::vector<std::string>& known_check_names();

}  // namespace cdlab
