#pragma once

#include "cdlab/config.hpp"
#include "cdlab/funcineq.hpp"
#include "cdlab/gradflow.hpp"
#include "cdlab/harness.hpp"
#include "cdlab/report.hpp"

namespace cdlab {

struct Space {
  WeightedGrid grid;
  GeneratorMatrix gen;
  SpectralDecomposition spec;
};

Space realize_space(const SpaceSpec& s);
CurvatureParams realize_curvature(const CurvatureSpec& c);

/// Raw profile for a density spec (before normalization); `seed` feeds the
/// "random" preset.
GridFunction realize_profile(const WeightedGrid& grid, const DensitySpec& d,
                             unsigned long long seed);
GridDensity realize_density(const WeightedGrid& grid, const DensitySpec& d,
                            unsigned long long seed);

struct RunResult {
  int exit_code = 0;  // 0 pass, 1 failure, 2 inconclusive, 3 config error
  CsvSummary summary;
  std::vector<std::string> csv_files;
};

/// Executes every experiment in declaration order, writing one CSV per
/// experiment plus a summary file into the configured output directory.
/// Deterministic under a fixed seed.
RunResult run_config(const RunConfig& cfg);

}  // namespace cdlab
