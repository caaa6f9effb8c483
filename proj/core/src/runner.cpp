#include "cdlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

namespace cdlab {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double get_num(const std::map<std::string, std::string>& extra,
               const std::string& key, double fallback) {
  const auto it = extra.find(key);
  if (it == extra.end()) return fallback;
  return std::stod(it->second);
}

std::vector<double> get_list(const std::map<std::string, std::string>& extra,
                             const std::string& key,
                             std::vector<double> fallback) {
  const auto it = extra.find(key);
  if (it == extra.end()) return fallback;
  std::vector<double> out;
  std::istringstream is(it->second);
  double v;
  while (is >> v) out.push_back(v);
  return out;
}

std::string get_str(const std::map<std::string, std::string>& extra,
                    const std::string& key, const std::string& fallback) {
  const auto it = extra.find(key);
  return it == extra.end() ? fallback : it->second;
}

unsigned long long mix_seed(unsigned long long seed, const std::string& tag) {
  unsigned long long h = 1469598103934665603ULL ^ seed;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

void apply_tol_override(std::vector<CheckReport>& rows, double tol) {
  if (tol <= 0.0) return;
  for (CheckReport& r : rows) {
    r.tolerance = tol;
    r.pass = r.margin >= -tol;
  }
}

}  // namespace

Space realize_space(const SpaceSpec& s) {
  std::function<double(double)> V;
  if (s.potential == "zero") {
    V = [](double) { return 0.0; };
  } else if (s.potential == "quadratic") {
    V = [](double x) { return 0.5 * x * x; };
  } else if (s.potential == "poly") {
    const std::vector<double> c = s.poly;
    V = [c](double x) {
      double acc = 0.0, p = 1.0;
      for (double ck : c) {
        acc += ck * p;
        p *= x;
      }
      return acc;
    };
  } else {
    throw ConfigError("unknown potential preset '" + s.potential + "'");
  }
  Space sp;
  sp.grid = build_grid(s.kind, s.n, s.a, s.b, V, s.normalize);
  sp.gen = build_generator(sp.grid);
  sp.spec = spectral(sp.gen);
  return sp;
}

CurvatureParams realize_curvature(const CurvatureSpec& c) {
  CurvatureParams p;
  p.R = c.R;
  p.m = c.m > 0.0 ? c.m : std::numeric_limits<double>::infinity();
  return p;
}

GridFunction realize_profile(const WeightedGrid& grid, const DensitySpec& d,
                             unsigned long long seed) {
  const int n = grid.n;
  const double ell = grid.length();
  const double two_pi = 2.0 * std::acos(-1.0);
  auto param = [&](const std::string& k, double fb) {
    const auto it = d.params.find(k);
    return it == d.params.end() ? fb : it->second;
  };
  GridFunction v(n);
  if (d.preset == "uniform") {
    v.setOnes();
  } else if (d.preset == "sin" || d.preset == "cos") {
    const double amp = param("amplitude", 0.5);
    const double freq = param("frequency", 1.0);
    if (std::abs(amp) >= 1.0)
      throw Error("density '" + d.name + "': |amplitude| must be < 1");
    for (int i = 0; i < n; ++i) {
      const double th = two_pi * freq * (grid.nodes[i] - grid.a) / ell;
      v[i] = 1.0 + amp * (d.preset == "sin" ? std::sin(th) : std::cos(th));
    }
  } else if (d.preset == "gauss") {
    const double center = param("center", 0.5);
    const double width = param("width", 0.1);
    for (int i = 0; i < n; ++i) {
      double u = (grid.nodes[i] - grid.a) / ell - center;
      if (grid.kind == GridKind::circle) {
        u -= std::round(u);  // nearest periodic image
      }
      v[i] = std::exp(-0.5 * u * u / (width * width));
    }
  } else if (d.preset == "spike") {
    const double pos = grid.a + param("position", 0.5) * ell;
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (grid.distance_points(grid.nodes[i], pos) <
          grid.distance_points(grid.nodes[best], pos))
        best = i;
    v.setZero();
    v[best] = 1.0;
  } else if (d.preset == "random") {
    std::mt19937_64 rng(mix_seed(seed, d.name));
    for (int i = 0; i < n; ++i)
      v[i] = 0.5 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
  } else {
    throw Error("density '" + d.name + "': unknown preset '" + d.preset + "'");
  }
  return v;
}

GridDensity realize_density(const WeightedGrid& grid, const DensitySpec& d,
                            unsigned long long seed) {
  return normalize_density(grid, realize_profile(grid, d, seed));
}

namespace {

struct Runtime {
  const RunConfig& cfg;
  std::map<std::string, Space> spaces;
  std::map<std::string, bool> gate;  // space|curvature -> equivalence passed
  std::vector<std::pair<std::string, std::string>> calibration;

  const Space& space(const std::string& name) {
    auto it = spaces.find(name);
    if (it == spaces.end())
      it = spaces.emplace(name, realize_space(*cfg.find_space(name))).first;
    return it->second;
  }
};

std::vector<CheckReport> dispatch(Runtime& rt, const ExperimentSpec& e) {
  const RunConfig& cfg = rt.cfg;
  std::vector<CheckReport> rows;

  if (e.check == "gradflow") {
    const CurvatureParams p = realize_curvature(*cfg.find_curvature(e.curvature));
    gradflow::PotentialSpec pot =
        get_str(e.extra, "potential", "quadratic") == "double-well"
            ? gradflow::double_well_potential()
            : gradflow::quadratic_potential(
                  static_cast<int>(get_num(e.extra, "dimension", 1)));
    const std::vector<double> box = get_list(e.extra, "box", {-0.5, 0.5});
    gradflow::Vec lo = gradflow::Vec::Constant(pot.dimension, box[0]);
    gradflow::Vec hi = gradflow::Vec::Constant(pot.dimension, box[1]);
    gradflow::validate_gradient(pot, lo, hi, 32, 1234u);
    rows.push_back(gradflow::check_cd_convexity(
        pot, p.R, p.m, lo, hi,
        static_cast<int>(get_num(e.extra, "samples", 200)),
        get_num(e.extra, "h_fd", 1e-4),
        static_cast<unsigned>(mix_seed(cfg.seed, e.name))));
    gradflow::Vec x0 = gradflow::Vec::Constant(pot.dimension,
                                               get_num(e.extra, "x0", 0.3));
    gradflow::Vec y0 = gradflow::Vec::Constant(pot.dimension,
                                               get_num(e.extra, "y0", -0.2));
    const std::vector<double> times =
        e.times.empty() ? std::vector<double>{0.5, 1.0, 2.0} : e.times;
    const double T = get_num(e.extra, "T", times.back());
    for (CheckReport& c : gradflow::check_flow_contraction(
             pot, p.R, p.m, x0, y0, T, get_num(e.extra, "dt", 1e-3),
             get_num(e.extra, "du", 0.01), times))
      rows.push_back(std::move(c));
    gradflow::Vec x = gradflow::Vec::Constant(pot.dimension,
                                              get_num(e.extra, "x", 0.2));
    gradflow::Vec h = gradflow::Vec::Constant(pot.dimension,
                                              get_num(e.extra, "h", 0.3));
    for (CheckReport& c : gradflow::check_converse_taylor(
             pot, p.R, p.m, x, h, get_list(e.extra, "eps", {0.1, 0.05, 0.025}),
             get_num(e.extra, "h_fd", 1e-4), get_num(e.extra, "tau", 1e-4)))
      rows.push_back(std::move(c));
    apply_tol_override(rows, e.tol_override);
    return rows;
  }

  const Space& sp = rt.space(e.space);
  const WeightedGrid& grid = sp.grid;
  auto density = [&](int idx) {
    return realize_density(grid, *cfg.find_density(e.densities[idx]),
                           cfg.seed);
  };
  auto profile = [&](int idx) {
    return realize_profile(grid, *cfg.find_density(e.densities[idx]),
                           cfg.seed);
  };
  const double base_tol = e.tol_override > 0.0
                              ? e.tol_override
                              : cfg.tol(grid.dx, 0.0);

  if (e.check == "pointwise-cd") {
    const CurvatureParams p = realize_curvature(*cfg.find_curvature(e.curvature));
    rows.push_back(check_pointwise_cd(sp.gen, p, default_test_family(grid),
                                      base_tol));
  } else if (e.check == "weak-cd") {
    const CurvatureParams p = realize_curvature(*cfg.find_curvature(e.curvature));
    rows.push_back(check_weak_cd(sp.gen, p, profile(0), profile(1), base_tol));
  } else if (e.check == "contraction-ii" || e.check == "contraction-iii" ||
             e.check == "evi") {
    const CurvatureParams p = realize_curvature(*cfg.find_curvature(e.curvature));
    ContractionExperiment ex =
        make_experiment(grid, sp.gen, sp.spec, density(0), density(1), p,
                        e.times, e.du, cfg.tol);
    if (e.check == "contraction-ii") rows = check_contraction_ii(ex);
    else if (e.check == "contraction-iii") rows = check_contraction_iii(ex);
    else rows = check_evi(ex, density(1), get_num(e.extra, "h", 1e-3));
    apply_tol_override(rows, e.tol_override);
  } else if (e.check == "two-time") {
    const CurvatureParams p = realize_curvature(*cfg.find_curvature(e.curvature));
    rows.push_back(check_two_time_eks(sp.spec, density(0), density(1),
                                      get_num(e.extra, "s", 0.1),
                                      get_num(e.extra, "t", 0.4), p, base_tol));
  } else if (e.check == "equivalence") {
    const CurvatureSpec* cs = cfg.find_curvature(e.curvature);
    const CurvatureParams p = realize_curvature(*cs);
    std::vector<GridDensity> family;
    for (std::size_t i = 0; i < e.densities.size(); ++i)
      family.push_back(density(static_cast<int>(i)));
    FalsificationDeltas fd;
    fd.dR = cs->falsify_dR;
    fd.kappa = cs->falsify_kappa;
    EquivalenceResult res = equivalence_report(
        grid, sp.gen, sp.spec, p, family, e.times, e.du, cfg.tol, fd,
        get_num(e.extra, "h", 1e-3));
    rt.gate[e.space + "|" + e.curvature] = res.aggregate.pass;
    rt.calibration.emplace_back("best_R." + e.name, fmt(res.best_R));
    rows = std::move(res.reports);
    for (CheckReport& c : res.falsification) rows.push_back(std::move(c));
    rows.push_back(std::move(res.aggregate));
  } else if (e.check == "refinement") {
    const CurvatureParams p = realize_curvature(*cfg.find_curvature(e.curvature));
    ContractionExperiment ex =
        make_experiment(grid, sp.gen, sp.spec, density(0), density(1), p,
                        e.times, e.du, cfg.tol);
    std::vector<double> nr = get_list(e.extra, "n_refine", {1, 2, 4});
    std::vector<int> ns(nr.begin(), nr.end());
    rows = refinement_prop21(ex, get_num(e.extra, "t", 0.5), ns);
    apply_tol_override(rows, e.tol_override);
  } else if (e.check == "converse") {
    const double t = get_num(e.extra, "t", 0.3);
    const double tol =
        e.tol_override > 0.0 ? e.tol_override : 2.0 * cfg.tol(grid.dx, 0.0);
    const ConverseEstimates ce = converse_estimates(
        grid, sp.gen, sp.spec, density(0), profile(1), t,
        get_list(e.extra, "s_list", {0.02, 0.01, 0.005}), tol,
        get_num(e.extra, "u", -1.0));
    rows = {ce.first, ce.second, ce.third};
  } else if (e.check == "tilted-symmetry") {
    rows.push_back(
        tilted_symmetry_report(sp.gen, density(0).values, base_tol));
  } else if (e.check == "de-bruijn") {
    const double t = get_num(e.extra, "t", 0.5);
    const double du = e.du > 0.0 ? e.du : t / 64.0;
    rows.push_back(check_de_bruijn(grid, sp.gen, sp.spec, density(0), t, du,
                                   e.tol_override > 0.0
                                       ? e.tol_override
                                       : cfg.tol(grid.dx, du)));
  } else if (e.check == "metric-derivative") {
    rows.push_back(check_metric_derivative(
        grid, sp.gen, sp.spec, density(0), get_num(e.extra, "t", 0.3),
        get_list(e.extra, "deltas", {0.2, 0.1, 0.05}), base_tol));
  } else {
    // Functional inequalities, gated on a prior equivalence run.
    const CurvatureParams p = realize_curvature(*cfg.find_curvature(e.curvature));
    if (e.check == "entropy-energy") {
      rows.push_back(check_entropy_energy(grid, sp.gen, p, density(0),
                                          base_tol));
    } else if (e.check == "log-sobolev") {
      rows.push_back(check_log_sobolev(grid, sp.gen, p, density(0), base_tol));
    } else if (e.check == "fisher-decay") {
      rows = check_fisher_decay(grid, sp.gen, sp.spec, p, density(0), e.times,
                                base_tol, get_num(e.extra, "h", 1e-3));
    } else if (e.check == "entropy-creation") {
      rows = check_entropy_creation(grid, sp.spec, p, density(0), e.times,
                                    base_tol);
    } else if (e.check == "hwi") {
      rows.push_back(check_hwi(grid, sp.gen, p.m, density(0), base_tol));
    } else if (e.check == "hwi-smoothing") {
      double C = get_num(e.extra, "C", 0.0);
      if (C <= 0.0) {
        // One-time sweep on a fixed reference family.
        std::vector<GridDensity> sweep;
        for (const char* preset : {"gauss", "sin"}) {
          DensitySpec ds;
          ds.name = std::string("hwi-sweep-") + preset;
          ds.preset = preset;
          ds.params["width"] = 0.05;
          sweep.push_back(realize_density(grid, ds, cfg.seed));
        }
        C = calibrate_hwi_constant(grid, sp.spec, p.m, sweep,
                                   {0.01, 0.05, 0.1, 0.5, 1.0, 2.0});
        rt.calibration.emplace_back("hwi_C." + e.name, fmt(C));
      }
      rows = check_hwi_regularization(grid, sp.spec, p.m, density(0), e.times,
                                      base_tol, C);
    } else {
      throw ConfigError("unhandled check '" + e.check + "'");
    }
    const auto git = rt.gate.find(e.space + "|" + e.curvature);
    const bool gate_ok = git != rt.gate.end() && git->second;
    for (CheckReport& c : rows) {
      c.metadata["gate"] = gate_ok ? "pass" : "fail";
      if (!gate_ok) c.pass = false;
    }
  }
  return rows;
}

}  // namespace

RunResult run_config(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);

  Runtime rt{cfg, {}, {}, {}};
  RunResult res;
  bool any_fail = false, any_inconclusive = false;

  std::vector<CheckReport> all;
  if (cfg.experiments.empty()) {
    const std::string path =
        (fs::path(cfg.output_dir) / "00_checks.csv").string();
    write_csv(path, {});
    res.csv_files.push_back(path);
  }
  int idx = 0;
  for (const ExperimentSpec& e : cfg.experiments) {
    ++idx;
    std::vector<CheckReport> rows = dispatch(rt, e);
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%02d_", idx);
    const std::string path =
        (fs::path(cfg.output_dir) / (prefix + e.name + ".csv")).string();
    write_csv(path, rows);
    res.csv_files.push_back(path);

    bool fail_present = false, inconclusive_present = false;
    for (const CheckReport& r : rows) {
      if (!r.conclusive) inconclusive_present = true;
      else if (!r.pass) fail_present = true;
    }
    if (e.check == "equivalence") {
      // Falsification rows are meant to fail; the aggregate carries the
      // verdict.
      fail_present = !rows.back().pass;
    }
    if (e.expect_fail) {
      if (!fail_present) any_fail = true;
    } else if (fail_present) {
      any_fail = true;
    }
    if (inconclusive_present) any_inconclusive = true;
    for (CheckReport& r : rows) all.push_back(std::move(r));
  }

  res.summary = summarize(all);
  write_summary((fs::path(cfg.output_dir) / "summary.txt").string(),
                res.summary, rt.calibration);
  res.exit_code = any_fail ? 1 : (any_inconclusive ? 2 : 0);
  return res;
}

}  // namespace cdlab
