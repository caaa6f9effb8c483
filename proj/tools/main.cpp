#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "cdlab/runner.hpp"

namespace {

using namespace cdlab;

struct SpaceFlags {
  std::string kind = "circle";
  int n = 128;
  std::vector<double> domain;
  std::string potential = "zero";
  double R = 0.0;
  std::string m = "1";
};

void add_space_flags(CLI::App* cmd, SpaceFlags& f) {
  cmd->add_option("--kind", f.kind, "circle or interval")
      ->check(CLI::IsMember({"circle", "interval"}));
  cmd->add_option("--n", f.n, "node count (>= 8)");
  cmd->add_option("--domain", f.domain, "domain endpoints a b")->expected(2);
  cmd->add_option("--potential", f.potential, "zero or quadratic");
  cmd->add_option("--R", f.R, "curvature lower bound");
  cmd->add_option("--m", f.m, "dimension upper bound (number or inf)");
}

SpaceSpec space_spec(const SpaceFlags& f) {
  SpaceSpec s;
  s.name = "space";
  s.kind = f.kind == "circle" ? GridKind::circle : GridKind::interval;
  s.n = f.n;
  if (f.domain.size() == 2) {
    s.a = f.domain[0];
    s.b = f.domain[1];
  } else if (s.kind == GridKind::circle) {
    s.a = 0.0;
    s.b = 2.0 * std::acos(-1.0);
  } else {
    s.a = -0.5;
    s.b = 0.5;
  }
  s.potential = f.potential;
  s.normalize = true;
  return s;
}

CurvatureSpec curvature_spec(const SpaceFlags& f) {
  CurvatureSpec c;
  c.name = "curv";
  c.R = f.R;
  c.m = (f.m == "inf") ? 0.0 : std::stod(f.m);
  return c;
}

DensitySpec density_spec(const std::string& name, const std::string& preset) {
  DensitySpec d;
  d.name = name;
  d.preset = preset;
  return d;
}

int execute(RunConfig cfg) {
  if (const char* env = std::getenv("CDLAB_OUTPUT_DIR")) cfg.output_dir = env;
  const RunResult res = run_config(cfg);
  std::cout << "checks: " << res.summary.total << " total, "
            << res.summary.passed << " passed, " << res.summary.failed
            << " failed, " << res.summary.inconclusive << " inconclusive\n";
  for (const std::string& f : res.csv_files)
    std::cout << "wrote " << f << "\n";
  return res.exit_code;
}

int cmd_report(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".csv")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  CsvSummary total;
  for (const std::string& f : files) {
    const CsvSummary s = read_csv_summary(f);
    std::cout << f << ": " << s.passed << "/" << s.total << " passed";
    if (s.inconclusive) std::cout << ", " << s.inconclusive << " inconclusive";
    std::cout << "\n";
    total.total += s.total;
    total.passed += s.passed;
    total.failed += s.failed;
    total.inconclusive += s.inconclusive;
  }
  std::cout << "total: " << total.passed << "/" << total.total << " passed, "
            << total.failed << " failed, " << total.inconclusive
            << " inconclusive\n";
  return total.failed ? 1 : (total.inconclusive ? 2 : 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cdlab: weighted-grid curvature-dimension and Wasserstein "
      "contraction checks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute a run-config file");
  std::string config_path;
  run->add_option("config", config_path, "path to the config file")
      ->required();

  auto* rep = app.add_subcommand("report", "summarize CSV reports");
  std::string report_dir;
  rep->add_option("dir", report_dir, "directory of CSV reports")->required();

  SpaceFlags cd_flags;
  auto* cd = app.add_subcommand("check-cd", "pointwise CD(R,m) test");
  add_space_flags(cd, cd_flags);

  SpaceFlags ct_flags;
  auto* ct = app.add_subcommand("contract", "contraction checks on a pair");
  add_space_flags(ct, ct_flags);
  std::string ct_form = "iii";
  std::string ct_f = "sin", ct_g = "cos";
  std::vector<double> ct_times{0.1, 0.5, 1.0};
  ct->add_option("--form", ct_form, "ii, iii or two-time")
      ->check(CLI::IsMember({"ii", "iii", "two-time"}));
  ct->add_option("--f", ct_f, "first density preset");
  ct->add_option("--g", ct_g, "second density preset");
  ct->add_option("--times", ct_times, "evaluation times");

  SpaceFlags evi_flags;
  auto* ev = app.add_subcommand("evi", "evolution variational inequality");
  add_space_flags(ev, evi_flags);
  std::string evi_f = "sin", evi_probe = "uniform";
  std::vector<double> evi_times{0.1, 0.5, 1.0};
  ev->add_option("--f", evi_f, "evolving density preset");
  ev->add_option("--probe", evi_probe, "fixed probe preset");
  ev->add_option("--times", evi_times, "evaluation times");

  auto* gf = app.add_subcommand("gradflow", "Euclidean gradient-flow sandbox");
  double gf_R = 0.5, gf_m = 2.0;
  std::string gf_pot = "quadratic";
  gf->add_option("--R", gf_R);
  gf->add_option("--m", gf_m);
  gf->add_option("--potential", gf_pot, "quadratic or double-well");

  SpaceFlags fi_flags;
  auto* fi = app.add_subcommand("func-ineq", "functional inequalities");
  add_space_flags(fi, fi_flags);
  std::string fi_which = "entropy-energy";
  std::string fi_f = "cos";
  std::vector<double> fi_times{0.1, 0.5, 1.0};
  fi->add_option("--which", fi_which,
                 "entropy-energy, log-sobolev, fisher-decay, entropy-creation, "
                 "de-bruijn, hwi or hwi-smoothing");
  fi->add_option("--f", fi_f, "density preset");
  fi->add_option("--times", fi_times, "evaluation times");

  std::string out_dir = "out";
  app.add_option("--out", out_dir, "output directory for CSV reports");
  unsigned long long seed = 42;
  app.add_option("--seed", seed, "seed for randomized presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      RunConfig cfg = parse_config(config_path);
      if (app.count("--out")) cfg.output_dir = out_dir;
      if (app.count("--seed")) cfg.seed = seed;
      return execute(std::move(cfg));
    }
    if (rep->parsed()) return cmd_report(report_dir);

    RunConfig cfg;
    cfg.output_dir = out_dir;
    cfg.seed = seed;
    auto presets = {"uniform", "sin", "cos", "gauss", "spike", "random"};
    for (const std::string p : presets)
      cfg.densities.push_back(density_spec(p, p));

    auto one = [&](const SpaceFlags& fl, ExperimentSpec e) {
      cfg.spaces.push_back(space_spec(fl));
      cfg.curvatures.push_back(curvature_spec(fl));
      e.space = "space";
      e.curvature = "curv";
      cfg.experiments.push_back(std::move(e));
    };

    if (cd->parsed()) {
      ExperimentSpec e;
      e.name = "check-cd";
      e.check = "pointwise-cd";
      one(cd_flags, std::move(e));
    } else if (ct->parsed()) {
      ExperimentSpec e;
      e.name = "contract";
      e.check = ct_form == "two-time" ? "two-time"
                                      : ("contraction-" + ct_form);
      e.densities = {ct_f, ct_g};
      e.times = ct_times;
      one(ct_flags, std::move(e));
    } else if (ev->parsed()) {
      ExperimentSpec e;
      e.name = "evi";
      e.check = "evi";
      e.densities = {evi_f, evi_probe};
      e.times = evi_times;
      one(evi_flags, std::move(e));
    } else if (gf->parsed()) {
      CurvatureSpec c;
      c.name = "curv";
      c.R = gf_R;
      c.m = gf_m;
      cfg.curvatures.push_back(c);
      ExperimentSpec e;
      e.name = "gradflow";
      e.check = "gradflow";
      e.curvature = "curv";
      e.extra["potential"] = gf_pot;
      cfg.experiments.push_back(std::move(e));
    } else if (fi->parsed()) {
      // Functional inequalities are gated on the equivalence suite for the
      // same space and curvature, so run that first.
      ExperimentSpec gate;
      gate.name = "gate";
      gate.check = "equivalence";
      gate.densities = {"uniform", "sin", "cos"};
      gate.times = {0.1, 0.5};
      one(fi_flags, std::move(gate));
      ExperimentSpec e;
      e.name = fi_which;
      e.check = fi_which;
      e.space = "space";
      e.curvature = "curv";
      e.densities = {fi_f};
      e.times = fi_times;
      cfg.experiments.push_back(std::move(e));
    }
    return execute(std::move(cfg));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
