#include "cdlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cdlab {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int simpson_intervals(double t, double du) {
  if (du <= 0.0) du = t / 64.0;
  int k = std::max(2, static_cast<int>(std::ceil(t / du)));
  if (k % 2) ++k;
  return k;
}

double curvature_ratio(const CurvatureParams& p) {
  return p.finite_dimension() ? p.R / p.m : 0.0;
}

double s_r_named(double r, double x, const char* where) {
  try {
    return s_r(r, x);
  } catch (const BranchError& e) {
    std::ostringstream os;
    os << where << ": distance " << 2.0 * x << " violates the s_r branch ("
       << e.what() << ")";
    throw BranchError(os.str());
  }
}

// Entropies of P_u f and P_u g on the Simpson mesh for [0, t].
struct EntropyPathPair {
  std::vector<double> u;
  std::vector<double> ef, eg;
  double step = 0.0;
};

EntropyPathPair entropy_paths(const SpectralDecomposition& spec,
                              const GridDensity& f, const GridDensity& g,
                              double t, double du) {
  EntropyPathPair p;
  const int k = simpson_intervals(t, du);
  p.step = t / k;
  p.u.resize(k + 1);
  p.ef.resize(k + 1);
  p.eg.resize(k + 1);
  for (int i = 0; i <= k; ++i) {
    p.u[i] = t * i / k;
    p.ef[i] = entropy(spec.grid, evolve_density(spec, f, p.u[i])).value;
    p.eg[i] = entropy(spec.grid, evolve_density(spec, g, p.u[i])).value;
  }
  return p;
}

double simpson_on_mesh(const EntropyPathPair& p,
                       const std::function<double(int)>& integrand) {
  const int k = static_cast<int>(p.u.size()) - 1;
  double acc = integrand(0) + integrand(k);
  for (int i = 1; i < k; ++i) acc += (i % 2 ? 4.0 : 2.0) * integrand(i);
  return acc * p.step / 3.0;
}

}  // namespace

double simpson(const std::function<double(double)>& h, double t, double du) {
  const int k = simpson_intervals(t, du);
  const double step = t / k;
  double acc = h(0.0) + h(t);
  for (int i = 1; i < k; ++i) acc += (i % 2 ? 4.0 : 2.0) * h(step * i);
  return acc * step / 3.0;
}

ContractionExperiment make_experiment(const WeightedGrid& grid,
                                      const GeneratorMatrix& gen,
                                      const SpectralDecomposition& spec,
                                      GridDensity f, GridDensity g,
                                      CurvatureParams params,
                                      std::vector<double> times, double du,
                                      TolerancePolicy tol) {
  if (!std::is_sorted(times.begin(), times.end()))
    throw Error("make_experiment: times must be sorted");
  if (!times.empty() && times.front() < 0.0)
    throw Error("make_experiment: negative time");
  if (du < 0.0) throw Error("make_experiment: negative quadrature step");
  ContractionExperiment e{grid, gen,   spec, std::move(f), std::move(g),
                          params, std::move(times), du, tol};
  return e;
}

std::vector<CheckReport> check_contraction_iii(
    const ContractionExperiment& e) {
  std::vector<CheckReport> out;
  const double W0 = w2(e.grid, e.f, e.g).distance;
  for (double t : e.times) {
    const double du = e.du > 0.0 ? e.du : t / 64.0;
    CheckReport r;
    if (t == 0.0) {
      r = make_check("contraction-iii", anchor::contraction_squared, W0 * W0,
                     W0 * W0, e.tol(e.grid.dx, 0.0), 0.0);
    } else {
      const GridDensity ft = evolve_density(e.spec, e.f, t);
      const GridDensity gt = evolve_density(e.spec, e.g, t);
      const double Wt = w2(e.grid, ft, gt).distance;
      const EntropyPathPair path = entropy_paths(e.spec, e.f, e.g, t, du);
      double dim_term = 0.0;
      if (e.params.finite_dimension()) {
        const double R = e.params.R;
        dim_term = (2.0 / e.params.m) *
                   simpson_on_mesh(path, [&](int i) {
                     const double d = path.ef[i] - path.eg[i];
                     return std::exp(-2.0 * R * (t - path.u[i])) * d * d;
                   });
      }
      const double rhs =
          std::exp(-2.0 * e.params.R * t) * W0 * W0 - dim_term;
      r = make_check("contraction-iii", anchor::contraction_squared, Wt * Wt,
                     rhs, e.tol(e.grid.dx, du), t);
      r.metadata["W0"] = fmt(W0);
      r.metadata["Wt"] = fmt(Wt);
    }
    r.metadata["n"] = std::to_string(e.grid.n);
    r.metadata["du"] = fmt(du);
    out.push_back(std::move(r));
  }
  return out;
}

CheckReport contraction_ii_single(const SpectralDecomposition& spec,
                                  const GridDensity& f, const GridDensity& g,
                                  double t, const CurvatureParams& params,
                                  double du, double tol) {
  const WeightedGrid& grid = spec.grid;
  const double r = curvature_ratio(params);
  const double W0 = w2(grid, f, g).distance;
  const double s0 = s_r_named(r, 0.5 * W0, "contraction-ii (t=0 term)");
  if (t == 0.0) {
    CheckReport c = make_check("contraction-ii", anchor::contraction_sfun,
                               s0 * s0, s0 * s0, tol, 0.0);
    c.metadata["W0"] = fmt(W0);
    return c;
  }
  const GridDensity ft = evolve_density(spec, f, t);
  const GridDensity gt = evolve_density(spec, g, t);
  const double Wt = w2(grid, ft, gt).distance;
  const double st = s_r_named(r, 0.5 * Wt, "contraction-ii (evolved term)");
  const double duu = du > 0.0 ? du : t / 64.0;

  double sinh_term = 0.0;
  if (params.finite_dimension()) {
    const EntropyPathPair path = entropy_paths(spec, f, g, t, duu);
    const double R = params.R, m = params.m;
    sinh_term = 2.0 * m *
                simpson_on_mesh(path, [&](int i) {
                  const double sh = std::sinh((path.ef[i] - path.eg[i]) /
                                              (2.0 * m));
                  return std::exp(-2.0 * R * (t - path.u[i])) * sh * sh;
                });
  }
  const double rhs = std::exp(-2.0 * params.R * t) * s0 * s0 - sinh_term;
  CheckReport c = make_check("contraction-ii", anchor::contraction_sfun,
                             st * st, rhs, tol, t);
  c.metadata["W0"] = fmt(W0);
  c.metadata["Wt"] = fmt(Wt);
  c.metadata["du"] = fmt(duu);
  return c;
}

std::vector<CheckReport> check_contraction_ii(const ContractionExperiment& e) {
  std::vector<CheckReport> out;
  for (double t : e.times) {
    const double du = e.du > 0.0 ? e.du : t / 64.0;
    CheckReport r = contraction_ii_single(e.spec, e.f, e.g, t, e.params, e.du,
                                          e.tol(e.grid.dx, du));
    r.metadata["n"] = std::to_string(e.grid.n);
    out.push_back(std::move(r));
  }
  return out;
}

CheckReport check_two_time_eks(const SpectralDecomposition& spec,
                               const GridDensity& f, const GridDensity& g,
                               double s, double t,
                               const CurvatureParams& params, double tol) {
  if (s < 0.0 || t < 0.0 || (s == 0.0 && t == 0.0))
    throw Error("check_two_time_eks: need s,t >= 0, not both zero");
  const WeightedGrid& grid = spec.grid;
  const double r = curvature_ratio(params);
  const double W0 = w2(grid, f, g).distance;
  const GridDensity ft = evolve_density(spec, f, t);
  const GridDensity gs = evolve_density(spec, g, s);
  const double Wst = w2(grid, ft, gs).distance;
  const double sl = s_r_named(r, 0.5 * Wst, "two-time (evolved term)");
  const double s0 = s_r_named(r, 0.5 * W0, "two-time (t=0 term)");

  double additive;
  const double m = params.m;
  if (!params.finite_dimension()) {
    additive = std::numeric_limits<double>::infinity();
  } else {
    const double shape =
        (std::sqrt(t) - std::sqrt(s)) * (std::sqrt(t) - std::sqrt(s)) /
        (2.0 * (t + s));
    if (std::abs(params.R) < 1e-12) {
      additive = m * (s + t) * shape;
    } else {
      additive =
          (m / params.R) * (1.0 - std::exp(-params.R * (s + t))) * shape;
    }
  }
  const double rhs = std::exp(-params.R * (t + s)) * s0 * s0 + additive;
  CheckReport c = make_check("two-time-eks", anchor::contraction_two_time,
                             sl * sl, rhs, tol, t);
  c.metadata["s"] = fmt(s);
  c.metadata["W0"] = fmt(W0);
  c.metadata["Wst"] = fmt(Wst);
  return c;
}

std::vector<CheckReport> check_evi(const ContractionExperiment& e,
                                   const GridDensity& probe, double h) {
  if (!(h > 0.0)) throw Error("check_evi: step must be positive");
  for (std::size_t i = 0; i < e.times.size(); ++i) {
    if (e.times[i] < h)
      throw Error("check_evi: step h exceeds the first evaluation time");
    if (i + 1 < e.times.size() && e.times[i + 1] - e.times[i] <= h)
      throw Error("check_evi: step h exceeds the gap between times");
  }
  const WeightedGrid& grid = e.grid;
  const double r = curvature_ratio(e.params);
  const double m = e.params.m;

  auto s_sq = [&](double t) {
    const GridDensity ft = evolve_density(e.spec, e.f, t);
    const double W = w2(grid, ft, probe).distance;
    const double sv = s_r_named(r, 0.5 * W, "evi");
    return sv * sv;
  };

  const double ent_probe = entropy(grid, probe).value;
  std::vector<CheckReport> out;
  for (double t : e.times) {
    const double sp = s_sq(t + h), sm = s_sq(t - h), s_mid = s_sq(t);
    const double deriv = (sp - sm) / (2.0 * h);
    const double ent_ft =
        entropy(grid, evolve_density(e.spec, e.f, t)).value;
    double rhs;
    if (e.params.finite_dimension()) {
      // (m/2)(1 - U_m(probe)/U_m(P_t f))
      rhs = 0.5 * m * (1.0 - std::exp((ent_ft - ent_probe) / m));
    } else {
      rhs = 0.5 * (ent_probe - ent_ft);
    }
    const double lhs = deriv + e.params.R * s_mid;
    CheckReport c = make_check("evi", anchor::evi, lhs, rhs,
                               e.tol(e.grid.dx, 0.0) + 10.0 * h, t);
    c.metadata["h"] = fmt(h);
    c.metadata["n"] = std::to_string(grid.n);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CheckReport> refinement_prop21(const ContractionExperiment& e,
                                           double t,
                                           const std::vector<int>& n_refine) {
  if (!(t > 0.0)) throw Error("refinement_prop21: need t > 0");
  for (int n : n_refine)
    if (n != 1 && n != 2 && n != 4 && n != 8)
      throw Error("refinement_prop21: refinement counts must be in {1,2,4,8}");
  const double du = e.du > 0.0 ? e.du : t / 64.0;
  const double seg_tol = e.tol(e.grid.dx, du);
  const double r = curvature_ratio(e.params);

  std::vector<CheckReport> out;
  std::vector<std::pair<int, double>> bounds;  // (n, B_n)
  for (int n : n_refine) {
    std::vector<GridDensity> y;
    y.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
      if (i == 0) y.push_back(e.f);
      else if (i == n) y.push_back(e.g);
      else y.push_back(w2_geodesic(e.grid, e.f, e.g,
                                   static_cast<double>(i) / n));
    }
    std::vector<GridDensity> z;
    z.reserve(n + 1);
    for (const GridDensity& yi : y) z.push_back(evolve_density(e.spec, yi, t));

    double sum_x = 0.0, sum_x2 = 0.0, bound = 0.0, worst_seg = 1e300;
    bool segments_ok = true;
    for (int i = 1; i <= n; ++i) {
      const double xi = w2(e.grid, z[i - 1], z[i]).distance;
      sum_x += xi;
      sum_x2 += xi * xi;
      CheckReport seg = contraction_ii_single(e.spec, y[i - 1], y[i], t,
                                              e.params, e.du, seg_tol);
      seg.name = "refinement-segment-n" + std::to_string(n) + "-i" +
                 std::to_string(i);
      seg.anchor = anchor::refinement_chain;
      worst_seg = std::min(worst_seg, seg.margin);
      segments_ok = segments_ok && seg.pass;
      bound += seg.rhs;
      out.push_back(std::move(seg));
      (void)s_r_named(r, 0.5 * xi, "refinement chain");
    }
    bound *= 4.0 * n;  // B_n = 4 n sum_i rhs_i
    const double d_direct = w2(e.grid, z[0], z[n]).distance;
    const double d2 = d_direct * d_direct;

    const bool triangle_ok = d2 <= sum_x * sum_x + 1e-8;
    const bool cauchy_ok = sum_x * sum_x <= n * sum_x2 + 1e-12;

    CheckReport chain = make_check(
        "refinement-chain-n" + std::to_string(n), anchor::refinement_chain, d2,
        bound, 4.0 * n * n * seg_tol, t);
    chain.pass = chain.pass && triangle_ok && cauchy_ok && segments_ok;
    chain.metadata["sum_x"] = fmt(sum_x);
    chain.metadata["n_sum_x2"] = fmt(n * sum_x2);
    chain.metadata["triangle"] = triangle_ok ? "ok" : "violated";
    chain.metadata["cauchy-schwarz"] = cauchy_ok ? "ok" : "violated";
    chain.metadata["worst_segment_margin"] = fmt(worst_seg);
    bounds.emplace_back(n, bound);
    out.push_back(std::move(chain));
  }

  if (bounds.size() >= 2) {
    const auto [n0, b0] = bounds.front();
    const auto [n1, b1] = bounds.back();
    CheckReport tighten =
        make_check("refinement-tightening", anchor::refinement_chain, b1, b0,
                   4.0 * n1 * seg_tol, t);
    tighten.metadata["n_first"] = std::to_string(n0);
    tighten.metadata["n_last"] = std::to_string(n1);
    out.push_back(std::move(tighten));
  }
  return out;
}

GeneratorMatrix tilted_generator(const GeneratorMatrix& gen,
                                 const GridFunction& g) {
  if (g.size() != gen.n()) throw ShapeError("tilted_generator: length");
  if (g.minCoeff() <= 0.0)
    throw PositivityError("tilted_generator: weight must be positive");
  const int n = gen.n();
  GeneratorMatrix t;
  t.grid = gen.grid;
  t.entries = Eigen::MatrixXd::Zero(n, n);
  const Eigen::VectorXd lg = g.array().log().matrix();
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double v = gen.entries(i, j) * (1.0 + 0.5 * (lg[j] - lg[i]));
      t.entries(i, j) = v;
      diag -= v;
    }
    t.entries(i, i) = diag;
  }
  return t;
}

CheckReport tilted_symmetry_report(const GeneratorMatrix& gen,
                                   const GridFunction& g, double tol) {
  const GeneratorMatrix t = tilted_generator(gen, g);
  const Eigen::VectorXd& w = gen.grid.weights;
  double res = 0.0;
  for (int i = 0; i < gen.n(); ++i)
    for (int j = 0; j < gen.n(); ++j)
      res = std::max(res, std::abs(g[i] * w[i] * t.entries(i, j) -
                                   g[j] * w[j] * t.entries(j, i)));
  CheckReport c =
      make_check("tilted-symmetry", anchor::tilted_symmetry, res, 0.0, tol);
  c.metadata["n"] = std::to_string(gen.n());
  return c;
}

GridDensity perturbed_density(const WeightedGrid& grid,
                              const GeneratorMatrix& gen, const GridDensity& g,
                              const GridFunction& f, double s) {
  if (s < 0.0) throw Error("perturbed_density: s must be nonnegative");
  const GeneratorMatrix lg = tilted_generator(gen, g.values);
  const GridFunction v = apply_L(lg, f);
  const double N = v.cwiseAbs().maxCoeff();
  if (s * N >= 1.0) {
    std::ostringstream os;
    os << "perturbed_density: s = " << s
       << " breaks positivity; require s < " << 1.0 / N;
    throw PositivityError(os.str());
  }
  Eigen::VectorXd values =
      g.values.cwiseProduct(Eigen::VectorXd::Ones(grid.n) - s * v);
  const double mass = values.dot(grid.weights);
  if (std::abs(mass - 1.0) > 1e-12) values /= mass;
  return make_density(grid, std::move(values));
}

namespace {

struct Extrapolated {
  double value = 0.0;
  bool conclusive = true;
  std::vector<double> raw;
  std::vector<double> extrapolants;
};

Extrapolated richardson(const std::vector<double>& s,
                        const std::vector<double>& v, double settle) {
  Extrapolated e;
  e.raw = v;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double ratio = s[k] / s[k + 1];
    if (!(ratio > 1.0))
      throw Error("richardson: s_list must decrease strictly");
    e.extrapolants.push_back((ratio * v[k + 1] - v[k]) / (ratio - 1.0));
  }
  if (e.extrapolants.empty()) {
    e.value = v.back();
    return e;
  }
  e.value = e.extrapolants.back();
  if (e.extrapolants.size() >= 2) {
    const double prev = e.extrapolants[e.extrapolants.size() - 2];
    e.conclusive = std::abs(e.value - prev) <= settle;
  }
  return e;
}

void stamp(CheckReport& c, const Extrapolated& e, double reference) {
  c.conclusive = e.conclusive;
  for (std::size_t i = 0; i < e.raw.size(); ++i)
    c.metadata["v" + std::to_string(i)] = fmt(e.raw[i]);
  for (std::size_t i = 0; i < e.extrapolants.size(); ++i)
    c.metadata["extrap" + std::to_string(i)] = fmt(e.extrapolants[i]);
  if (reference != 0.0)
    c.metadata["ratio"] = fmt(e.value / reference);
}

}  // namespace

ConverseEstimates converse_estimates(const WeightedGrid& grid,
                                     const GeneratorMatrix& gen,
                                     const SpectralDecomposition& spec,
                                     const GridDensity& g,
                                     const GridFunction& f, double t,
                                     const std::vector<double>& s_list,
                                     double tol, double u_sample) {
  if (s_list.size() < 2)
    throw Error("converse_estimates: need at least two s values");
  const double u = u_sample > 0.0 ? u_sample : 0.5 * t;
  const double settle = 10.0 * tol;

  const GridDensity gt = evolve_density(spec, g, t);
  const GridDensity gu = evolve_density(spec, g, u);
  const double ent_gu = entropy(grid, gu).value;

  std::vector<double> va, vb, vc;
  for (double s : s_list) {
    const GridDensity gs = perturbed_density(grid, gen, g, f, s);
    const GridDensity gst = evolve_density(spec, gs, t);
    const double wa = w2(grid, gst, gt).distance;
    va.push_back(wa * wa / (2.0 * s * s));
    const double wb = w2(grid, gs, g).distance;
    vb.push_back(wb * wb / (2.0 * s * s));
    const GridDensity gsu = evolve_density(spec, gs, u);
    vc.push_back((entropy(grid, gsu).value - ent_gu) / s);
  }

  const GridFunction gamma_f = gamma(gen, f);
  const GridFunction ptf = evolve(spec, f, t);
  const GridFunction pt_gamma_f = evolve(spec, gamma_f, t);
  const double rhs_a =
      -0.5 * integrate(grid, pt_gamma_f.cwiseProduct(g.values)) +
      integrate(grid, gamma(gen, f, ptf).cwiseProduct(g.values));
  const double rhs_b = 0.5 * integrate(grid, gamma_f.cwiseProduct(g.values));

  GridFunction log_pug(grid.n);
  for (int i = 0; i < grid.n; ++i)
    log_pug[i] = std::log(std::max(gu.values[i], 1e-300));
  const GridFunction pu_log = evolve(spec, log_pug, u);
  const double rhs_c =
      integrate(grid, gamma(gen, pu_log, f).cwiseProduct(g.values));

  ConverseEstimates ce;
  const Extrapolated ea = richardson(s_list, va, settle);
  ce.first = make_check("converse-first", anchor::converse_first, rhs_a,
                        ea.value, tol, t);
  stamp(ce.first, ea, rhs_a);

  const Extrapolated eb = richardson(s_list, vb, settle);
  ce.second = make_check("converse-second", anchor::converse_second, eb.value,
                         rhs_b, tol, t);
  stamp(ce.second, eb, rhs_b);

  const Extrapolated ec = richardson(s_list, vc, settle);
  ce.third = make_check("converse-third", anchor::converse_third,
                        std::abs(ec.value - rhs_c), 0.0, tol, u);
  ce.third.metadata["limit"] = fmt(ec.value);
  ce.third.metadata["closed_form"] = fmt(rhs_c);
  stamp(ce.third, ec, rhs_c);
  return ce;
}

EquivalenceResult equivalence_report(const WeightedGrid& grid,
                                     const GeneratorMatrix& gen,
                                     const SpectralDecomposition& spec,
                                     const CurvatureParams& params,
                                     const std::vector<GridDensity>& family,
                                     const std::vector<double>& times,
                                     double du, TolerancePolicy tol,
                                     FalsificationDeltas deltas, double evi_h) {
  if (family.empty()) throw Error("equivalence_report: empty density family");
  EquivalenceResult res;

  const std::vector<GridFunction> tf = default_test_family(grid);
  res.best_R = estimate_best_R(gen, params.m, tf);
  const double dR =
      deltas.dR >= 0.0 ? deltas.dR : 0.5 * std::abs(res.best_R) + 0.1;

  res.reports.push_back(check_pointwise_cd(gen, params, tf,
                                           tol(grid.dx, 0.0)));

  const GridDensity uniform = normalize_density(
      grid, Eigen::VectorXd::Ones(grid.n));

  auto run_family = [&](const CurvatureParams& p, bool with_evi,
                        std::vector<CheckReport>& sink) {
    for (std::size_t i = 0; i < family.size(); ++i) {
      for (std::size_t j = i + 1; j < family.size(); ++j) {
        ContractionExperiment e = make_experiment(
            grid, gen, spec, family[i], family[j], p, times, du, tol);
        auto tag = [&](std::vector<CheckReport> v) {
          for (CheckReport& c : v) {
            c.metadata["pair"] =
                std::to_string(i) + "-" + std::to_string(j);
            sink.push_back(std::move(c));
          }
        };
        tag(check_contraction_ii(e));
        tag(check_contraction_iii(e));
        if (times.size() >= 2) {
          CheckReport eks = check_two_time_eks(
              spec, family[i], family[j], times.front(), times.back(), p,
              tol(grid.dx, 0.0));
          eks.metadata["pair"] = std::to_string(i) + "-" + std::to_string(j);
          sink.push_back(std::move(eks));
        }
      }
      if (with_evi) {
        ContractionExperiment e = make_experiment(
            grid, gen, spec, family[i], uniform, p, times, du, tol);
        for (CheckReport& c : check_evi(e, uniform, evi_h)) {
          c.metadata["density"] = std::to_string(i);
          res.reports.push_back(std::move(c));
        }
      }
    }
  };

  run_family(params, true, res.reports);
  const bool forward_ok =
      std::all_of(res.reports.begin(), res.reports.end(),
                  [](const CheckReport& c) { return c.pass; });

  // Strengthened parameters: both must break the pointwise test, and at
  // least one contraction check must fail overall.
  const CurvatureParams strong_R{params.R + dR, params.m};
  bool pointwise_broken = true;
  {
    CheckReport c = check_pointwise_cd(gen, strong_R, tf, tol(grid.dx, 0.0));
    c.name = "falsify-pointwise-R";
    pointwise_broken = pointwise_broken && !c.pass;
    res.falsification.push_back(std::move(c));
  }
  std::vector<CheckReport> strong_runs;
  run_family(strong_R, false, strong_runs);
  bool contraction_broken = false;
  for (CheckReport& c : strong_runs) {
    c.name = "falsify-R-" + c.name;
    contraction_broken = contraction_broken || !c.pass;
    res.falsification.push_back(std::move(c));
  }
  if (params.finite_dimension()) {
    const CurvatureParams strong_m{params.R, params.m / deltas.kappa};
    CheckReport c = check_pointwise_cd(gen, strong_m, tf, tol(grid.dx, 0.0));
    c.name = "falsify-pointwise-m";
    pointwise_broken = pointwise_broken && !c.pass;
    res.falsification.push_back(std::move(c));
    strong_runs.clear();
    run_family(strong_m, false, strong_runs);
    for (CheckReport& c2 : strong_runs) {
      c2.name = "falsify-m-" + c2.name;
      contraction_broken = contraction_broken || !c2.pass;
      res.falsification.push_back(std::move(c2));
    }
  }

  const bool ok = forward_ok && pointwise_broken && contraction_broken;
  res.aggregate = make_check("equivalence", anchor::equivalence, ok ? 0.0 : 1.0,
                             0.0, 0.0);
  res.aggregate.metadata["best_R"] = fmt(res.best_R);
  res.aggregate.metadata["delta_R"] = fmt(dR);
  res.aggregate.metadata["kappa"] = fmt(deltas.kappa);
  res.aggregate.metadata["forward"] = forward_ok ? "pass" : "fail";
  res.aggregate.metadata["falsify_pointwise"] =
      pointwise_broken ? "broken" : "intact";
  res.aggregate.metadata["falsify_contraction"] =
      contraction_broken ? "broken" : "intact";
  return res;
}

}  // namespace cdlab
