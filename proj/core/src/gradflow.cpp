#include "cdlab/gradflow.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace cdlab::gradflow {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// phi(s) = F(x + s h) and centered first/second differences at s.
struct Directional {
  double phi, dphi, ddphi;
};

Directional directional(const PotentialSpec& pot, const Vec& x, const Vec& h,
                        double s, double h_fd) {
  const double p0 = pot.F(x + s * h);
  const double pp = pot.F(x + (s + h_fd) * h);
  const double pm = pot.F(x + (s - h_fd) * h);
  return {p0, (pp - pm) / (2.0 * h_fd), (pp - 2.0 * p0 + pm) / (h_fd * h_fd)};
}

}  // namespace

Vec PotentialSpec::grad(const Vec& x) const {
  if (gradF) return gradF(x);
  Vec g(x.size());
  Vec xp = x;
  for (int i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    xp[i] = xi + grad_step;
    const double fp = F(xp);
    xp[i] = xi - grad_step;
    const double fm = F(xp);
    xp[i] = xi;
    g[i] = (fp - fm) / (2.0 * grad_step);
  }
  return g;
}

PotentialSpec quadratic_potential(int dimension) {
  PotentialSpec p;
  p.dimension = dimension;
  p.F = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
  p.gradF = [](const Vec& x) { return x; };
  return p;
}

PotentialSpec double_well_potential() {
  PotentialSpec p;
  p.dimension = 1;
  p.F = [](const Vec& x) {
    const double u = x[0] * x[0] - 1.0;
    return 0.25 * u * u;
  };
  p.gradF = [](const Vec& x) {
    Vec g(1);
    g[0] = x[0] * (x[0] * x[0] - 1.0);
    return g;
  };
  return p;
}

void validate_gradient(const PotentialSpec& pot, const Vec& box_lo,
                       const Vec& box_hi, int samples, unsigned seed) {
  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    Vec x(pot.dimension);
    for (int i = 0; i < pot.dimension; ++i)
      x[i] = box_lo[i] + (box_hi[i] - box_lo[i]) * uniform01(rng);
    Vec fd(pot.dimension);
    Vec xp = x;
    for (int i = 0; i < pot.dimension; ++i) {
      const double xi = x[i];
      xp[i] = xi + pot.grad_step;
      const double fp = pot.F(xp);
      xp[i] = xi - pot.grad_step;
      const double fm = pot.F(xp);
      xp[i] = xi;
      fd[i] = (fp - fm) / (2.0 * pot.grad_step);
    }
    const double err = (pot.grad(x) - fd).norm();
    if (err > 10.0 * pot.grad_step) {
      std::ostringstream os;
      os << "validate_gradient: mismatch " << err << " at sample " << k;
      throw Error(os.str());
    }
  }
}

Trajectory flow_rk4(const PotentialSpec& pot, const Vec& x0, double T,
                    double dt, double bound) {
  if (!(dt > 0.0) || !(T >= dt))
    throw Error("flow_rk4: need dt > 0 and T >= dt");
  Trajectory tr;
  tr.dt = dt;
  const int steps = static_cast<int>(std::round(T / dt));
  tr.times.reserve(steps + 1);
  tr.states.reserve(steps + 1);
  Vec x = x0;
  tr.times.push_back(0.0);
  tr.states.push_back(x);
  for (int k = 1; k <= steps; ++k) {
    const Vec k1 = -pot.grad(x);
    const Vec k2 = -pot.grad(x + 0.5 * dt * k1);
    const Vec k3 = -pot.grad(x + 0.5 * dt * k2);
    const Vec k4 = -pot.grad(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (x.norm() > bound)
      throw Error("flow_rk4: trajectory diverged at t = " + fmt(k * dt));
    tr.times.push_back(k * dt);
    tr.states.push_back(x);
  }
  return tr;
}

CheckReport check_cd_convexity(const PotentialSpec& pot, double R, double m,
                               const Vec& box_lo, const Vec& box_hi,
                               int n_samples, double h_fd, unsigned seed) {
  if (!(h_fd > 0.0)) throw Error("check_cd_convexity: h must be positive");
  std::mt19937_64 rng(seed);
  const double inv_m = std::isfinite(m) ? 1.0 / m : 0.0;
  double worst = std::numeric_limits<double>::infinity();
  double worst_lhs = 0.0, worst_rhs = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    Vec x(pot.dimension), y(pot.dimension);
    for (int i = 0; i < pot.dimension; ++i) {
      x[i] = box_lo[i] + (box_hi[i] - box_lo[i]) * uniform01(rng);
      y[i] = box_lo[i] + (box_hi[i] - box_lo[i]) * uniform01(rng);
    }
    const Vec h = y - x;
    if (h.norm() < 1e-8) continue;
    const double s = uniform01(rng);
    const Directional d = directional(pot, x, h, s, h_fd);
    const double rhs = d.ddphi;
    const double lhs = R * h.squaredNorm() + inv_m * d.dphi * d.dphi;
    if (rhs - lhs < worst) {
      worst = rhs - lhs;
      worst_lhs = lhs;
      worst_rhs = rhs;
    }
  }
  // Second-order differences leave an O(h_fd^2 |F''''|) bias; the default
  // tolerance folds it in with a safety factor.
  CheckReport c = make_check("gradflow-convexity", anchor::gradflow_convexity,
                             worst_lhs, worst_rhs, 100.0 * h_fd);
  c.metadata["samples"] = std::to_string(n_samples);
  return c;
}

std::vector<CheckReport> check_flow_contraction(
    const PotentialSpec& pot, double R, double m, const Vec& x0, const Vec& y0,
    double T, double dt, double du, const std::vector<double>& times) {
  const Trajectory tx = flow_rk4(pot, x0, T, dt);
  const Trajectory ty = flow_rk4(pot, y0, T, dt);
  const double inv_m = std::isfinite(m) ? 1.0 / m : 0.0;
  const int steps = static_cast<int>(tx.times.size());

  auto state_at = [&](const Trajectory& tr, double t) -> const Vec& {
    int k = static_cast<int>(std::round(t / dt));
    k = std::min(std::max(k, 0), steps - 1);
    return tr.states[k];
  };

  std::vector<CheckReport> out;
  const double d0 = (x0 - y0).squaredNorm();
  for (double t : times) {
    if (t > T + 1e-12) throw Error("check_flow_contraction: time beyond T");
    const double dt2 = (state_at(tx, t) - state_at(ty, t)).squaredNorm();
    double dim_term = 0.0;
    if (inv_m > 0.0 && t > 0.0) {
      // Simpson nodes snap to the nearest trajectory step; the O(dt)
      // snapping error is covered by the reported tolerance.
      int k = std::max(2, static_cast<int>(std::ceil(t / std::max(du, dt))));
      if (k % 2) ++k;
      const double step = t / k;
      double acc = 0.0;
      for (int i = 0; i <= k; ++i) {
        const double u = step * i;
        const double df =
            pot.F(state_at(tx, u)) - pot.F(state_at(ty, u));
        const double wgt = (i == 0 || i == k) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += wgt * std::exp(-2.0 * R * (t - u)) * df * df;
      }
      dim_term = 2.0 * inv_m * acc * step / 3.0;
    }
    const double rhs = std::exp(-2.0 * R * t) * d0 - dim_term;
    CheckReport c = make_check("gradflow-contraction",
                               anchor::gradflow_contraction, dt2, rhs,
                               10.0 * dt + 5.0 * du, t);
    c.metadata["d0"] = fmt(d0);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CheckReport> check_converse_taylor(
    const PotentialSpec& pot, double R, double m, const Vec& x, const Vec& h,
    const std::vector<double>& eps_list, double h_fd, double tol) {
  if (eps_list.size() < 2)
    throw Error("check_converse_taylor: need at least two eps values");
  const double inv_m = std::isfinite(m) ? 1.0 / m : 0.0;

  std::vector<CheckReport> out;
  // (a) derivative-at-zero inequality for each finite separation, scaled by
  // 1/eps^2 so the margin is comparable to the convexity margin at (x, h).
  double worst = std::numeric_limits<double>::infinity();
  double worst_lhs = 0.0, worst_rhs = 0.0;
  std::vector<double> scaled;
  for (double eps : eps_list) {
    const Vec y = x + eps * h;
    const double e2 = eps * eps;
    const double lhs = (R * (x - y).squaredNorm() +
                        inv_m * (pot.F(x) - pot.F(y)) * (pot.F(x) - pot.F(y))) /
                       e2;
    const double rhs = (x - y).dot(pot.grad(x) - pot.grad(y)) / e2;
    if (rhs - lhs < worst) {
      worst = rhs - lhs;
      worst_lhs = lhs;
      worst_rhs = rhs;
    }
    scaled.push_back(rhs - lhs);
  }
  CheckReport deriv = make_check("gradflow-converse-derivative",
                                 anchor::gradflow_converse, worst_lhs,
                                 worst_rhs, tol);
  out.push_back(std::move(deriv));

  // (b) Richardson limit of the scaled margins against the closed-form
  // convexity margin at (x, h, s = 0).
  std::vector<double> extr;
  for (std::size_t k = 0; k + 1 < eps_list.size(); ++k) {
    const double r = eps_list[k] / eps_list[k + 1];
    if (!(r > 1.0))
      throw Error("check_converse_taylor: eps_list must decrease");
    extr.push_back((r * scaled[k + 1] - scaled[k]) / (r - 1.0));
  }
  const Directional d = directional(pot, x, h, 0.0, h_fd);
  const double margin10 =
      d.ddphi - R * h.squaredNorm() - inv_m * d.dphi * d.dphi;
  CheckReport lim = make_check("gradflow-converse-limit",
                               anchor::gradflow_converse,
                               std::abs(extr.back() - margin10), 0.0, tol);
  lim.metadata["limit"] = fmt(extr.back());
  lim.metadata["closed_form"] = fmt(margin10);
  if (extr.size() >= 2)
    lim.conclusive = std::abs(extr.back() - extr[extr.size() - 2]) <= 10 * tol;
  out.push_back(std::move(lim));
  return out;
}

}  // namespace cdlab::gradflow
