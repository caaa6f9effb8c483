#include "cdlab/transport.hpp"

#include <cmath>
#include <vector>

namespace cdlab::detail {

// Transportation simplex on the dense bipartite graph.  The basis is kept
// as a spanning tree over m + n nodes (sources first).  Entering arcs by
// Dantzig's rule with a Bland fallback after a pivot budget; leaving arc is
// the lexicographically smallest minimizer, which keeps ties deterministic.
Eigen::MatrixXd solve_transport(const Eigen::MatrixXd& cost,
                                const Eigen::VectorXd& supply,
                                const Eigen::VectorXd& demand) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  if (cost.rows() != m || cost.cols() != n)
    throw ShapeError("solve_transport: cost shape mismatch");
  const double total = supply.sum();
  if (std::abs(total - demand.sum()) > 1e-9 * std::max(1.0, total))
    throw Error("solve_transport: supplies and demands are unbalanced");

  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(m, n);
  std::vector<std::vector<int>> adj(m + n);  // tree adjacency, node ids
  Eigen::MatrixXi basic = Eigen::MatrixXi::Zero(m, n);

  auto link = [&](int i, int j) {
    basic(i, j) = 1;
    adj[i].push_back(m + j);
    adj[m + j].push_back(i);
  };
  auto unlink = [&](int i, int j) {
    basic(i, j) = 0;
    auto drop = [](std::vector<int>& v, int x) {
      for (std::size_t k = 0; k < v.size(); ++k)
        if (v[k] == x) {
          v[k] = v.back();
          v.pop_back();
          return;
        }
    };
    drop(adj[i], m + j);
    drop(adj[m + j], i);
  };

  // Northwest-corner start: exactly m + n - 1 basic cells.
  {
    Eigen::VectorXd pr = supply, qr = demand;
    int i = 0, j = 0;
    while (true) {
      const double t = std::min(pr[i], qr[j]);
      flow(i, j) = t;
      link(i, j);
      pr[i] -= t;
      qr[j] -= t;
      if (i == m - 1 && j == n - 1) break;
      if (j == n - 1) ++i;
      else if (i == m - 1) ++j;
      else if (pr[i] <= qr[j]) ++i;
      else ++j;
    }
  }

  std::vector<double> u(m + n);
  std::vector<int> parent(m + n), order(m + n);
  auto recompute_duals = [&]() {
    // DFS from source 0 over the tree; u holds the source potentials and,
    // offset by m, the sink potentials with u_i + v_j = c_ij on the basis.
    std::vector<int> stack{0};
    std::vector<char> seen(m + n, 0);
    u[0] = 0.0;
    seen[0] = 1;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b : adj[a]) {
        if (seen[b]) continue;
        seen[b] = 1;
        const double c =
            (a < m) ? cost(a, b - m) : cost(b, a - m);
        u[b] = c - u[a];
        stack.push_back(b);
      }
    }
  };

  const double cost_scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double opt_tol = 1e-12 * cost_scale;
  const long bland_after = 64L * (m + n);
  const long max_pivots = 4096L * (m + n);

  for (long pivot = 0;; ++pivot) {
    if (pivot > max_pivots)
      throw Error("solve_transport: pivot budget exhausted");
    recompute_duals();

    int ei = -1, ej = -1;
    if (pivot < bland_after) {
      double best = -opt_tol;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
          if (basic(i, j)) continue;
          const double rc = cost(i, j) - u[i] - u[m + j];
          if (rc < best) {
            best = rc;
            ei = i;
            ej = j;
          }
        }
    } else {
      for (int i = 0; i < m && ei < 0; ++i)
        for (int j = 0; j < n; ++j) {
          if (basic(i, j)) continue;
          if (cost(i, j) - u[i] - u[m + j] < -opt_tol) {
            ei = i;
            ej = j;
            break;
          }
        }
    }
    if (ei < 0) break;  // optimal

    // Tree path from source ei to sink m+ej; the entering arc closes the
    // unique cycle.
    {
      std::vector<int> stack{ei};
      std::vector<char> seen(m + n, 0);
      seen[ei] = 1;
      parent[ei] = -1;
      while (!stack.empty()) {
        const int a = stack.back();
        stack.pop_back();
        for (int b : adj[a]) {
          if (seen[b]) continue;
          seen[b] = 1;
          parent[b] = a;
          stack.push_back(b);
        }
      }
    }

    // Walk the path back from m+ej to ei.  Arcs at odd positions from the
    // entering end lose flow; theta is the smallest such flow and the
    // leaving arc the lexicographically smallest minimizer.
    double theta = std::numeric_limits<double>::infinity();
    {
      int b = m + ej;
      int sign = -1;
      while (parent[b] >= 0) {
        const int a = parent[b];
        const int ci = (a < m) ? a : b;
        const int cj = (a < m) ? b - m : a - m;
        if (sign < 0) theta = std::min(theta, flow(ci, cj));
        b = a;
        sign = -sign;
      }
    }
    int li = -1, lj = -1;
    {
      int b = m + ej;
      int sign = -1;
      while (parent[b] >= 0) {
        const int a = parent[b];
        const int ci = (a < m) ? a : b;
        const int cj = (a < m) ? b - m : a - m;
        if (sign < 0 && flow(ci, cj) <= theta + 1e-15) {
          if (li < 0 || ci < li || (ci == li && cj < lj)) {
            li = ci;
            lj = cj;
          }
        }
        b = a;
        sign = -sign;
      }
    }
    if (li < 0) throw Error("solve_transport: degenerate cycle search");

    // Apply the flow change around the cycle.
    flow(ei, ej) += theta;
    {
      int b = m + ej;
      int sign = -1;
      while (parent[b] >= 0) {
        const int a = parent[b];
        const int ci = (a < m) ? a : b;
        const int cj = (a < m) ? b - m : a - m;
        flow(ci, cj) += sign * theta;
        b = a;
        sign = -sign;
      }
    }
    unlink(li, lj);
    link(ei, ej);
    flow(li, lj) = 0.0;
  }

  // Clear subtraction dust.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (flow(i, j) < 0.0) flow(i, j) = 0.0;
  return flow;
}

}  // namespace cdlab::detail
