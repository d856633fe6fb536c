#pragma once

// Balanced transportation problem by the transportation simplex (MODI potentials, Bland's rule).

#include <algorithm>
#include <queue>
#include <vector>

#include "isozonoid/core.hpp"

namespace isozonoid::lp {

struct Flow {
  int source = 0;
  int target = 0;
  double amount = 0.0;
};

struct TransportSolution {
  std::vector<Flow> flows;  // basic cells with positive amount
  double cost = 0.0;
  int pivots = 0;
};

/**
 * @brief min sum c_ij x_ij s.t. row sums = supply, column sums = demand, x >= 0.
 *
 * Northwest-corner start, u_i + v_j = c_ij potentials on the basis tree, entering cell by
 * Bland's rule (first cell in row-major order with negative reduced cost), leaving cell the
 * lowest-index minimizer on the cycle.
 */
inline TransportSolution solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                                         const Mat& cost) {
  const int m = static_cast<int>(supply.size()), k = static_cast<int>(demand.size());
  require(m > 0 && k > 0 && cost.rows() == m && cost.cols() == k, ErrorCode::InvalidArgument,
          "transport shape mismatch");
  double ss = 0.0, sd = 0.0;
  for (double s : supply) ss += s;
  for (double d : demand) sd += d;
  require(std::abs(ss - sd) <= 1e-9 * std::max(1.0, ss), ErrorCode::MassMismatch, "supply and demand differ");

  // Basis cells as (i, j); flows indexed like the basis.
  std::vector<std::pair<int, int>> basis;
  std::vector<double> x;
  {
    std::vector<double> s = supply, d = demand;
    d.back() += ss - sd;
    int i = 0, j = 0;
    while (i < m && j < k) {
      const double q = std::min(s[i], d[j]);
      basis.emplace_back(i, j);
      x.push_back(std::max(0.0, q));
      s[i] -= q;
      d[j] -= q;
      if (i == m - 1 && j == k - 1) break;
      if ((s[i] <= d[j] && i < m - 1) || j == k - 1) ++i;
      else ++j;
    }
  }

  const double eps = 1e-12 * std::max(1.0, cost.cwiseAbs().maxCoeff());
  TransportSolution out;
  const int nodes = m + k;
  for (int iter = 0; iter < 100000; ++iter) {
    // Adjacency of the basis tree: rows 0..m-1, columns m..m+k-1.
    std::vector<std::vector<std::pair<int, int>>> adj(nodes);
    for (std::size_t b = 0; b < basis.size(); ++b) {
      adj[basis[b].first].emplace_back(m + basis[b].second, static_cast<int>(b));
      adj[m + basis[b].second].emplace_back(basis[b].first, static_cast<int>(b));
    }
    std::vector<double> pot(nodes, 0.0);
    std::vector<bool> seen(nodes, false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (const auto& [b, cell] : adj[a]) {
        if (seen[b]) continue;
        seen[b] = true;
        const double c = cost(basis[cell].first, basis[cell].second);
        pot[b] = c - pot[a];  // u_i + v_j = c_ij
        q.push(b);
      }
    }

    int ei = -1, ej = -1;
    for (int i = 0; i < m && ei < 0; ++i)
      for (int j = 0; j < k; ++j)
        if (cost(i, j) - pot[i] - pot[m + j] < -eps) {
          ei = i;
          ej = j;
          break;
        }
    if (ei < 0) break;

    // Tree path from column node ej to row node ei.
    std::vector<int> parent(nodes, -1), parent_cell(nodes, -1);
    std::vector<bool> vis(nodes, false);
    q.push(m + ej);
    vis[m + ej] = true;
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (const auto& [b, cell] : adj[a]) {
        if (vis[b]) continue;
        vis[b] = true;
        parent[b] = a;
        parent_cell[b] = cell;
        q.push(b);
      }
    }
    std::vector<int> path;  // cells from row ei back to column ej
    for (int a = ei; a != m + ej; a = parent[a]) path.push_back(parent_cell[a]);
    std::reverse(path.begin(), path.end());
    // Signs along the cycle: entering +, then alternating starting with - next to column ej.
    int leave = -1;
    double theta = kInf;
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const int cell = path[p];
      if (x[cell] < theta - 1e-15 || (std::abs(x[cell] - theta) <= 1e-15 && cell < leave)) {
        theta = x[cell];
        leave = cell;
      }
    }
    for (std::size_t p = 0; p < path.size(); ++p) x[path[p]] += (p % 2 == 0 ? -theta : theta);
    basis[leave] = {ei, ej};
    x[leave] = theta;
    ++out.pivots;
  }

  std::vector<double> parts;
  for (std::size_t b = 0; b < basis.size(); ++b) {
    if (x[b] <= 0) continue;
    out.flows.push_back({basis[b].first, basis[b].second, x[b]});
    parts.push_back(x[b] * cost(basis[b].first, basis[b].second));
  }
  out.cost = pairwise_sum(parts);
  return out;
}

}  // namespace isozonoid::lp
