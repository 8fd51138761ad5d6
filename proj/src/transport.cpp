#include "transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace wdro {

namespace {

// Basis tree over n row nodes and m column nodes; basic cells are tree edges.
struct Basis {
  int n = 0, m = 0;
  std::vector<double> flow;    // per basic cell
  std::vector<int> cell_row, cell_col;
  std::vector<std::vector<int>> row_cells, col_cells;  // incident basic cells

  int node_count() const { return n + m; }

  int add_cell(int i, int j, double f) {
    const int id = static_cast<int>(flow.size());
    flow.push_back(f);
    cell_row.push_back(i);
    cell_col.push_back(j);
    row_cells[i].push_back(id);
    col_cells[j].push_back(id);
    return id;
  }

  void remove_cell(int id) {
    auto drop = [](std::vector<int>& v, int x) { v.erase(std::find(v.begin(), v.end(), x)); };
    drop(row_cells[cell_row[id]], id);
    drop(col_cells[cell_col[id]], id);
    cell_row[id] = cell_col[id] = -1;
  }
};

// Flows on the basis tree are uniquely determined by the marginals: peel
// leaves. Returns false if the basis is not a spanning tree.
bool recompute_flows(Basis& b, const std::vector<double>& supply,
                     const std::vector<double>& demand) {
  const int n = b.n, m = b.m;
  std::vector<double> resid(n + m);
  for (int i = 0; i < n; ++i) resid[i] = supply[i];
  for (int j = 0; j < m; ++j) resid[n + j] = demand[j];

  std::vector<int> degree(n + m, 0);
  std::vector<std::vector<int>> inc(n + m);
  for (std::size_t id = 0; id < b.flow.size(); ++id) {
    if (b.cell_row[id] < 0) continue;
    inc[b.cell_row[id]].push_back(static_cast<int>(id));
    inc[n + b.cell_col[id]].push_back(static_cast<int>(id));
  }
  for (int v = 0; v < n + m; ++v) degree[v] = static_cast<int>(inc[v].size());

  std::vector<bool> cell_done(b.flow.size(), false);
  std::vector<int> stack;
  for (int v = 0; v < n + m; ++v)
    if (degree[v] == 1) stack.push_back(v);

  int processed = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (degree[v] != 1) continue;
    int live = -1;
    for (int id : inc[v])
      if (!cell_done[id] && b.cell_row[id] >= 0) live = id;
    if (live < 0) continue;
    const int i = b.cell_row[live], j = b.cell_col[live];
    const int other = (v < n) ? n + j : i;
    b.flow[live] = resid[v];
    resid[other] -= resid[v];
    resid[v] = 0.0;
    cell_done[live] = true;
    --degree[v];
    --degree[other];
    ++processed;
    if (degree[other] == 1) stack.push_back(other);
  }
  int live_cells = 0;
  for (std::size_t id = 0; id < b.flow.size(); ++id)
    if (b.cell_row[id] >= 0) ++live_cells;
  return processed == live_cells;
}

// Potentials u_i + v_j = c_ij on basic cells, via BFS over the tree.
void compute_potentials(const Basis& b, const std::vector<double>& cost, int m,
                        std::vector<double>& u, std::vector<double>& v) {
  const int n = b.n;
  u.assign(n, 0.0);
  v.assign(b.m, 0.0);
  std::vector<bool> row_done(n, false), col_done(b.m, false);
  std::vector<int> queue;
  row_done[0] = true;
  queue.push_back(0);  // row node 0, u=0
  while (!queue.empty()) {
    const int node = queue.back();
    queue.pop_back();
    if (node < n) {
      for (int id : b.row_cells[node]) {
        const int j = b.cell_col[id];
        if (!col_done[j]) {
          v[j] = cost[node * m + j] - u[node];
          col_done[j] = true;
          queue.push_back(n + j);
        }
      }
    } else {
      const int j = node - n;
      for (int id : b.col_cells[j]) {
        const int i = b.cell_row[id];
        if (!row_done[i]) {
          u[i] = cost[i * m + j] - v[j];
          row_done[i] = true;
          queue.push_back(i);
        }
      }
    }
  }
}

// Alternating path from row i0 to column j0 through basic cells.
bool find_cycle(const Basis& b, int i0, int j0, std::vector<int>& path_cells) {
  const int n = b.n;
  std::vector<int> parent_cell(b.node_count(), -1);
  std::vector<bool> seen(b.node_count(), false);
  std::vector<int> queue{i0};
  seen[i0] = true;
  while (!queue.empty()) {
    const int node = queue.back();
    queue.pop_back();
    const auto& cells = node < n ? b.row_cells[node] : b.col_cells[node - n];
    for (int id : cells) {
      const int next = node < n ? n + b.cell_col[id] : b.cell_row[id];
      if (seen[next]) continue;
      seen[next] = true;
      parent_cell[next] = id;
      if (next == n + j0) {
        for (int at = next; at != i0;) {
          const int cell = parent_cell[at];
          path_cells.push_back(cell);
          const int r = b.cell_row[cell], c = n + b.cell_col[cell];
          at = (at == r) ? c : r;
        }
        std::reverse(path_cells.begin(), path_cells.end());
        return true;
      }
      queue.push_back(next);
    }
  }
  return false;
}

struct SolveOutcome {
  bool ok = false;
  Basis basis;
};

SolveOutcome run_simplex(int n, int m, const std::vector<double>& cost,
                         const std::vector<double>& supply, const std::vector<double>& demand) {
  SolveOutcome out;
  Basis& b = out.basis;
  b.n = n;
  b.m = m;
  b.row_cells.assign(n, {});
  b.col_cells.assign(m, {});

  // Northwest-corner start; zero-supply rows still get a (degenerate) cell so
  // the basis stays a spanning tree.
  {
    int i = 0, j = 0;
    double si = supply[0], dj = demand[0];
    while (true) {
      const double f = std::min(si, dj);
      b.add_cell(i, j, f);
      si -= f;
      dj -= f;
      const bool last = (i == n - 1 && j == m - 1);
      if (last) break;
      if (si <= dj && i < n - 1) {
        ++i;
        si = supply[i];
      } else if (j < m - 1) {
        ++j;
        dj = demand[j];
      } else {
        ++i;
        si = supply[i];
      }
    }
  }

  double cost_scale = 1.0;
  for (double c : cost) cost_scale = std::max(cost_scale, std::fabs(c));
  const double rc_tol = 1e-13 * cost_scale;

  std::vector<double> u, v;
  const long max_pivots = 400L * (n + m) + 4000L;
  for (long pivot = 0; pivot < max_pivots; ++pivot) {
    compute_potentials(b, cost, m, u, v);

    int best_i = -1, best_j = -1;
    double best_rc = -rc_tol;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        const double rc = cost[i * m + j] - u[i] - v[j];
        if (rc < best_rc) {
          best_rc = rc;
          best_i = i;
          best_j = j;
        }
      }
    if (best_i < 0) {
      out.ok = true;
      return out;
    }

    std::vector<int> path;
    if (!find_cycle(b, best_i, best_j, path)) return out;

    // Path cells alternate: even positions lose flow when the entering cell
    // gains. The leaving cell is the first minimal-flow loser.
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (std::size_t t = 0; t < path.size(); t += 2) {
      const int id = path[t];
      if (b.flow[id] < theta) {
        theta = b.flow[id];
        leave = id;
      }
    }

    const int entering = b.add_cell(best_i, best_j, theta);
    for (std::size_t t = 0; t < path.size(); ++t) {
      const int id = path[t];
      if (id == entering) continue;
      b.flow[id] += (t % 2 == 0) ? -theta : theta;
    }
    b.remove_cell(leave);
  }
  return out;
}

}  // namespace

TransportResult solve_transport(int n, int m, const std::vector<double>& cost,
                                const std::vector<double>& supply,
                                const std::vector<double>& demand) {
  require(n >= 1 && m >= 1, Errc::invalid_argument, "transport: empty marginal");
  require(static_cast<int>(cost.size()) == n * m, Errc::invalid_argument,
          "transport: cost size mismatch");

  SolveOutcome out = run_simplex(n, m, cost, supply, demand);
  if (!out.ok) {
    // Rare degenerate stall: retry once with lexicographically perturbed
    // supplies, then recompute exact flows for the true marginals on the
    // final basis (reduced costs do not depend on the marginals).
    std::vector<double> s2 = supply, d2 = demand;
    double bump = 0.0;
    for (int i = 0; i < n; ++i) {
      const double eps = 1e-11 * (i + 1);
      s2[i] += eps;
      bump += eps;
    }
    d2[m - 1] += bump;
    out = run_simplex(n, m, cost, s2, d2);
    require(out.ok, Errc::numerical_failure, "transport: simplex failed to converge");
  }

  if (!recompute_flows(out.basis, supply, demand))
    fail(Errc::numerical_failure, "transport: basis is not a spanning tree");

  TransportResult res;
  double primal = 0.0;
  for (std::size_t id = 0; id < out.basis.flow.size(); ++id) {
    if (out.basis.cell_row[id] < 0) continue;
    const double f = std::max(0.0, out.basis.flow[id]);
    const int i = out.basis.cell_row[id], j = out.basis.cell_col[id];
    primal += f * cost[i * m + j];
    res.plan.emplace_back(i, j, f);
  }

  // Optimality certificate: dual value within tolerance of the primal.
  std::vector<double> u, v;
  compute_potentials(out.basis, cost, m, u, v);
  double dual = 0.0;
  for (int i = 0; i < n; ++i) dual += u[i] * supply[i];
  for (int j = 0; j < m; ++j) dual += v[j] * demand[j];
  double cost_scale = 1.0;
  for (double c : cost) cost_scale = std::max(cost_scale, std::fabs(c));
  require(std::fabs(primal - dual) <= 1e-9 * std::max(1.0, cost_scale), Errc::numerical_failure,
          "transport: weak-duality certificate failed");

  res.cost = primal;
  return res;
}

}  // namespace wdro
