#ifndef WDRO_TRANSPORT_HPP
#define WDRO_TRANSPORT_HPP

#include <tuple>
#include <vector>

#include "common.hpp"

namespace wdro {

// Exact solution of the balanced transportation problem
//   min sum_ij cost(i,j) pi(i,j)   s.t.  pi 1 = supply, pi^T 1 = demand, pi >= 0
// by the classical MODI / network-simplex scheme on the bipartite basis tree.
// Instances are desk scale (n, m <= a few hundred); optimality is verified by
// reduced costs and the dual value before returning.
struct TransportResult {
  double cost = 0.0;
  // basic cells of the optimal plan, (row, col, flow)
  std::vector<std::tuple<int, int, double>> plan;
};

TransportResult solve_transport(int n, int m, const std::vector<double>& cost,
                                const std::vector<double>& supply,
                                const std::vector<double>& demand);

}  // namespace wdro

#endif
