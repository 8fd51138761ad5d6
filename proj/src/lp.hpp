#ifndef WDRO_LP_HPP
#define WDRO_LP_HPP

#include <vector>

#include "common.hpp"

namespace wdro {

// Dense simplex for  max c'x  s.t.  A x <= b, x >= 0  with b >= 0 (slack
// basis is feasible). Small instances only; Bland's rule, so it terminates.
struct LpResult {
  double value = 0.0;
  std::vector<double> x;
  bool bounded = true;
};

LpResult solve_lp_max(const std::vector<double>& c, const std::vector<double>& A,
                      const std::vector<double>& b, int rows, int cols);

}  // namespace wdro

#endif
