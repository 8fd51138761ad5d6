#ifndef WDRO_MEASURE_HPP
#define WDRO_MEASURE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"

namespace wdro {

// Weighted atoms in R^d standing in for the return law P (and the derived
// measures Q, P*, P_x~). Immutable after construction.
class DiscreteMeasure {
public:
  DiscreteMeasure(int dim, std::vector<double> atoms_flat, std::vector<double> weights);

  static DiscreteMeasure dirac(const Vec& point);
  static DiscreteMeasure uniform(int dim, std::vector<double> atoms_flat);
  // Synthetic Gaussian returns: splitmix64(seed) + Box-Muller, row by row,
  // one pair of uniforms per two coordinates (odd tail coordinate discards
  // its partner draw).
  static DiscreteMeasure synthetic_gaussian(int dim, int count, std::uint64_t seed,
                                            std::span<const double> mean,
                                            std::span<const double> sigma);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(weights_.size()); }
  std::span<const double> atom(int i) const { return {atoms_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)}; }
  double weight(int i) const { return weights_[i]; }
  const std::vector<double>& atoms_flat() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }

  // {"atoms": [[...],...], "weights": [...]} with 17-significant-digit floats.
  std::string to_json() const;

private:
  int dim_;
  std::vector<double> atoms_;  // row-major
  std::vector<double> weights_;
};

struct AmbiguitySpec {
  DiscreteMeasure baseline;
  double order_p = 2.0;
  double radius_k = 1.0;

  AmbiguitySpec(DiscreteMeasure base, double p, double k);
};

// (E_P |X|^p)^(1/p)
double moment_cp(const DiscreteMeasure& P, double p);

// Exact W_p between discrete measures: transport LP, with the sorted quantile
// coupling as the d=1 fast path.
double wasserstein_discrete(const DiscreteMeasure& P, const DiscreteMeasure& Q, double p);

// (1-alpha) P + alpha delta_{x~}; admissible only for
// alpha in [0, min(1, (k/(C_P+|x~|))^p)] with the upper formula end open.
DiscreteMeasure dirac_mixture(const DiscreteMeasure& P, const Vec& x_tilde, double alpha,
                              const AmbiguitySpec& spec);

// P* = (1/2d) sum_i (P_{-e_i} + P_{+e_i}) with alpha = min(1, (k/(2(C_P+1)))^p),
// certified inside B_k(P).
DiscreteMeasure construct_pstar(const AmbiguitySpec& spec);

// Pushforward under x -> x + v.
DiscreteMeasure shift_measure(const DiscreteMeasure& P, const Vec& v);

struct BetaStar {
  double value = 0.0;     // largest 1/n on the dyadic grid satisfying the bound
  bool degenerate = false;  // some direction carries no mass below 0
};

// Certified grid lower bound for the quantitative no-arbitrage constant:
// min over sphere-grid directions w of P(<w,X> < -beta|w|) >= beta.
BetaStar beta_star(const DiscreteMeasure& P, int sphere_grid = 1024);

struct NaResult {
  bool no_arbitrage = true;
  Vec arbitrage_direction;  // nonempty when no_arbitrage == false
};

NaResult na_check(const DiscreteMeasure& P);

// Deterministic direction grid on the unit sphere (Fibonacci lattice for d=3,
// uniform angles for d=2, seeded normals for d>3).
std::vector<double> sphere_directions(int dim, int count);

}  // namespace wdro

#endif
