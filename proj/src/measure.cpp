#include "measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "lp.hpp"
#include "rng.hpp"
#include "transport.hpp"

namespace wdro {

namespace {

constexpr double kMergeTol = 1e-12;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<double> atoms_flat,
                                 std::vector<double> weights)
    : dim_(dim), atoms_(std::move(atoms_flat)), weights_(std::move(weights)) {
  require(dim_ >= 1, Errc::invalid_argument, "measure: dimension must be >= 1");
  require(!weights_.empty(), Errc::invalid_argument, "measure: no atoms");
  require(atoms_.size() == weights_.size() * static_cast<std::size_t>(dim_),
          Errc::invalid_argument, "measure: atom/weight shape mismatch");
  require(all_finite(atoms_), Errc::invalid_argument, "measure: non-finite atom coordinate");
  double sum = 0.0;
  for (double w : weights_) {
    require(std::isfinite(w) && w >= 0.0, Errc::invalid_argument,
            "measure: weights must be non-negative");
    sum += w;
  }
  require(std::fabs(sum - 1.0) <= 1e-12, Errc::invalid_argument,
          "measure: weights must sum to 1 within 1e-12");
}

DiscreteMeasure DiscreteMeasure::dirac(const Vec& point) {
  return DiscreteMeasure(static_cast<int>(point.size()), point, {1.0});
}

DiscreteMeasure DiscreteMeasure::uniform(int dim, std::vector<double> atoms_flat) {
  const std::size_t n = atoms_flat.size() / static_cast<std::size_t>(dim);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  // Make the weights sum to 1 exactly by adjusting the last one.
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) acc += w[i];
  w[n - 1] = 1.0 - acc;
  return DiscreteMeasure(dim, std::move(atoms_flat), std::move(w));
}

DiscreteMeasure DiscreteMeasure::synthetic_gaussian(int dim, int count, std::uint64_t seed,
                                                    std::span<const double> mean,
                                                    std::span<const double> sigma) {
  require(dim >= 1 && count >= 1, Errc::invalid_argument, "synthetic: bad shape");
  SplitMix64 rng(seed);
  std::vector<double> atoms;
  atoms.reserve(static_cast<std::size_t>(dim) * count);
  for (int i = 0; i < count; ++i) {
    int j = 0;
    while (j < dim) {
      double g0, g1;
      rng.next_gaussian_pair(g0, g1);
      atoms.push_back(mean[j] + sigma[j] * g0);
      ++j;
      if (j < dim) {
        atoms.push_back(mean[j] + sigma[j] * g1);
        ++j;
      }
    }
  }
  return uniform(dim, std::move(atoms));
}

std::string DiscreteMeasure::to_json() const {
  std::string out = "{\"atoms\":[";
  for (int i = 0; i < size(); ++i) {
    out += i ? ",[" : "[";
    for (int j = 0; j < dim_; ++j) {
      if (j) out += ",";
      out += format_double(atoms_[static_cast<std::size_t>(i) * dim_ + j]);
    }
    out += "]";
  }
  out += "],\"weights\":[";
  for (int i = 0; i < size(); ++i) {
    if (i) out += ",";
    out += format_double(weights_[i]);
  }
  out += "]}";
  return out;
}

AmbiguitySpec::AmbiguitySpec(DiscreteMeasure base, double p, double k)
    : baseline(std::move(base)), order_p(p), radius_k(k) {
  require(order_p >= 1.0, Errc::invalid_argument, "ambiguity: order p must be >= 1");
  require(radius_k > 0.0, Errc::invalid_argument, "ambiguity: radius k must be positive");
}

double moment_cp(const DiscreteMeasure& P, double p) {
  require(p >= 1.0, Errc::invalid_argument, "moment_cp: p must be >= 1");
  double s = 0.0;
  for (int i = 0; i < P.size(); ++i) s += P.weight(i) * pow_p(norm2(P.atom(i)), p);
  return std::pow(s, 1.0 / p);
}

namespace {

double wasserstein_1d(const DiscreteMeasure& P, const DiscreteMeasure& Q, double p) {
  const int n = P.size(), m = Q.size();
  std::vector<int> pi(n), qi(m);
  std::iota(pi.begin(), pi.end(), 0);
  std::iota(qi.begin(), qi.end(), 0);
  std::sort(pi.begin(), pi.end(), [&](int a, int b) { return P.atom(a)[0] < P.atom(b)[0]; });
  std::sort(qi.begin(), qi.end(), [&](int a, int b) { return Q.atom(a)[0] < Q.atom(b)[0]; });

  double cost = 0.0;
  int a = 0, b = 0;
  double wa = P.weight(pi[0]), wb = Q.weight(qi[0]);
  while (a < n && b < m) {
    const double f = std::min(wa, wb);
    if (f > 0.0) cost += f * pow_p(std::fabs(P.atom(pi[a])[0] - Q.atom(qi[b])[0]), p);
    wa -= f;
    wb -= f;
    if (wa <= 0.0 && a < n) {
      ++a;
      if (a < n) wa = P.weight(pi[a]);
    }
    if (wb <= 0.0 && b < m) {
      ++b;
      if (b < m) wb = Q.weight(qi[b]);
    }
  }
  return std::pow(cost, 1.0 / p);
}

double wasserstein_lp(const DiscreteMeasure& P, const DiscreteMeasure& Q, double p) {
  const int n = P.size(), m = Q.size();
  std::vector<double> cost(static_cast<std::size_t>(n) * m);
  std::vector<double> diff(P.dim());
  for (int i = 0; i < n; ++i) {
    const auto xi = P.atom(i);
    for (int j = 0; j < m; ++j) {
      const auto yj = Q.atom(j);
      double s = 0.0;
      for (int t = 0; t < P.dim(); ++t) {
        const double d = xi[t] - yj[t];
        s += d * d;
      }
      cost[static_cast<std::size_t>(i) * m + j] = pow_p(std::sqrt(s), p);
    }
  }
  const TransportResult res = solve_transport(n, m, cost, P.weights(), Q.weights());
  return std::pow(std::max(0.0, res.cost), 1.0 / p);
}

// Canonical argument order makes W(P,Q) and W(Q,P) run the same computation.
bool canonical_before(const DiscreteMeasure& A, const DiscreteMeasure& B) {
  if (A.size() != B.size()) return A.size() < B.size();
  if (A.atoms_flat() != B.atoms_flat()) return lex_less(A.atoms_flat(), B.atoms_flat());
  return !lex_less(B.weights(), A.weights());
}

}  // namespace

double wasserstein_discrete(const DiscreteMeasure& P, const DiscreteMeasure& Q, double p) {
  require(P.dim() == Q.dim(), Errc::invalid_argument, "wasserstein: dimension mismatch");
  require(p >= 1.0, Errc::invalid_argument, "wasserstein: p must be >= 1");
  const DiscreteMeasure& a = canonical_before(P, Q) ? P : Q;
  const DiscreteMeasure& b = canonical_before(P, Q) ? Q : P;
  if (P.dim() == 1) return wasserstein_1d(a, b, p);
  return wasserstein_lp(a, b, p);
}

namespace {

// Appends (or merges) one extra atom with the given weight, scaling the
// existing weights by (1 - alpha). Zero-weight atoms are kept.
DiscreteMeasure mix_in_atom(const DiscreteMeasure& P, const Vec& x, double alpha) {
  const int d = P.dim();
  std::vector<double> atoms = P.atoms_flat();
  std::vector<double> w = P.weights();
  for (auto& wi : w) wi *= (1.0 - alpha);

  int found = -1;
  for (int i = 0; i < P.size(); ++i) {
    bool same = true;
    for (int j = 0; j < d; ++j)
      if (std::fabs(P.atom(i)[j] - x[j]) > kMergeTol) {
        same = false;
        break;
      }
    if (same) {
      found = i;
      break;
    }
  }
  if (found >= 0) {
    w[found] += alpha;
  } else {
    atoms.insert(atoms.end(), x.begin(), x.end());
    w.push_back(alpha);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) sum += w[i];
  w.back() = std::max(0.0, 1.0 - sum);
  return DiscreteMeasure(d, std::move(atoms), std::move(w));
}

}  // namespace

DiscreteMeasure dirac_mixture(const DiscreteMeasure& P, const Vec& x_tilde, double alpha,
                              const AmbiguitySpec& spec) {
  require(static_cast<int>(x_tilde.size()) == P.dim(), Errc::invalid_argument,
          "dirac_mixture: dimension mismatch");
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0, Errc::invalid_argument,
          "dirac_mixture: alpha must lie in [0,1]");
  const double cp = moment_cp(P, spec.order_p);
  const double bound = pow_p(spec.radius_k / (cp + norm2(x_tilde)), spec.order_p);
  if (alpha >= bound)
    fail(Errc::ball_violation,
         "dirac_mixture: alpha outside the admissible interval [0, (k/(C_P+|x|))^p)");
  if (alpha == 0.0) return P;
  DiscreteMeasure out = mix_in_atom(P, x_tilde, alpha);
  require(wasserstein_discrete(out, P, spec.order_p) <= spec.radius_k + 1e-9,
          Errc::ball_violation, "dirac_mixture: ball certification failed");
  return out;
}

DiscreteMeasure construct_pstar(const AmbiguitySpec& spec) {
  const DiscreteMeasure& P = spec.baseline;
  const int d = P.dim();
  const double cp = moment_cp(P, spec.order_p);
  const double alpha =
      std::min(1.0, pow_p(spec.radius_k / (2.0 * (cp + 1.0)), spec.order_p));

  // P* = (1-alpha) P + (alpha/2d) sum_i (delta_{-e_i} + delta_{+e_i})
  std::vector<double> atoms = P.atoms_flat();
  std::vector<double> w = P.weights();
  for (auto& wi : w) wi *= (1.0 - alpha);
  const double unit_share = alpha / (2.0 * d);
  for (int t = 0; t < 2 * d; ++t) {
    Vec e(d, 0.0);
    e[t / 2] = (t % 2 == 0) ? -1.0 : 1.0;
    int found = -1;
    for (std::size_t i = 0; i < w.size(); ++i) {
      bool same = true;
      for (int j = 0; j < d; ++j)
        if (std::fabs(atoms[i * d + j] - e[j]) > kMergeTol) {
          same = false;
          break;
        }
      if (same) {
        found = static_cast<int>(i);
        break;
      }
    }
    if (found >= 0) {
      w[found] += unit_share;
    } else {
      atoms.insert(atoms.end(), e.begin(), e.end());
      w.push_back(unit_share);
    }
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) acc += w[i];
  w.back() = std::max(0.0, 1.0 - acc);

  DiscreteMeasure out(d, std::move(atoms), std::move(w));
  require(wasserstein_discrete(out, P, spec.order_p) <= spec.radius_k + 1e-9,
          Errc::ball_violation, "construct_pstar: ball certification failed");
  return out;
}

DiscreteMeasure shift_measure(const DiscreteMeasure& P, const Vec& v) {
  require(static_cast<int>(v.size()) == P.dim(), Errc::invalid_argument,
          "shift_measure: dimension mismatch");
  std::vector<double> atoms = P.atoms_flat();
  for (int i = 0; i < P.size(); ++i)
    for (int j = 0; j < P.dim(); ++j) atoms[static_cast<std::size_t>(i) * P.dim() + j] += v[j];
  return DiscreteMeasure(P.dim(), std::move(atoms), P.weights());
}

std::vector<double> sphere_directions(int dim, int count) {
  require(dim >= 1 && count >= 1, Errc::invalid_argument, "sphere_directions: bad request");
  std::vector<double> dirs;
  if (dim == 1) {
    dirs = {1.0, -1.0};
    return dirs;
  }
  dirs.reserve(static_cast<std::size_t>(dim) * count);
  if (dim == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 6.283185307179586 * i / count;
      dirs.push_back(std::cos(t));
      dirs.push_back(std::sin(t));
    }
    return dirs;
  }
  if (dim == 3) {
    // Fibonacci lattice.
    const double ga = 2.399963229728653;  // 2*pi*(2 - golden ratio)
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double t = ga * i;
      dirs.push_back(r * std::cos(t));
      dirs.push_back(r * std::sin(t));
      dirs.push_back(z);
    }
    return dirs;
  }
  SplitMix64 rng(0x5EEDD1CE5ULL);
  for (int i = 0; i < count; ++i) {
    Vec v(dim);
    double nn = 0.0;
    do {
      for (int j = 0; j < dim; ++j) v[j] = rng.next_gaussian();
      nn = norm2(v);
    } while (nn < 1e-8);
    for (int j = 0; j < dim; ++j) dirs.push_back(v[j] / nn);
  }
  return dirs;
}

BetaStar beta_star(const DiscreteMeasure& P, int sphere_grid) {
  const int d = P.dim();
  // Affine-hull-full support: rank of the weight-carrying atoms around their mean.
  {
    std::vector<Vec> rows;
    Vec mean(d, 0.0);
    double wsum = 0.0;
    for (int i = 0; i < P.size(); ++i) {
      if (P.weight(i) <= 0.0) continue;
      for (int j = 0; j < d; ++j) mean[j] += P.weight(i) * P.atom(i)[j];
      wsum += P.weight(i);
    }
    for (int j = 0; j < d; ++j) mean[j] /= wsum;
    for (int i = 0; i < P.size(); ++i) {
      if (P.weight(i) <= 0.0) continue;
      Vec r(d);
      for (int j = 0; j < d; ++j) r[j] = P.atom(i)[j] - mean[j];
      rows.push_back(std::move(r));
    }
    // Gaussian elimination rank.
    int rank = 0;
    for (int col = 0; col < d && rank < static_cast<int>(rows.size()); ++col) {
      int piv = -1;
      double best = 1e-10;
      for (std::size_t r = rank; r < rows.size(); ++r)
        if (std::fabs(rows[r][col]) > best) {
          best = std::fabs(rows[r][col]);
          piv = static_cast<int>(r);
        }
      if (piv < 0) continue;
      std::swap(rows[rank], rows[piv]);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<int>(r) == rank) continue;
        const double f = rows[r][col] / rows[rank][col];
        for (int j = col; j < d; ++j) rows[r][j] -= f * rows[rank][j];
      }
      ++rank;
    }
    if (rank < d)
      fail(Errc::degenerate_support, "beta_star: support does not span R^d affinely");
  }

  const std::vector<double> dirs = sphere_directions(d, sphere_grid);
  const int ndirs = static_cast<int>(dirs.size()) / d;

  // Per direction: projections of weight-carrying atoms.
  // mass(<w,X> < -beta) must be >= beta; scan the dyadic grid beta = 1/n.
  BetaStar out;
  double min_neg_mass = 1.0;  // min over directions of mass strictly below 0
  double min_gap = std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::pair<double, double>>> projs(ndirs);
  for (int t = 0; t < ndirs; ++t) {
    std::span<const double> w(dirs.data() + static_cast<std::size_t>(t) * d,
                              static_cast<std::size_t>(d));
    double neg_mass = 0.0;
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < P.size(); ++i) {
      if (P.weight(i) <= 0.0) continue;
      const double s = dot(w, P.atom(i));
      projs[t].emplace_back(s, P.weight(i));
      if (s < 0.0) {
        neg_mass += P.weight(i);
        gap = std::min(gap, -s);
      }
    }
    min_neg_mass = std::min(min_neg_mass, neg_mass);
    min_gap = std::min(min_gap, gap);
  }
  if (min_neg_mass <= 0.0) {
    out.degenerate = true;
    out.value = 0.0;
    return out;
  }

  const long n_max =
      static_cast<long>(std::ceil(1.0 / std::min(min_neg_mass, min_gap))) + 2;
  for (long n = 1; n <= n_max; ++n) {
    const double beta = 1.0 / static_cast<double>(n);
    bool ok = true;
    for (int t = 0; t < ndirs && ok; ++t) {
      double mass = 0.0;
      for (const auto& [s, wgt] : projs[t])
        if (s < -beta) mass += wgt;
      if (mass < beta) ok = false;
    }
    if (ok) {
      out.value = beta;
      return out;
    }
  }
  out.degenerate = true;
  out.value = 0.0;
  return out;
}

NaResult na_check(const DiscreteMeasure& P) {
  const int d = P.dim();
  std::vector<int> idx;
  for (int i = 0; i < P.size(); ++i)
    if (P.weight(i) > 0.0) idx.push_back(i);
  const int n = static_cast<int>(idx.size());

  // Variables: w+ (d), w- (d), s (n). Maximize sum s subject to
  //   <w, x_i> >= s_i  (written as -<w,x_i> + s_i <= 0),  |w_j| <= 1, s_i <= 1.
  const int cols = 2 * d + n;
  const int rows = n + 2 * d + n;
  std::vector<double> A(static_cast<std::size_t>(rows) * cols, 0.0);
  std::vector<double> b(rows, 0.0);
  std::vector<double> c(cols, 0.0);
  for (int r = 0; r < n; ++r) {
    const auto x = P.atom(idx[r]);
    for (int j = 0; j < d; ++j) {
      A[static_cast<std::size_t>(r) * cols + j] = -x[j];
      A[static_cast<std::size_t>(r) * cols + d + j] = x[j];
    }
    A[static_cast<std::size_t>(r) * cols + 2 * d + r] = 1.0;
    b[r] = 0.0;
    c[2 * d + r] = 1.0;
  }
  for (int j = 0; j < 2 * d; ++j) {
    A[static_cast<std::size_t>(n + j) * cols + j] = 1.0;
    b[n + j] = 1.0;
  }
  for (int r = 0; r < n; ++r) {
    A[static_cast<std::size_t>(n + 2 * d + r) * cols + 2 * d + r] = 1.0;
    b[n + 2 * d + r] = 1.0;
  }

  const LpResult lp = solve_lp_max(c, A, b, rows, cols);
  NaResult res;
  if (lp.bounded && lp.value > 1e-9) {
    res.no_arbitrage = false;
    res.arbitrage_direction.resize(d);
    for (int j = 0; j < d; ++j) res.arbitrage_direction[j] = lp.x[j] - lp.x[d + j];
  }
  return res;
}

}  // namespace wdro
