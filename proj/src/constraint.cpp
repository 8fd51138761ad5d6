#include "constraint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace wdro {

namespace {

Vec project_halfspace_sum(std::span<const double> w, double a, double sign) {
  // {v : sign * <v, 1> >= a}; closed-form shift along 1.
  const int d = static_cast<int>(w.size());
  double s = 0.0;
  for (double x : w) s += x;
  const double shortfall = a - sign * s;
  Vec out(w.begin(), w.end());
  if (shortfall > 0.0)
    for (double& x : out) x += sign * shortfall / d;
  return out;
}

// Projection onto {v >= 0, <v,1> >= a}: clip, else the active-simplex
// water-filling threshold.
Vec project_orthant_halfspace(std::span<const double> w, double a) {
  const int d = static_cast<int>(w.size());
  Vec clip(w.begin(), w.end());
  double s = 0.0;
  for (double& x : clip) {
    x = std::max(x, 0.0);
    s += x;
  }
  if (s >= a) return clip;

  Vec sorted(w.begin(), w.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double csum = 0.0, tau = 0.0;
  for (int j = 0; j < d; ++j) {
    csum += sorted[j];
    const double t = (csum - a) / (j + 1);
    if (sorted[j] - t > 0.0) tau = t;
  }
  Vec out(d);
  for (int j = 0; j < d; ++j) out[j] = std::max(w[j] - tau, 0.0);
  return out;
}

}  // namespace

Vec project_onto_polyhedron(const std::vector<Vec>& normals, const Vec& offsets,
                            std::span<const double> y) {
  const int m = static_cast<int>(normals.size());
  const int d = static_cast<int>(y.size());
  require(m <= 16, Errc::invalid_argument, "polyhedron: too many rows for exact projection");

  auto feasible = [&](const Vec& w) {
    for (int j = 0; j < m; ++j)
      if (dot(normals[j], w) < offsets[j] - 1e-10 * (1.0 + std::fabs(offsets[j]))) return false;
    return true;
  };

  std::optional<Vec> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  const unsigned masks = 1u << m;
  std::vector<int> rows;
  for (unsigned mask = 0; mask < masks; ++mask) {
    if (std::popcount(mask) > d) continue;
    rows.clear();
    for (int j = 0; j < m; ++j)
      if (mask & (1u << j)) rows.push_back(j);
    const int s = static_cast<int>(rows.size());

    // KKT: w = y + N_S^T lambda with N_S w = b_S  =>  (N_S N_S^T) lambda = b_S - N_S y.
    std::vector<double> G(static_cast<std::size_t>(s) * (s + 1));
    for (int r = 0; r < s; ++r) {
      for (int q = 0; q < s; ++q)
        G[static_cast<std::size_t>(r) * (s + 1) + q] = dot(normals[rows[r]], normals[rows[q]]);
      G[static_cast<std::size_t>(r) * (s + 1) + s] = offsets[rows[r]] - dot(normals[rows[r]], y);
    }
    // Gaussian elimination with partial pivoting.
    bool singular = false;
    for (int col = 0; col < s; ++col) {
      int piv = col;
      for (int r = col + 1; r < s; ++r)
        if (std::fabs(G[static_cast<std::size_t>(r) * (s + 1) + col]) >
            std::fabs(G[static_cast<std::size_t>(piv) * (s + 1) + col]))
          piv = r;
      if (std::fabs(G[static_cast<std::size_t>(piv) * (s + 1) + col]) < 1e-12) {
        singular = true;
        break;
      }
      if (piv != col)
        for (int q = col; q <= s; ++q)
          std::swap(G[static_cast<std::size_t>(col) * (s + 1) + q],
                    G[static_cast<std::size_t>(piv) * (s + 1) + q]);
      for (int r = col + 1; r < s; ++r) {
        const double f = G[static_cast<std::size_t>(r) * (s + 1) + col] /
                         G[static_cast<std::size_t>(col) * (s + 1) + col];
        for (int q = col; q <= s; ++q)
          G[static_cast<std::size_t>(r) * (s + 1) + q] -=
              f * G[static_cast<std::size_t>(col) * (s + 1) + q];
      }
    }
    if (singular) continue;
    Vec lambda(s);
    for (int r = s - 1; r >= 0; --r) {
      double acc = G[static_cast<std::size_t>(r) * (s + 1) + s];
      for (int q = r + 1; q < s; ++q)
        acc -= G[static_cast<std::size_t>(r) * (s + 1) + q] * lambda[q];
      lambda[r] = acc / G[static_cast<std::size_t>(r) * (s + 1) + r];
    }
    bool dual_ok = true;
    for (double l : lambda)
      if (l < -1e-9) {
        dual_ok = false;
        break;
      }
    if (!dual_ok) continue;

    Vec w(y.begin(), y.end());
    for (int r = 0; r < s; ++r)
      for (int j = 0; j < d; ++j) w[j] += lambda[r] * normals[rows[r]][j];
    if (!feasible(w)) continue;

    double d2 = 0.0;
    for (int j = 0; j < d; ++j) d2 += (w[j] - y[j]) * (w[j] - y[j]);
    if (d2 < best_d2 - 1e-14 || (d2 < best_d2 + 1e-14 && best && lex_less(w, *best))) {
      best_d2 = d2;
      best = std::move(w);
    }
  }
  require(best.has_value(), Errc::infeasible_constraint,
          "polyhedron: projection found no feasible KKT point (set empty?)");
  return *best;
}

ConstraintSet ConstraintSet::halfspace(int dim, double a) {
  require(dim >= 1 && std::isfinite(a), Errc::invalid_argument, "halfspace: bad parameters");
  ConstraintSet c;
  c.kind_ = ConstraintKind::halfspace;
  c.dim_ = dim;
  c.a_ = a;
  return c;
}

ConstraintSet ConstraintSet::halfspace_nonneg(int dim, double a) {
  require(dim >= 1 && std::isfinite(a), Errc::invalid_argument, "halfspace_nonneg: bad parameters");
  ConstraintSet c;
  c.kind_ = ConstraintKind::halfspace_nonneg;
  c.dim_ = dim;
  c.a_ = a;
  return c;
}

ConstraintSet ConstraintSet::two_sided(int dim, double a) {
  require(dim >= 1 && std::isfinite(a), Errc::invalid_argument, "two_sided: bad parameters");
  ConstraintSet c;
  c.kind_ = ConstraintKind::two_sided;
  c.dim_ = dim;
  c.a_ = a;
  return c;
}

ConstraintSet ConstraintSet::polyhedron(int dim, std::vector<Vec> normals, Vec offsets) {
  require(dim >= 1 && !normals.empty() && normals.size() == offsets.size(),
          Errc::invalid_argument, "polyhedron: bad shape");
  for (std::size_t j = 0; j < normals.size(); ++j) {
    require(static_cast<int>(normals[j].size()) == dim, Errc::invalid_argument,
            "polyhedron: normal dimension mismatch");
    const double nn = norm2(normals[j]);
    require(nn > 1e-14, Errc::invalid_argument, "polyhedron: zero normal");
    for (double& x : normals[j]) x /= nn;
    offsets[j] /= nn;
  }
  ConstraintSet c;
  c.kind_ = ConstraintKind::polyhedron;
  c.dim_ = dim;
  c.normals_ = std::move(normals);
  c.offsets_ = std::move(offsets);
  // Non-emptiness certificate.
  Vec origin(dim, 0.0);
  (void)project_onto_polyhedron(c.normals_, c.offsets_, origin);
  return c;
}

ConstraintSet ConstraintSet::singleton(Vec w0) {
  require(!w0.empty() && all_finite(w0), Errc::invalid_argument, "singleton: bad point");
  ConstraintSet c;
  c.kind_ = ConstraintKind::singleton;
  c.dim_ = static_cast<int>(w0.size());
  c.points_.push_back(std::move(w0));
  return c;
}

ConstraintSet ConstraintSet::finite_list(int dim, std::vector<Vec> candidates) {
  require(dim >= 1 && !candidates.empty(), Errc::invalid_argument, "finite_list: empty");
  for (const auto& w : candidates)
    require(static_cast<int>(w.size()) == dim && all_finite(w), Errc::invalid_argument,
            "finite_list: bad candidate");
  ConstraintSet c;
  c.kind_ = ConstraintKind::finite_list;
  c.dim_ = dim;
  c.points_ = std::move(candidates);
  return c;
}

int ConstraintSet::piece_count() const {
  switch (kind_) {
    case ConstraintKind::two_sided:
      return 2;
    case ConstraintKind::finite_list:
      return static_cast<int>(points_.size());
    default:
      return 1;
  }
}

bool ConstraintSet::piece_is_point(int) const {
  return kind_ == ConstraintKind::singleton || kind_ == ConstraintKind::finite_list;
}

Vec ConstraintSet::piece_point(int piece) const {
  require(piece_is_point(piece), Errc::invalid_argument, "piece is not a point");
  return points_[static_cast<std::size_t>(piece)];
}

Vec ConstraintSet::project_piece(int piece, std::span<const double> w) const {
  require(static_cast<int>(w.size()) == dim_, Errc::invalid_argument,
          "project: dimension mismatch");
  switch (kind_) {
    case ConstraintKind::halfspace:
      return project_halfspace_sum(w, a_, +1.0);
    case ConstraintKind::halfspace_nonneg:
      return project_orthant_halfspace(w, a_);
    case ConstraintKind::two_sided:
      return piece == 0 ? project_halfspace_sum(w, a_, +1.0)
                        : project_halfspace_sum(w, a_, -1.0);
    case ConstraintKind::polyhedron:
      return project_onto_polyhedron(normals_, offsets_, w);
    case ConstraintKind::singleton:
      return points_[0];
    case ConstraintKind::finite_list:
      return points_[static_cast<std::size_t>(piece)];
  }
  return Vec(w.begin(), w.end());
}

Vec ConstraintSet::project(std::span<const double> w) const {
  Vec best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int piece = 0; piece < piece_count(); ++piece) {
    Vec cand = project_piece(piece, w);
    double d2 = 0.0;
    for (int j = 0; j < dim_; ++j) d2 += (cand[j] - w[j]) * (cand[j] - w[j]);
    if (d2 < best_d2 - 1e-14 || (d2 < best_d2 + 1e-14 && !best.empty() && lex_less(cand, best))) {
      best_d2 = d2;
      best = std::move(cand);
    }
  }
  return best;
}

bool ConstraintSet::contains(std::span<const double> w, double tol) const {
  if (static_cast<int>(w.size()) != dim_) return false;
  double s = 0.0;
  for (double x : w) s += x;
  switch (kind_) {
    case ConstraintKind::halfspace:
      return s >= a_ - tol * (1.0 + std::fabs(a_));
    case ConstraintKind::halfspace_nonneg: {
      if (s < a_ - tol * (1.0 + std::fabs(a_))) return false;
      for (double x : w)
        if (x < -tol) return false;
      return true;
    }
    case ConstraintKind::two_sided:
      return s >= a_ - tol * (1.0 + std::fabs(a_)) || s <= -a_ + tol * (1.0 + std::fabs(a_));
    case ConstraintKind::polyhedron: {
      for (std::size_t j = 0; j < normals_.size(); ++j)
        if (dot(normals_[j], w) < offsets_[j] - tol * (1.0 + std::fabs(offsets_[j]))) return false;
      return true;
    }
    case ConstraintKind::singleton:
    case ConstraintKind::finite_list: {
      for (const auto& pnt : points_) {
        double d2 = 0.0;
        for (int j = 0; j < dim_; ++j) d2 += (pnt[j] - w[j]) * (pnt[j] - w[j]);
        if (std::sqrt(d2) <= tol) return true;
      }
      return false;
    }
  }
  return false;
}

std::vector<Vec> ConstraintSet::min_norm_points() const {
  std::vector<Vec> out;
  const Vec zero(dim_, 0.0);
  switch (kind_) {
    case ConstraintKind::halfspace:
    case ConstraintKind::halfspace_nonneg: {
      if (a_ <= 0.0) {
        out.push_back(zero);
      } else {
        out.emplace_back(dim_, a_ / dim_);
      }
      break;
    }
    case ConstraintKind::two_sided: {
      if (a_ <= 0.0) {
        out.push_back(zero);
      } else {
        out.emplace_back(dim_, -a_ / dim_);
        out.emplace_back(dim_, a_ / dim_);
      }
      break;
    }
    case ConstraintKind::polyhedron:
      out.push_back(project_onto_polyhedron(normals_, offsets_, zero));
      break;
    case ConstraintKind::singleton:
      out.push_back(points_[0]);
      break;
    case ConstraintKind::finite_list: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : points_) best = std::min(best, norm2(p));
      for (const auto& p : points_)
        if (norm2(p) <= best + 1e-12) out.push_back(p);
      std::sort(out.begin(), out.end(),
                [](const Vec& a, const Vec& b) { return lex_less(a, b); });
      break;
    }
  }
  return out;
}

double ConstraintSet::min_norm() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : min_norm_points()) best = std::min(best, norm2(p));
  return best;
}

}  // namespace wdro
