#ifndef WDRO_CONSTRAINT_HPP
#define WDRO_CONSTRAINT_HPP

#include <vector>

#include "common.hpp"

namespace wdro {

enum class ConstraintKind { halfspace, halfspace_nonneg, two_sided, polyhedron, singleton, finite_list };

// Closed non-empty constraint sets, decomposed into convex pieces (at most
// two for the shipped kinds; one per candidate for finite lists). A feasible
// point per piece is certified at construction.
class ConstraintSet {
public:
  static ConstraintSet halfspace(int dim, double a);
  static ConstraintSet halfspace_nonneg(int dim, double a);
  static ConstraintSet two_sided(int dim, double a);
  // {w : <normals_j, w> >= offsets_j for all j}; normals are unit-normalized.
  static ConstraintSet polyhedron(int dim, std::vector<Vec> normals, Vec offsets);
  static ConstraintSet singleton(Vec w0);
  static ConstraintSet finite_list(int dim, std::vector<Vec> candidates);

  ConstraintKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double level() const { return a_; }

  int piece_count() const;
  bool piece_is_point(int piece) const;
  Vec piece_point(int piece) const;

  Vec project_piece(int piece, std::span<const double> w) const;
  // Euclidean projection onto the whole set (nearest piece; lexicographic on ties).
  Vec project(std::span<const double> w) const;
  bool contains(std::span<const double> w, double tol = 1e-9) const;

  // The minimal-norm set D̄: closed forms where available, the min-norm QP
  // for polyhedra, enumeration for lists.
  std::vector<Vec> min_norm_points() const;
  double min_norm() const;

private:
  ConstraintSet() = default;

  ConstraintKind kind_ = ConstraintKind::halfspace;
  int dim_ = 0;
  double a_ = 0.0;
  std::vector<Vec> normals_;
  Vec offsets_;
  std::vector<Vec> points_;  // singleton/finite_list
};

// min |w - y| over {w : <N_j, w> >= b_j}, by enumeration of active subsets
// with a KKT solve per subset (rows must be modest; normals unit length).
Vec project_onto_polyhedron(const std::vector<Vec>& normals, const Vec& offsets,
                            std::span<const double> y);

}  // namespace wdro

#endif
