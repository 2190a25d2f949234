#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfaffine/affine_system.hpp"

namespace selfaffine {

enum class MapSide { sigma, rho, tau, omega };

MapSide parse_side(std::string_view s);
std::string to_string(MapSide side);

struct AttractorSample {
  MapSide side;
  int depth;
  std::vector<Point> points;  // sorted, duplicates removed
};

// sigma/rho: exact fixed points of every depth-n composition.
// tau/omega (expanding): images of 0 under every depth-n word.
AttractorSample attractor_points(const AffineSystem& sys, MapSide side, int depth);
// Images of 0 under every word of length depth, for any side.
AttractorSample orbit_points(const AffineSystem& sys, MapSide side, int depth);

// Half-space normal . x <= offset, with coordinates in the polytope's local frame.
struct Facet {
  RationalVector normal;
  Rational offset;
};

class Polytope {
 public:
  std::size_t ambient_dim() const { return ambient_; }
  std::size_t affine_dim() const { return basis_.size(); }
  bool full_dimensional() const { return affine_dim() == ambient_; }

  const std::vector<Point>& vertices() const { return vertices_; }
  // Facets in local coordinates (identical to ambient ones when full-dimensional).
  const std::vector<Facet>& facets() const { return facets_; }
  const Point& origin() const { return origin_; }
  const std::vector<RationalVector>& basis() const { return basis_; }

  // Local coordinates of x; nullopt when x is off the affine hull.
  std::optional<RationalVector> local_coordinates(const Point& x) const;
  bool contains(const Point& x) const;
  // Floating membership with slack tol; used for grid node filtering.
  bool contains_approx(std::span<const double> x, double tol = 1e-12) const;
  // Interior relative to the ambient space (false for degenerate polytopes).
  bool contains_in_interior(const Point& x) const;

  Rational volume() const;
  double diameter() const;

 private:
  friend Polytope convex_hull(std::span<const Point> points);
  std::size_t ambient_ = 0;
  Point origin_;
  std::vector<RationalVector> basis_;
  std::vector<std::size_t> pivot_rows_;  // rows used to solve for local coordinates
  std::vector<Point> vertices_;
  std::vector<RationalVector> local_vertices_;
  std::vector<Facet> facets_;
  Rational volume_ = 0;
};

// Exact hull for ambient dimension <= 3; lower-dimensional inputs produce a
// polytope of smaller affine_dim(). Throws std::invalid_argument on empty input
// and std::domain_error for ambient dimension > 3.
Polytope convex_hull(std::span<const Point> points);

// Invariant simplex with vertices 0 and -(R* - I)^{-1} l. Requires R = c I with c > 1.
Polytope simplex_Y(const AffineSystem& sys);
Polytope simplex_Y(const AffineSystem& sys, long r);  // for the system (rR, B, L)

Rational hull_volume(const Polytope& p);

struct InvarianceViolation {
  std::size_t l_index;
  Point vertex;
  Rational s;
  Point image;
};

struct InvarianceReport {
  bool invariant = true;
  std::size_t checked = 0;
  std::vector<InvarianceViolation> violations;
};

// Checks R*^{-1}(v - s l) in P for every vertex v, l in L, s in {0, 1/2, 1}.
InvarianceReport invariance_check(const AffineSystem& sys, const Polytope& p);

// ln N / ln r when R = r O with O orthogonal, else nullopt.
std::optional<double> hausdorff_dimension(const AffineSystem& sys);

// Hull Y of X_rho: the exact simplex when R = cI, else the hull of depth-n fixed points.
Polytope rho_hull(const AffineSystem& sys, int depth = 4);

}  // namespace selfaffine
