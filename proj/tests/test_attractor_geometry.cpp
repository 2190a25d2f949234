#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "selfaffine/attractor_geometry.hpp"

using namespace selfaffine;

TEST(Hull, SquareWithInteriorPoints) {
  const auto p = convex_hull(std::vector<Point>{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {Rational(1, 2), Rational(1, 3)}, {1, Rational(1, 2)}});
  EXPECT_EQ(p.vertices().size(), 4u);
  EXPECT_EQ(p.volume(), Rational(1));
  EXPECT_TRUE(p.contains(Point{Rational(1, 2), 1}));
  EXPECT_FALSE(p.contains_in_interior(Point{Rational(1, 2), 1}));
  EXPECT_TRUE(p.contains_in_interior(Point{Rational(1, 2), Rational(1, 2)}));
  EXPECT_NEAR(p.diameter(), std::sqrt(2.0), 1e-15);
}

TEST(Hull, CubeAndOctahedronVolumes) {
  std::vector<Point> cube;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) cube.push_back({x, y, z});
  cube.push_back({Rational(1, 2), Rational(1, 2), Rational(1, 2)});
  const auto c = convex_hull(cube);
  EXPECT_EQ(c.vertices().size(), 8u);
  EXPECT_EQ(c.volume(), Rational(1));
  // octahedron |x|+|y|+|z| <= 1 has volume 4/3
  const auto o = convex_hull(std::vector<Point>{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}});
  EXPECT_EQ(o.volume(), Rational(4, 3));
  EXPECT_EQ(o.facets().size(), 8u);
}

TEST(Hull, DegenerateInputsDropDimension) {
  const auto seg = convex_hull(std::vector<Point>{{0, 0}, {1, -1}, {Rational(1, 2), Rational(-1, 2)}});
  EXPECT_EQ(seg.affine_dim(), 1u);
  EXPECT_EQ(seg.vertices().size(), 2u);
  EXPECT_EQ(seg.volume(), Rational(0));
  const auto tri = convex_hull(std::vector<Point>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {Rational(1, 4), Rational(1, 4), 0}});
  EXPECT_EQ(tri.affine_dim(), 2u);
  EXPECT_EQ(tri.vertices().size(), 3u);
  EXPECT_THROW(convex_hull(std::vector<Point>{}), std::invalid_argument);
  EXPECT_THROW(convex_hull(std::vector<Point>{{0, 0, 0, 0}}), std::domain_error);
}

TEST(Simplex, EiffelVolumeMatchesDeterminantOracle) {
  for (long r = 2; r <= 6; ++r) {
    const auto sys = eiffel_system(r);
    const auto y = simplex_Y(sys);
    ASSERT_EQ(y.vertices().size(), 4u);
    // |det(v1, v2, v3)| / 6 with v_i = -l_i/(r-1)
    const Rational s = Rational(-1, r - 1);
    const RationalMatrix m = RationalMatrix::from_rows({s * sys.L()[1], s * sys.L()[2], s * sys.L()[3]});
    EXPECT_EQ(hull_volume(y), abs(m.determinant()) / 6);
    EXPECT_EQ(hull_volume(y), Rational(1, 3 * (r - 1) * (r - 1) * (r - 1)));
    EXPECT_TRUE(invariance_check(sys, y).invariant);
  }
  const AffineSystem aniso(ScalingMatrix(RationalMatrix::from_rows({{2, 0}, {0, 3}})), {{0, 0}, {Rational(1, 2), 0}},
                           {{0, 0}, {1, 0}});
  EXPECT_THROW(simplex_Y(aniso), std::domain_error);
}

TEST(Simplex, NestingOfSampledHulls) {
  for (long r : {2L, 3L}) {
    const auto sys = eiffel_system(r);
    const auto y = simplex_Y(sys);
    for (int n = 1; n <= 3; ++n) {
      const auto a = convex_hull(attractor_points(sys, MapSide::rho, n).points);
      const auto b = convex_hull(attractor_points(sys, MapSide::rho, n + 1).points);
      for (const auto& v : a.vertices()) {
        EXPECT_TRUE(b.contains(v));
        EXPECT_TRUE(y.contains(v));
      }
    }
  }
}

TEST(Simplex, InvarianceDetectsAWrongPolytope) {
  const auto sys = eiffel_system(3);
  const auto small = convex_hull(std::vector<Point>{{0, 0, 0}, {Rational(-1, 8), 0, 0}, {0, Rational(-1, 8), 0}, {0, 0, Rational(-1, 8)}});
  EXPECT_FALSE(invariance_check(sys, small).invariant);
}

TEST(Attractor, HutchinsonClosure) {
  const auto sys = eiffel_system(2);
  const auto imgs = orbit_points(sys, MapSide::sigma, 2).points;
  auto pool = orbit_points(sys, MapSide::sigma, 3).points;
  for (const auto& p : attractor_points(sys, MapSide::sigma, 3).points) pool.push_back(p);
  const auto h = convex_hull(pool);
  for (const auto& p : imgs) EXPECT_TRUE(h.contains(p));
}

TEST(Attractor, SigmaFixedPointsOfScale2LieInUnitInterval) {
  const auto pts = attractor_points(catalog_system("scale2"), MapSide::sigma, 3).points;
  EXPECT_EQ(pts.size(), 8u);  // fixed points k/7 for the 8 words of length 3
  for (const auto& p : pts) {
    EXPECT_GE(p[0], 0);
    EXPECT_LE(p[0], 1);
    EXPECT_TRUE(is_integer(p[0] * 7));
  }
}

TEST(Attractor, SidesParse) {
  EXPECT_EQ(parse_side("omega"), MapSide::omega);
  EXPECT_EQ(to_string(MapSide::tau), "tau");
  EXPECT_THROW(parse_side("delta"), std::invalid_argument);
}

TEST(Dimension, SimilarityScalings) {
  EXPECT_NEAR(*hausdorff_dimension(catalog_system("planar-collapse")), std::log(3.0) / std::log(6.0), 1e-12);
  EXPECT_NEAR(*hausdorff_dimension(eiffel_system(2)), 2.0, 1e-12);
  const AffineSystem aniso(ScalingMatrix(RationalMatrix::from_rows({{2, 0}, {0, 3}})), {{0, 0}, {Rational(1, 2), 0}},
                           {{0, 0}, {1, 0}});
  EXPECT_FALSE(hausdorff_dimension(aniso).has_value());
}

TEST(RhoHull, PlanarCollapseIsASegmentOnTheAntiDiagonal) {
  const auto y = rho_hull(catalog_system("planar-collapse"));
  EXPECT_EQ(y.affine_dim(), 1u);
  for (const auto& v : y.vertices()) EXPECT_EQ(v[0], -v[1]);
  Rational m = 0;
  for (const auto& v : y.vertices()) m = std::max(m, Rational(abs(v[0])));
  EXPECT_EQ(m, Rational(2, 15));
}
