#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfaffine/affine_system.hpp"
#include "selfaffine/fractal_measure.hpp"

namespace selfaffine {

// Digit indices (into L, or B for the B-side) from least significant up;
// trailing zero digits are dropped, so the empty word is lambda = 0.
struct DigitWord {
  std::vector<std::size_t> digits;
  bool operator==(const DigitWord&) const = default;
};

std::string to_string(const DigitWord& w);

struct SpectrumPoint {
  Point lambda;
  DigitWord word;
};

struct SpectrumEnumeration {
  int depth = 0;
  // Breadth-first by word length, then by digit index from the most significant digit.
  std::vector<SpectrumPoint> points;
  std::size_t collision_count = 0;
  // level_end[k] = number of points with word length <= k.
  std::vector<std::size_t> level_end;
  std::size_t dim = 0;
  std::vector<double> lambda_real;  // row-major floating copy of the points

  std::vector<Point> lambdas() const;
};

// Expansions sum_k M^k d_k with digits d_k, zero digit at zero_index.
SpectrumEnumeration enumerate_radix(const RationalMatrix& m, const std::vector<Point>& digits, std::size_t zero_index,
                                    int depth);
// P(L) = { l0 + R* l1 + ... }.
SpectrumEnumeration enumerate_P(const AffineSystem& sys, int depth);
// The B-side set { -(R b1 + R^2 b2 + ...) } from omega orbits of 0.
SpectrumEnumeration enumerate_B(const AffineSystem& sys, int depth);

// Radix decomposition in (R*, L); nullopt when lambda has no expansion of length
// <= max_depth or the expansion is ambiguous.
std::optional<DigitWord> digits_of(const AffineSystem& sys, const Point& lambda, int max_depth);
Point point_of(const AffineSystem& sys, const DigitWord& w);

struct GramReport {
  std::vector<Point> points;
  Eigen::MatrixXcd matrix;  // entry (i,j) = mu_hat(lambda_j - lambda_i)
  double max_tail_bound = 0;
  double max_off_diagonal = 0;
  std::size_t worst_i = 0, worst_j = 0;
  double max_diagonal_defect = 0;
};

GramReport gram_matrix(const FourierTransform& ft, std::span<const Point> points);
GramReport gram_matrix(const AffineSystem& sys, std::span<const Point> points, int fourier_depth = 0);

struct Q1Result {
  double partial_sum = 0;
  double increment = 0;  // contribution of the deepest level
  int p_depth = 0;
  double max_tail_bound = 0;
};

// Per-level partial sums of sum_lambda |mu_hat(t - lambda)|^2 for p_depth = 0..enum.depth.
std::vector<double> q1_profile(const FourierTransform& ft, const SpectrumEnumeration& pset, std::span<const double> t,
                               double* max_tail = nullptr);
Q1Result q1(const FourierTransform& ft, const SpectrumEnumeration& pset, std::span<const double> t, int p_depth);
Q1Result q1(const AffineSystem& sys, std::span<const double> t, int p_depth, int fourier_depth = 0);

struct CompletenessThresholds {
  double eps_pass = 0.02;
  double eps_fail = 0.05;
  double eps_conv = 1e-6;
  int depth_cap = 14;
  double fd_step = 1e-3;
};

enum class Verdict { basis_consistent, incomplete, indeterminate };
std::string to_string(Verdict v);

struct CompletenessPoint {
  std::vector<double> t;
  double partial_sum = 0;
  double increment = 0;
  int p_depth = 0;
  bool stabilized = false;
};

struct CompletenessReport {
  Verdict verdict = Verdict::indeterminate;
  std::vector<CompletenessPoint> points;
  double min_partial_sum = 0;
  std::vector<double> gradient_at_zero;  // central differences with one Richardson pass
  int depth_cap = 0;
};

// Digits of the candidate spectrum come from `spectrum_sys` (its L and R*), the
// measure from `ft`. Points are iterated level by level until the increment
// drops below eps_conv or the cap binds.
CompletenessReport completeness_test(const FourierTransform& ft, const AffineSystem& spectrum_sys,
                                     const std::vector<std::vector<double>>& grid,
                                     const CompletenessThresholds& th = {});
CompletenessReport completeness_test(const AffineSystem& sys, const std::vector<std::vector<double>>& grid,
                                     const CompletenessThresholds& th = {});

// Exact maximum clique for at most 64 candidates; edges are differences in Z.
std::vector<Rational> max_orthogonal_family(const ZeroSetPredicate& z, std::span<const Rational> candidates);
// Numeric edge test |mu_hat(lambda - lambda')| <= tol.
std::vector<Point> max_orthogonal_family(const FourierTransform& ft, std::span<const Point> candidates,
                                         double tol = 1e-8);
// Clique search on an explicit adjacency (bit j of adj[i] set iff i ~ j).
std::vector<std::size_t> max_clique(const std::vector<unsigned long long>& adj);

struct Discreteness {
  Rational min_distance_sq;
  double min_distance;  // +inf for a single point
};
Discreteness uniform_discreteness(const SpectrumEnumeration& e);

struct HardyComponent {
  DigitWord prefix;  // first n digits, zero-padded
  std::vector<std::pair<Point, std::complex<double>>> coefficients;  // keyed by the tail R*^{-n}(lambda - p_w)
};

std::vector<HardyComponent> hardy_embedding(const AffineSystem& sys, const SpectrumEnumeration& e,
                                            std::span<const std::complex<double>> coeffs, int n);

struct ProjectionCheck {
  int order = 0;
  std::size_t coordinate = 0;
  double fd_derivative = 0;  // Richardson-refined central difference of Q1 at 0
  double fd_raw = 0;
  double projection_side = 0;  // order 2: 8 pi^2 (|A x_j|^2 - |x_j|^2); order 1: 0
  double norm_x_sq = 0;
  double norm_Ax_sq = 0;
  double relative_discrepancy = 0;
};

ProjectionCheck projection_norm_checks(const ConvolutionMeasure& measure, const AffineSystem& spectrum_sys,
                                       std::size_t j, int order, int p_depth, double fd_step = 1e-3,
                                       int quadrature_depth = 14);

}  // namespace selfaffine
