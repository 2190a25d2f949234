#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfaffine/affine_system.hpp"
#include "selfaffine/attractor_geometry.hpp"

namespace selfaffine {

// Samples on a regular grid over a box in a k-dimensional affine frame
// t = origin + sum_i u_i axis_i (orthonormal axes), k <= 3. A full-dimensional
// grid uses the ambient coordinates directly.
class GridFunction {
 public:
  GridFunction(std::vector<double> lower, std::vector<double> upper, std::vector<std::size_t> resolution);
  GridFunction(Eigen::VectorXd origin, Eigen::MatrixXd axes, std::vector<double> lower, std::vector<double> upper,
               std::vector<std::size_t> resolution);

  // Grid over the hull Y: bounding box inflated by `inflation` on each side,
  // node spacing chosen so that 0 is a node when it lies inside.
  static GridFunction on_hull(const Polytope& hull, std::size_t resolution, double inflation = 0.05);

  std::size_t ambient_dim() const { return static_cast<std::size_t>(origin_.size()); }
  std::size_t param_dim() const { return lower_.size(); }
  std::size_t size() const { return values_.size(); }
  const std::vector<std::size_t>& resolution() const { return res_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double step(std::size_t axis) const;

  std::vector<double> node_param(std::size_t i) const;
  Eigen::VectorXd node(std::size_t i) const;
  double& value(std::size_t i) { return values_[i]; }
  double value(std::size_t i) const { return values_[i]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // Parameter coordinates of an ambient point (nullopt when off the frame).
  std::optional<std::vector<double>> to_param(const Eigen::VectorXd& t, double tol = 1e-9) const;
  bool in_box(std::span<const double> u, double tol = 1e-12) const;
  // Multilinear interpolation; throws std::out_of_range naming the point if outside.
  double operator()(const Eigen::VectorXd& t) const;
  double interpolate_param(std::span<const double> u) const;

  void fill(const std::function<double(const Eigen::VectorXd&)>& f);
  GridFunction same_grid(double value = 0.0) const;

 private:
  std::size_t index(std::span<const std::size_t> ijk) const;
  Eigen::VectorXd origin_;
  Eigen::MatrixXd axes_;  // ambient x k
  std::vector<double> lower_, upper_;
  std::vector<std::size_t> res_;
  std::vector<double> values_;
};

// (C Q)(t) = sum_l |chi_B(t - l)|^2 Q(R*^{-1}(t - l)) at every node.
GridFunction apply_C(const AffineSystem& sys, const GridFunction& q);

// sum_{n >= 0} |mu2_hat(t - n)|^2 = sin^2(pi t)/pi^2 * psi(-t),  psi(x) = sum_{n>=0} (x + n)^{-2}.
double lebesgue_Q(double t);

struct FixedPointResult {
  GridFunction q;
  std::vector<double> residuals;  // sup |C(Q_k) - Q_k|
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
};

FixedPointResult iterate_fixed_point(const AffineSystem& sys, const GridFunction& q0, int max_iters = 200,
                                     double tol = 1e-8);

// Closed form (pi/2R) sin(pi/(|R|-1)) + 1/R for R > 0 and
// pi/(2|R|) |sin(pi/(R^2-1))| + 1/|R| for R < 0.
double gamma_1d(long r, const Rational& b = Rational(1, 2));
// (1/r)(1 + 3 pi/(2 (r-1)^3) sin(pi/(r-1))).
double gamma_eiffel(long r);

struct MatrixNorms {
  double inverse_op = 0;  // ||R^{-1}||_op
  double inverse_hs = 0;  // ||R^{-1}||_hs
  double abs_det = 0;
  double max_l_norm = 0;
  double diam_B = 0;
};

struct ContractivityReport {
  double beta = 0;
  double beta_vertex = 0;  // same maximization restricted to vertices of Y
  bool beta_vertex_disagrees = false;  // differs by more than 1%
  double gamma_sup = 0;
  double gamma_L1 = 0;
  std::optional<double> gamma_L1_sharp;
  double nonoverlap_diagnostic = 0;  // N * F * vol(Y) chain
  double det_times_hs = 0;
  MatrixNorms norms;
};

MatrixNorms matrix_norms(const AffineSystem& sys);
// max over b, b', l of sup_{t in Y} |sin(2 pi (b - b').(t - l))|; vertex-only value in *vertex_value.
double sup_sin_over(const AffineSystem& sys, const Polytope& y, double* vertex_value = nullptr);
ContractivityReport gamma_supnorm(const AffineSystem& sys, const Polytope& y);

struct L1Bounds {
  double bound = 0;
  std::optional<double> sharp;  // only when Y and Y - l overlap in measure zero for all l != 0
};
L1Bounds gamma_L1(const AffineSystem& sys, const Polytope& y);

enum class GradFlavor { sup, L1 };
// |grad Q|_2 by central differences (one-sided at the box edge); the L1 flavor
// integrates with trapezoid weights over nodes inside `domain` when given.
double grad_norm(const GridFunction& q, GradFlavor flavor, const Polytope* domain = nullptr);

}  // namespace selfaffine
