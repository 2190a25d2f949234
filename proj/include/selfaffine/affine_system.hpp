#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "selfaffine/rational.hpp"

namespace selfaffine {

using Point = RationalVector;

// Malformed input (dimension mismatch, bad file). Distinct from an axiom failing.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kExpansivityMargin = 1e-9;
inline constexpr double kUnitarityTolerance = 1e-12;
inline constexpr int kDefaultCompatibilityDepth = 12;

class ScalingMatrix {
 public:
  // Throws StructuralError if not square or singular. Expansivity is not
  // enforced here; validate_system reports it.
  explicit ScalingMatrix(RationalMatrix entries);
  static ScalingMatrix scalar(std::size_t dim, const Rational& r);

  std::size_t dim() const { return m_.rows(); }
  const RationalMatrix& matrix() const { return m_; }
  const RationalMatrix& inverse() const { return inv_; }
  const RationalMatrix& adjoint() const { return adj_; }  // R*
  const RationalMatrix& adjoint_inverse() const { return adj_inv_; }  // R*^{-1}
  const Rational& determinant() const { return det_; }
  bool is_integer() const { return m_.is_integer(); }

  std::vector<std::complex<double>> eigenvalues() const;
  double min_eigenvalue_modulus() const;
  bool is_expansive() const { return min_eigenvalue_modulus() > 1.0 + kExpansivityMargin; }

  Eigen::MatrixXd real() const;
  Eigen::MatrixXd real_inverse() const;

 private:
  RationalMatrix m_, inv_, adj_, adj_inv_;
  Rational det_;
};

class AffineSystem {
 public:
  // Structural checks only: nonempty, #B == #L, every point of dimension nu.
  AffineSystem(ScalingMatrix r, std::vector<Point> b, std::vector<Point> l, std::string name = {});

  std::size_t dim() const { return r_.dim(); }
  std::size_t size() const { return b_.size(); }
  const ScalingMatrix& R() const { return r_; }
  const std::vector<Point>& B() const { return b_; }
  const std::vector<Point>& L() const { return l_; }
  const std::string& name() const { return name_; }

  // (rR, B, L)
  AffineSystem scaled(const Rational& r) const;
  AffineSystem with_name(std::string name) const;

  // Floating copies used by the numeric kernels.
  const std::vector<Eigen::VectorXd>& B_real() const { return b_real_; }
  const std::vector<Eigen::VectorXd>& L_real() const { return l_real_; }
  const Eigen::MatrixXd& adjoint_inverse_real() const { return adj_inv_real_; }
  const Eigen::MatrixXd& inverse_real() const { return inv_real_; }

  // Index of the zero vector in B / L, if present.
  std::optional<std::size_t> zero_index_B() const;
  std::optional<std::size_t> zero_index_L() const;

 private:
  ScalingMatrix r_;
  std::vector<Point> b_, l_;
  std::string name_;
  std::vector<Eigen::VectorXd> b_real_, l_real_;
  Eigen::MatrixXd adj_inv_real_, inv_real_;
};

struct CompatibilityFailure {
  int n;
  std::size_t b_index;
  std::size_t l_index;
  Rational value;  // (R^n b) . l
};

struct AxiomCheck {
  std::string name;
  bool passed;
  bool mandatory;
  std::string witness;
};

struct ValidationReport {
  std::size_t dim = 0;
  std::size_t n = 0;
  std::vector<std::complex<double>> eigenvalues;
  double min_eigenvalue_modulus = 0;
  bool expansive = false;
  bool zero_in_B = false;
  bool zero_in_L = false;
  double hadamard_defect = 0;
  bool hadamard = false;
  int n_check = kDefaultCompatibilityDepth;
  std::vector<CompatibilityFailure> compatibility_failures;  // first few only
  std::size_t compatibility_failure_count = 0;
  bool compatible = false;
  bool L_integer = false;
  std::size_t L_rank = 0;
  bool L_spans = false;
  Rational abs_det;
  bool N_below_det = false;

  std::vector<AxiomCheck> checks() const;
  // True iff every mandatory axiom passes.
  bool passed() const;
  // Structure + expansivity only; enough for geometry and gamma constants.
  bool structurally_sound() const { return zero_in_B && zero_in_L && expansive; }
};

ValidationReport validate_system(const AffineSystem& sys, int n_check = kDefaultCompatibilityDepth);

// Entry (j,k) = N^{-1/2} exp(i 2 pi b_j . l_k), phases reduced mod 1 exactly.
Eigen::MatrixXcd hadamard_matrix(std::span<const Point> B, std::span<const Point> L);
double unitarity_defect(const Eigen::MatrixXcd& h);

std::complex<double> chi_B(const AffineSystem& sys, std::span<const double> t);
std::complex<double> chi_B(const AffineSystem& sys, const Point& t);
// Analytic gradient of |chi_B|^2.
Eigen::VectorXd chi_B_sq_gradient(const AffineSystem& sys, std::span<const double> t);

// Exact maps. The digit must be a member of B (resp. L), else std::invalid_argument.
Point map_sigma(const AffineSystem& sys, const Point& b, const Point& x);  // R^{-1}x + b
Point map_rho(const AffineSystem& sys, const Point& l, const Point& t);    // R*^{-1}(t - l)
Point map_tau(const AffineSystem& sys, const Point& l, const Point& x);    // R* x + l
Point map_omega(const AffineSystem& sys, const Point& b, const Point& x);  // R(x - b)

// Floating rho_l, used on grids.
Eigen::VectorXd map_rho(const AffineSystem& sys, std::size_t l_index, const Eigen::VectorXd& t);

// Catalog: scale2, scale4, triadic, eiffel(r), planar-collapse, two-digit(R,b).
std::vector<std::pair<std::string, AffineSystem>> builtin_catalog();
AffineSystem catalog_system(std::string_view name);
AffineSystem eiffel_system(long r);
AffineSystem two_digit_system(long r, const Rational& b);

// System file format: {"dim": n, "R": [["p/q",..],..], "B": [[..]], "L": [[..]]}.
AffineSystem parse_system_json(std::string_view text);
AffineSystem load_system_file(const std::string& path);
std::string system_to_json(const AffineSystem& sys);

}  // namespace selfaffine
