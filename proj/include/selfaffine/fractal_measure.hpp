#pragma once

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "selfaffine/affine_system.hpp"

namespace selfaffine {

inline constexpr double kDefaultTailTolerance = 1e-10;
inline constexpr int kMaxFourierDepth = 200;

struct FourierEvaluation {
  std::complex<double> value;
  int truncation_depth = 0;
  double tail_bound = 0;
};

// Product  mu_hat(t) = prod_n chi_B(R*^{-n} t)  with a geometric tail bound.
class FourierEvaluator {
 public:
  // Throws std::domain_error if no power of R*^{-1} up to 8 contracts.
  explicit FourierEvaluator(AffineSystem sys, double tol = kDefaultTailTolerance, int cap = kMaxFourierDepth);

  FourierEvaluation operator()(std::span<const double> t) const;  // adaptive depth
  FourierEvaluation evaluate(std::span<const double> t, int depth) const;
  double tail_bound(double t_norm, int depth) const;
  int adaptive_depth(double t_norm) const;

  const AffineSystem& system() const { return sys_; }
  int kappa() const { return kappa_; }
  double rho() const { return rho_; }
  double c() const { return c_; }

 private:
  AffineSystem sys_;
  double tol_;
  int cap_;
  int kappa_ = 1;
  double rho_ = 0, c_ = 1, max_b_ = 0;
  std::vector<double> adj_inv_;  // row-major R*^{-1}
  std::vector<double> b_;        // N x nu, row-major
};

FourierEvaluation mu_hat(const AffineSystem& sys, std::span<const double> t, int depth);
FourierEvaluation mu_hat_adaptive(const AffineSystem& sys, std::span<const double> t,
                                  double tol = kDefaultTailTolerance, int cap = kMaxFourierDepth);

// A Fourier transform of some probability measure, as a callable.
using FourierTransform = std::function<FourierEvaluation(std::span<const double>)>;
FourierTransform fourier_transform(const AffineSystem& sys, double tol = kDefaultTailTolerance,
                                   int cap = kMaxFourierDepth);
// Transform of the convolution: pointwise product, tail bounds add.
FourierTransform convolve(FourierTransform a, FourierTransform b);

std::complex<double> mu2_closed_form(double t);

class MomentTable {
 public:
  const Rational& at(const std::vector<int>& k) const;
  std::size_t size() const { return m_.size(); }
  int k_max() const { return k_max_; }
  const std::map<std::vector<int>, Rational>& entries() const { return m_; }

 private:
  friend MomentTable moments(const AffineSystem& sys, int k_max);
  std::map<std::vector<int>, Rational> m_;
  int k_max_ = 0;
};

// Exact moments  int x^k dmu  for |k| <= k_max.
MomentTable moments(const AffineSystem& sys, int k_max);

// Visits the N^depth atoms sigma_w(0), each of weight N^{-depth}.
void for_each_atom(const AffineSystem& sys, int depth, const std::function<void(std::span<const double>)>& visit);

double integrate(const AffineSystem& sys, const std::function<double(std::span<const double>)>& f, int depth);
std::complex<double> integrate_complex(const AffineSystem& sys,
                                       const std::function<std::complex<double>(std::span<const double>)>& f,
                                       int depth);

// Diameter of the support hull (from depth-n sigma fixed points).
double support_diameter(const AffineSystem& sys, int depth = 4);

// Symbolic zero set of a two-digit measure: Z = { R^n (2Z+1) / (2b) : n >= 0 }.
struct ZeroSetPredicate {
  std::string tag;
  long scale;  // R
  Rational b;
};

ZeroSetPredicate zero_set_predicate(std::string_view tag);  // mu2 | mu4 | mu3
ZeroSetPredicate zero_set_predicate(const AffineSystem& two_digit);
bool zero_set_member(const ZeroSetPredicate& z, const Rational& t);

struct GrowthSample {
  double t;
  double s;
  double norm_sq;  // int |e^{i2pi(t+is)x}|^2 dmu
  double bound;    // e^{4 pi m |s|}
  bool ok;
};

struct GrowthReport {
  double diameter;
  std::vector<GrowthSample> samples;
  bool ok = true;
};

// One-dimensional systems; samples are (t, s) pairs with |s| <= 2.
GrowthReport growth_bound_check(const AffineSystem& sys, std::span<const std::pair<double, double>> samples,
                                int depth = 12);

// Convolution of self-affine measures sharing the ambient dimension.
class ConvolutionMeasure {
 public:
  explicit ConvolutionMeasure(std::vector<AffineSystem> factors);

  std::size_t dim() const { return factors_.front().dim(); }
  const std::vector<AffineSystem>& factors() const { return factors_; }
  FourierTransform transform(double tol = kDefaultTailTolerance, int cap = kMaxFourierDepth) const;

  // int x_j^2 d(mu_1 * ... * mu_k), exact.
  Rational coordinate_second_moment(std::size_t j) const;
  // < e_lambda | x_j > = int x_j e^{-i 2 pi lambda.x} dmu, by atom quadrature.
  std::complex<double> coordinate_inner_product(std::size_t j, std::span<const double> lambda, int depth) const;

 private:
  std::vector<AffineSystem> factors_;
};

}  // namespace selfaffine
