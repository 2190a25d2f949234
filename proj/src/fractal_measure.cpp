#include "selfaffine/fractal_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "selfaffine/attractor_geometry.hpp"

namespace selfaffine {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double op_norm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

FourierEvaluator::FourierEvaluator(AffineSystem sys, double tol, int cap)
    : sys_(std::move(sys)), tol_(tol), cap_(cap) {
  if (!(tol > 0)) throw std::invalid_argument("Fourier tail tolerance must be positive");
  if (cap < 1) throw std::invalid_argument("Fourier depth cap must be >= 1");
  const Eigen::MatrixXd a = sys_.adjoint_inverse_real();
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  double c = 1.0;  // max ||A^j||, j < kappa
  bool found = false;
  for (int k = 1; k <= 8; ++k) {
    power = power * a;
    const double n = op_norm(power);
    if (n < 1.0) {
      kappa_ = k;
      rho_ = n;
      found = true;
      break;
    }
    c = std::max(c, n);
  }
  if (!found) throw std::domain_error("R is not expansive: no power of R*^{-1} up to 8 contracts");
  c_ = c;
  for (const auto& b : sys_.B_real()) max_b_ = std::max(max_b_, b.norm());
  const std::size_t nu = sys_.dim();
  adj_inv_.resize(nu * nu);
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < nu; ++j) adj_inv_[i * nu + j] = a(i, j);
  for (const auto& b : sys_.B_real())
    for (std::size_t j = 0; j < nu; ++j) b_.push_back(b(j));
}

double FourierEvaluator::tail_bound(double t_norm, int depth) const {
  // sum_{n >= d} rho^{floor(n / kappa)}
  const int q = depth / kappa_;
  const int r = depth % kappa_;
  const double tail = (kappa_ - r) * std::pow(rho_, q) + kappa_ * std::pow(rho_, q + 1) / (1.0 - rho_);
  return kTwoPi * max_b_ * c_ * t_norm * tail;
}

int FourierEvaluator::adaptive_depth(double t_norm) const {
  int d = 1;
  while (d < cap_ && tail_bound(t_norm, d) >= tol_) ++d;
  return d;
}

FourierEvaluation FourierEvaluator::evaluate(std::span<const double> t, int depth) const {
  const std::size_t nu = sys_.dim();
  if (t.size() != nu) throw std::invalid_argument("mu_hat: dimension mismatch");
  if (depth < 1) throw std::invalid_argument("mu_hat: depth must be >= 1");
  const std::size_t n = sys_.size();
  std::vector<double> s(t.begin(), t.end()), next(nu);
  double norm = 0;
  for (double x : s) norm += x * x;
  norm = std::sqrt(norm);
  std::complex<double> value = 1.0;
  for (int k = 0; k < depth; ++k) {
    std::complex<double> chi = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double phase = 0;
      for (std::size_t j = 0; j < nu; ++j) phase += b_[i * nu + j] * s[j];
      chi += std::polar(1.0, kTwoPi * phase);
    }
    value *= chi / static_cast<double>(n);
    for (std::size_t i = 0; i < nu; ++i) {
      double acc = 0;
      for (std::size_t j = 0; j < nu; ++j) acc += adj_inv_[i * nu + j] * s[j];
      next[i] = acc;
    }
    std::swap(s, next);
  }
  return {value, depth, tail_bound(norm, depth)};
}

FourierEvaluation FourierEvaluator::operator()(std::span<const double> t) const {
  double norm = 0;
  for (double x : t) norm += x * x;
  return evaluate(t, adaptive_depth(std::sqrt(norm)));
}

FourierEvaluation mu_hat(const AffineSystem& sys, std::span<const double> t, int depth) {
  return FourierEvaluator(sys).evaluate(t, depth);
}

FourierEvaluation mu_hat_adaptive(const AffineSystem& sys, std::span<const double> t, double tol, int cap) {
  return FourierEvaluator(sys, tol, cap)(t);
}

FourierTransform fourier_transform(const AffineSystem& sys, double tol, int cap) {
  auto ev = std::make_shared<const FourierEvaluator>(sys, tol, cap);
  return [ev](std::span<const double> t) { return (*ev)(t); };
}

FourierTransform convolve(FourierTransform a, FourierTransform b) {
  return [a = std::move(a), b = std::move(b)](std::span<const double> t) {
    const FourierEvaluation x = a(t);
    const FourierEvaluation y = b(t);
    return FourierEvaluation{x.value * y.value, std::max(x.truncation_depth, y.truncation_depth),
                             x.tail_bound + y.tail_bound};
  };
}

std::complex<double> mu2_closed_form(double t) {
  if (t == 0.0) return 1.0;
  const double pt = std::numbers::pi * t;
  return std::polar(1.0, pt) * (std::sin(pt) / pt);
}

// ---- moments ----

namespace {

using Monomial = std::vector<int>;
using Polynomial = std::map<Monomial, Rational>;

Polynomial multiply(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      Monomial m(ma.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      out[m] += ca * cb;
    }
  return out;
}

void monomials_of_degree(std::size_t nu, int d, Monomial& cur, std::size_t pos, std::vector<Monomial>& out) {
  if (pos + 1 == nu) {
    cur[pos] = d;
    out.push_back(cur);
    return;
  }
  for (int k = d; k >= 0; --k) {
    cur[pos] = k;
    monomials_of_degree(nu, d - k, cur, pos + 1, out);
  }
}

int degree(const Monomial& m) {
  int d = 0;
  for (int k : m) d += k;
  return d;
}

}  // namespace

const Rational& MomentTable::at(const std::vector<int>& k) const {
  const auto it = m_.find(k);
  if (it == m_.end()) throw std::out_of_range("moment index outside the table");
  return it->second;
}

MomentTable moments(const AffineSystem& sys, int k_max) {
  if (k_max < 0) throw std::invalid_argument("k_max must be nonnegative");
  const std::size_t nu = sys.dim();
  const std::size_t n = sys.size();
  const RationalMatrix& a = sys.R().inverse();
  // Linear forms y_j = sum_i A_ji x_i + b_j for each digit b.
  std::vector<std::vector<Polynomial>> forms(n, std::vector<Polynomial>(nu));
  for (std::size_t d = 0; d < n; ++d)
    for (std::size_t j = 0; j < nu; ++j) {
      Polynomial& p = forms[d][j];
      for (std::size_t i = 0; i < nu; ++i) {
        if (a(j, i) == 0) continue;
        Monomial m(nu, 0);
        m[i] = 1;
        p[m] += a(j, i);
      }
      if (sys.B()[d][j] != 0) p[Monomial(nu, 0)] += sys.B()[d][j];
    }

  MomentTable table;
  table.k_max_ = k_max;
  table.m_[Monomial(nu, 0)] = 1;
  const Rational inv_n(1, static_cast<long>(n));
  for (int deg = 1; deg <= k_max; ++deg) {
    std::vector<Monomial> mons;
    Monomial cur(nu, 0);
    monomials_of_degree(nu, deg, cur, 0, mons);
    const std::size_t sz = mons.size();
    RationalMatrix lhs = RationalMatrix::identity(sz);
    RationalVector rhs(sz, Rational(0));
    for (std::size_t r = 0; r < sz; ++r) {
      for (std::size_t d = 0; d < n; ++d) {
        Polynomial prod{{Monomial(nu, 0), Rational(1)}};
        for (std::size_t j = 0; j < nu; ++j)
          for (int e = 0; e < mons[r][j]; ++e) prod = multiply(prod, forms[d][j]);
        for (const auto& [m, coef] : prod) {
          if (coef == 0) continue;
          if (degree(m) < deg) {
            rhs[r] += inv_n * coef * table.m_.at(m);
          } else {
            const auto col = std::find(mons.begin(), mons.end(), m) - mons.begin();
            lhs(r, static_cast<std::size_t>(col)) -= inv_n * coef;
          }
        }
      }
    }
    const RationalVector sol = solve(lhs, rhs);
    for (std::size_t r = 0; r < sz; ++r) table.m_[mons[r]] = sol[r];
  }
  return table;
}

// ---- quadrature ----

void for_each_atom(const AffineSystem& sys, int depth, const std::function<void(std::span<const double>)>& visit) {
  if (depth < 0) throw std::invalid_argument("quadrature depth must be nonnegative");
  const std::size_t nu = sys.dim();
  const std::size_t n = sys.size();
  // shifts[k][d] = A^k b_d, A = R^{-1}
  std::vector<std::vector<Eigen::VectorXd>> shifts(static_cast<std::size_t>(depth));
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(nu));
  for (int k = 0; k < depth; ++k) {
    for (const auto& b : sys.B_real()) shifts[static_cast<std::size_t>(k)].push_back(power * b);
    power = power * sys.inverse_real();
  }
  std::vector<Eigen::VectorXd> partial(static_cast<std::size_t>(depth) + 1,
                                       Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nu)));
  // partial[k] holds b_{w1} + A b_{w2} + ... + A^{k-1} b_{wk}
  std::function<void(std::size_t)> walk = [&](std::size_t level) {
    if (level == static_cast<std::size_t>(depth)) {
      visit(std::span<const double>(partial[level].data(), nu));
      return;
    }
    for (std::size_t d = 0; d < n; ++d) {
      partial[level + 1] = partial[level] + shifts[level][d];
      walk(level + 1);
    }
  };
  walk(0);
}

double integrate(const AffineSystem& sys, const std::function<double(std::span<const double>)>& f, int depth) {
  double sum = 0;
  std::size_t count = 0;
  for_each_atom(sys, depth, [&](std::span<const double> x) {
    sum += f(x);
    ++count;
  });
  return sum / static_cast<double>(count);
}

std::complex<double> integrate_complex(const AffineSystem& sys,
                                       const std::function<std::complex<double>(std::span<const double>)>& f,
                                       int depth) {
  std::complex<double> sum = 0;
  std::size_t count = 0;
  for_each_atom(sys, depth, [&](std::span<const double> x) {
    sum += f(x);
    ++count;
  });
  return sum / static_cast<double>(count);
}

double support_diameter(const AffineSystem& sys, int depth) {
  const auto sample = attractor_points(sys, MapSide::sigma, depth);
  const auto& pts = sample.points;
  std::vector<std::vector<double>> p;
  for (const auto& q : pts) p.push_back(to_double(q));
  double best = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      double s = 0;
      for (std::size_t k = 0; k < p[i].size(); ++k) s += (p[i][k] - p[j][k]) * (p[i][k] - p[j][k]);
      best = std::max(best, s);
    }
  return std::sqrt(best);
}

// ---- zero sets ----

ZeroSetPredicate zero_set_predicate(std::string_view tag) {
  if (tag == "mu2") return {"mu2", 2, Rational(1, 2)};
  if (tag == "mu4") return {"mu4", 4, Rational(1, 2)};
  if (tag == "mu3") return {"mu3", 3, Rational(2, 3)};
  throw std::invalid_argument("unknown zero-set tag \"" + std::string(tag) + "\" (mu2|mu4|mu3)");
}

ZeroSetPredicate zero_set_predicate(const AffineSystem& sys) {
  const auto zb = sys.zero_index_B();
  if (sys.dim() != 1 || sys.size() != 2 || !zb || !is_integer(sys.R().matrix()(0, 0))) {
    throw std::invalid_argument("symbolic zero sets need a one-dimensional system with B = {0, b} and integer R");
  }
  const Rational b = sys.B()[1 - *zb][0];
  return {sys.name().empty() ? std::string("two-digit") : sys.name(), sys.R().matrix()(0, 0).get_num().get_si(), b};
}

bool zero_set_member(const ZeroSetPredicate& z, const Rational& t) {
  if (z.scale == 0 || z.b == 0) throw std::invalid_argument("degenerate zero-set predicate");
  // t in Z  iff  2 b t = R^n * odd for some n >= 0.
  const Rational u = 2 * z.b * t;
  if (!is_integer(u) || u == 0) return false;
  mpz_class v = u.get_num();
  const mpz_class r = std::abs(z.scale);
  while (true) {
    if (mpz_odd_p(v.get_mpz_t())) return true;
    if (r == 1 || !mpz_divisible_p(v.get_mpz_t(), r.get_mpz_t())) return false;
    v /= r;
  }
}

GrowthReport growth_bound_check(const AffineSystem& sys, std::span<const std::pair<double, double>> samples,
                                int depth) {
  if (sys.dim() != 1) throw std::invalid_argument("growth_bound_check is one-dimensional");
  GrowthReport rep;
  rep.diameter = support_diameter(sys);
  for (const auto& [t, s] : samples) {
    if (std::abs(s) > 2.0) throw std::invalid_argument("growth samples need |Im| <= 2");
    const double ss = s;
    const double norm = integrate(sys, [ss](std::span<const double> x) { return std::exp(-2.0 * kTwoPi * ss * x[0]); },
                                  depth);
    const double bound = std::exp(2.0 * kTwoPi * rep.diameter * std::abs(s));
    const bool ok = norm <= bound * (1 + 1e-12);
    rep.samples.push_back({t, s, norm, bound, ok});
    rep.ok = rep.ok && ok;
  }
  return rep;
}

// ---- convolution ----

ConvolutionMeasure::ConvolutionMeasure(std::vector<AffineSystem> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("convolution needs at least one factor");
  for (const auto& f : factors_)
    if (f.dim() != factors_.front().dim()) throw std::invalid_argument("convolution factors differ in dimension");
}

FourierTransform ConvolutionMeasure::transform(double tol, int cap) const {
  FourierTransform out = fourier_transform(factors_.front(), tol, cap);
  for (std::size_t i = 1; i < factors_.size(); ++i) out = convolve(out, fourier_transform(factors_[i], tol, cap));
  return out;
}

Rational ConvolutionMeasure::coordinate_second_moment(std::size_t j) const {
  const std::size_t nu = dim();
  if (j >= nu) throw std::out_of_range("coordinate index");
  std::vector<Rational> m1, m2;
  for (const auto& f : factors_) {
    const MomentTable t = moments(f, 2);
    std::vector<int> e1(nu, 0), e2(nu, 0);
    e1[j] = 1;
    e2[j] = 2;
    m1.push_back(t.at(e1));
    m2.push_back(t.at(e2));
  }
  Rational s = 0;
  for (std::size_t a = 0; a < factors_.size(); ++a) {
    s += m2[a];
    for (std::size_t b = 0; b < factors_.size(); ++b)
      if (a != b) s += m1[a] * m1[b];
  }
  return s;
}

std::complex<double> ConvolutionMeasure::coordinate_inner_product(std::size_t j, std::span<const double> lambda,
                                                                  int depth) const {
  const std::size_t nu = dim();
  if (j >= nu || lambda.size() != nu) throw std::invalid_argument("coordinate_inner_product: bad index or dimension");
  // int (x1 + ... + xk)_j e(x1 + ... + xk) = sum_a [int x_j e dmu_a] prod_{b != a} [int e dmu_b]
  std::vector<std::complex<double>> plain, weighted;
  for (const auto& f : factors_) {
    std::complex<double> p = 0, w = 0;
    std::size_t count = 0;
    for_each_atom(f, depth, [&](std::span<const double> x) {
      double phase = 0;
      for (std::size_t i = 0; i < nu; ++i) phase += lambda[i] * x[i];
      const std::complex<double> e = std::polar(1.0, -kTwoPi * phase);
      p += e;
      w += x[j] * e;
      ++count;
    });
    plain.push_back(p / static_cast<double>(count));
    weighted.push_back(w / static_cast<double>(count));
  }
  std::complex<double> total = 0;
  for (std::size_t a = 0; a < factors_.size(); ++a) {
    std::complex<double> term = weighted[a];
    for (std::size_t b = 0; b < factors_.size(); ++b)
      if (a != b) term *= plain[b];
    total += term;
  }
  return total;
}

}  // namespace selfaffine
