#include "selfaffine/transfer_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace selfaffine {

namespace {

constexpr double kPi = std::numbers::pi;

std::string describe(const Eigen::VectorXd& t) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < t.size(); ++i) os << (i ? ", " : "") << t(i);
  os << ')';
  return os.str();
}

}  // namespace

GridFunction::GridFunction(std::vector<double> lower, std::vector<double> upper, std::vector<std::size_t> resolution)
    : GridFunction(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(upper.size())),
                   Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(upper.size()),
                                             static_cast<Eigen::Index>(upper.size())),
                   lower, upper, std::move(resolution)) {}

GridFunction::GridFunction(Eigen::VectorXd origin, Eigen::MatrixXd axes, std::vector<double> lower,
                           std::vector<double> upper, std::vector<std::size_t> resolution)
    : origin_(std::move(origin)),
      axes_(std::move(axes)),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      res_(std::move(resolution)) {
  const std::size_t k = lower_.size();
  if (k == 0 || k > 3) throw std::invalid_argument("grids support 1 to 3 parameter dimensions");
  if (upper_.size() != k || res_.size() != k || static_cast<std::size_t>(axes_.cols()) != k ||
      axes_.rows() != origin_.size()) {
    throw std::invalid_argument("grid: inconsistent dimensions");
  }
  std::size_t total = 1;
  for (std::size_t a = 0; a < k; ++a) {
    if (res_[a] < 8) throw std::invalid_argument("grid resolution must be >= 8 per axis");
    if (!(upper_[a] > lower_[a])) throw std::invalid_argument("grid box must have positive extent");
    total *= res_[a];
  }
  values_.assign(total, 0.0);
}

GridFunction GridFunction::on_hull(const Polytope& hull, std::size_t resolution, double inflation) {
  const std::size_t nu = hull.ambient_dim();
  const std::size_t k = hull.affine_dim();
  if (k == 0) throw std::invalid_argument("cannot grid a single point");
  if (k > 3) throw std::invalid_argument("grids support at most 3 parameter dimensions");
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nu));
  Eigen::MatrixXd axes(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(k));
  if (hull.full_dimensional()) {
    axes.setIdentity();
  } else {
    if (!hull.contains(Point(nu, Rational(0)))) {
      const std::vector<double> o = to_double(hull.origin());
      origin = Eigen::Map<const Eigen::VectorXd>(o.data(), static_cast<Eigen::Index>(nu));
    }
    for (std::size_t j = 0; j < k; ++j) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(nu));
      for (std::size_t r = 0; r < nu; ++r) v(static_cast<Eigen::Index>(r)) = hull.basis()[j][r].get_d();
      for (std::size_t i = 0; i < j; ++i) v -= axes.col(static_cast<Eigen::Index>(i)).dot(v) * axes.col(static_cast<Eigen::Index>(i));
      axes.col(static_cast<Eigen::Index>(j)) = v.normalized();
    }
  }
  std::vector<double> lo(k, std::numeric_limits<double>::infinity()), hi(k, -std::numeric_limits<double>::infinity());
  for (const auto& v : hull.vertices()) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(nu));
    for (std::size_t r = 0; r < nu; ++r) x(static_cast<Eigen::Index>(r)) = v[r].get_d();
    const Eigen::VectorXd u = axes.transpose() * (x - origin);
    for (std::size_t a = 0; a < k; ++a) {
      lo[a] = std::min(lo[a], u(static_cast<Eigen::Index>(a)));
      hi[a] = std::max(hi[a], u(static_cast<Eigen::Index>(a)));
    }
  }
  const Eigen::VectorXd zero_u = axes.transpose() * (-origin);
  std::vector<std::size_t> res(k, resolution);
  for (std::size_t a = 0; a < k; ++a) {
    const double w = hi[a] - lo[a];
    lo[a] -= inflation * w;
    hi[a] += inflation * w;
    const double z = zero_u(static_cast<Eigen::Index>(a));
    if (z >= lo[a] && z <= hi[a] && resolution >= 3) {
      // Shift the lattice so that 0 is a node; one spare step keeps hi covered.
      const double h = (hi[a] - lo[a]) / static_cast<double>(resolution - 2);
      const double new_lo = z - std::ceil((z - lo[a]) / h) * h;
      lo[a] = new_lo;
      hi[a] = new_lo + static_cast<double>(resolution - 1) * h;
    }
  }
  return GridFunction(origin, axes, lo, hi, res);
}

double GridFunction::step(std::size_t axis) const {
  return (upper_[axis] - lower_[axis]) / static_cast<double>(res_[axis] - 1);
}

std::size_t GridFunction::index(std::span<const std::size_t> ijk) const {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < res_.size(); ++a) idx = idx * res_[a] + ijk[a];
  return idx;
}

std::vector<double> GridFunction::node_param(std::size_t i) const {
  const std::size_t k = res_.size();
  std::vector<double> u(k);
  for (std::size_t a = k; a-- > 0;) {
    const std::size_t ia = i % res_[a];
    i /= res_[a];
    u[a] = ia + 1 == res_[a] ? upper_[a] : lower_[a] + static_cast<double>(ia) * step(a);
  }
  return u;
}

Eigen::VectorXd GridFunction::node(std::size_t i) const {
  const auto u = node_param(i);
  const Eigen::Map<const Eigen::VectorXd> uv(u.data(), static_cast<Eigen::Index>(u.size()));
  return origin_ + axes_ * uv;
}

std::optional<std::vector<double>> GridFunction::to_param(const Eigen::VectorXd& t, double tol) const {
  if (t.size() != origin_.size()) throw std::invalid_argument("grid: dimension mismatch");
  const Eigen::VectorXd d = t - origin_;
  const Eigen::VectorXd u = axes_.transpose() * d;
  if ((axes_ * u - d).norm() > tol * (1.0 + t.norm())) return std::nullopt;
  return std::vector<double>(u.data(), u.data() + u.size());
}

bool GridFunction::in_box(std::span<const double> u, double tol) const {
  for (std::size_t a = 0; a < res_.size(); ++a) {
    const double slack = tol * (upper_[a] - lower_[a]);
    if (u[a] < lower_[a] - slack || u[a] > upper_[a] + slack) return false;
  }
  return true;
}

double GridFunction::interpolate_param(std::span<const double> u) const {
  const std::size_t k = res_.size();
  if (u.size() != k) throw std::invalid_argument("grid: parameter dimension mismatch");
  if (!in_box(u, 1e-12)) {
    std::ostringstream os;
    os.precision(17);
    os << "point with grid coordinates (";
    for (std::size_t a = 0; a < k; ++a) os << (a ? ", " : "") << u[a];
    os << ") lies outside the grid box";
    throw std::out_of_range(os.str());
  }
  std::size_t cell[3];
  double frac[3];
  for (std::size_t a = 0; a < k; ++a) {
    const double h = step(a);
    const double x = (u[a] - lower_[a]) / h;
    const auto c = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, static_cast<double>(res_[a] - 2)));
    cell[a] = c;
    frac[a] = std::clamp(x - static_cast<double>(c), 0.0, 1.0);
  }
  double out = 0;
  std::size_t corner[3];
  for (std::size_t mask = 0; mask < (1u << k); ++mask) {
    double w = 1;
    for (std::size_t a = 0; a < k; ++a) {
      const bool up = mask >> a & 1u;
      corner[a] = cell[a] + (up ? 1 : 0);
      w *= up ? frac[a] : 1.0 - frac[a];
    }
    if (w != 0.0) out += w * values_[index(std::span<const std::size_t>(corner, k))];
  }
  return out;
}

double GridFunction::operator()(const Eigen::VectorXd& t) const {
  const auto u = to_param(t);
  if (!u) throw std::out_of_range("point " + describe(t) + " is off the grid's affine frame");
  try {
    return interpolate_param(*u);
  } catch (const std::out_of_range&) {
    throw std::out_of_range("point " + describe(t) + " lies outside the grid box");
  }
}

void GridFunction::fill(const std::function<double(const Eigen::VectorXd&)>& f) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = f(node(i));
}

GridFunction GridFunction::same_grid(double value) const {
  GridFunction g = *this;
  std::fill(g.values_.begin(), g.values_.end(), value);
  return g;
}

GridFunction apply_C(const AffineSystem& sys, const GridFunction& q) {
  if (q.ambient_dim() != sys.dim()) throw std::invalid_argument("apply_C: grid and system dimensions differ");
  GridFunction out = q.same_grid();
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Eigen::VectorXd t = q.node(i);
    double s = 0;
    for (std::size_t l = 0; l < sys.size(); ++l) {
      const Eigen::VectorXd tl = t - sys.L_real()[l];
      const double w = std::norm(chi_B(sys, std::span<const double>(tl.data(), static_cast<std::size_t>(tl.size()))));
      const Eigen::VectorXd img = sys.adjoint_inverse_real() * tl;
      try {
        s += w * q(img);
      } catch (const std::out_of_range& e) {
        throw std::out_of_range("grid box too small: rho_" + std::to_string(l) + " image " + describe(img) +
                                " of node " + describe(t) + " escapes (" + e.what() + ")");
      }
    }
    out.value(i) = s;
  }
  return out;
}

double lebesgue_Q(double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("lebesgue_Q: t must be finite");
  const double r = std::round(t);
  if (t == r) return t >= 0 ? 1.0 : 0.0;
  const double s = std::sin(kPi * (t - r));
  const double s2 = s * s;
  const long m = 64 + std::max(0L, static_cast<long>(std::ceil(t)));
  double sum = 0;
  for (long n = m - 1; n >= 0; --n) {
    const double d = t - static_cast<double>(n);
    if (std::abs(d) < 1e-4) {
      const double x = kPi * d;
      const double sinc = 1 - x * x / 6 + x * x * x * x / 120;
      sum += sinc * sinc;
    } else {
      sum += s2 / (kPi * kPi * d * d);
    }
  }
  // Euler-Maclaurin for sum_{k>=0} (x + k)^{-2}, x = m - t >= 64.
  const double x = static_cast<double>(m) - t;
  const double x2 = x * x;
  const double tail = 1 / x + 1 / (2 * x2) + 1 / (6 * x2 * x) - 1 / (30 * x2 * x2 * x) + 1 / (42 * x2 * x2 * x2 * x) -
                      1 / (30 * x2 * x2 * x2 * x2 * x);
  return sum + s2 / (kPi * kPi) * tail;
}

FixedPointResult iterate_fixed_point(const AffineSystem& sys, const GridFunction& q0, int max_iters, double tol) {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.dim()));
  double at_zero;
  try {
    at_zero = q0(zero);
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("iterate_fixed_point: grid does not cover t = 0");
  }
  if (std::abs(at_zero - 1.0) > 1e-9) throw std::invalid_argument("iterate_fixed_point: Q0(0) must equal 1");
  FixedPointResult r{q0, {}, false, false, 0};
  int growth = 0;
  for (int k = 0; k < max_iters; ++k) {
    GridFunction next = apply_C(sys, r.q);
    double res = 0;
    for (std::size_t i = 0; i < next.size(); ++i) res = std::max(res, std::abs(next.value(i) - r.q.value(i)));
    if (!r.residuals.empty() && res > r.residuals.back()) {
      ++growth;
    } else {
      growth = 0;
    }
    r.residuals.push_back(res);
    r.q = std::move(next);
    r.iterations = k + 1;
    if (res < tol) {
      r.converged = true;
      break;
    }
    if (growth >= 10) {
      r.diverged = true;
      break;
    }
  }
  return r;
}

double gamma_1d(long r, const Rational& b) {
  if (std::abs(r) <= 1) throw std::domain_error("gamma_1d needs |R| >= 2");
  if (b == 0) throw std::invalid_argument("gamma_1d needs b != 0");
  const double a = static_cast<double>(std::abs(r));
  if (r > 0) {
    // The sup of |sin| over the hull is 1 once pi/(R-1) passes pi/2.
    const double arg = std::min(kPi / (a - 1), kPi / 2);
    return kPi / (2 * a) * std::sin(arg) + 1 / a;
  }
  return kPi / (2 * a) * std::abs(std::sin(kPi / (a * a - 1))) + 1 / a;
}

double gamma_eiffel(long r) {
  if (r < 2) throw std::domain_error("gamma_eiffel needs integer r >= 2");
  const double rr = static_cast<double>(r);
  const double arg = std::min(kPi / (rr - 1), kPi / 2);
  return (1 + 3 * kPi / (2 * std::pow(rr - 1, 3)) * std::sin(arg)) / rr;
}

MatrixNorms matrix_norms(const AffineSystem& sys) {
  MatrixNorms n;
  const Eigen::MatrixXd inv = sys.inverse_real();
  n.inverse_op = Eigen::JacobiSVD<Eigen::MatrixXd>(inv).singularValues()(0);
  n.inverse_hs = inv.norm();
  n.abs_det = std::abs(sys.R().determinant().get_d());
  for (const auto& l : sys.L_real()) n.max_l_norm = std::max(n.max_l_norm, l.norm());
  for (const auto& b : sys.B_real())
    for (const auto& bp : sys.B_real()) n.diam_B = std::max(n.diam_B, (b - bp).norm());
  return n;
}

namespace {

// sup |sin| over [lo, hi]
double sup_abs_sin(double lo, double hi) {
  const double k = std::ceil((lo - kPi / 2) / kPi);
  if (kPi / 2 + k * kPi <= hi) return 1.0;
  return std::max(std::abs(std::sin(lo)), std::abs(std::sin(hi)));
}

}  // namespace

double sup_sin_over(const AffineSystem& sys, const Polytope& y, double* vertex_value) {
  // A linear functional maps Y onto the interval spanned by its vertex values.
  double best = 0, best_vertex = 0;
  for (std::size_t i = 0; i < sys.size(); ++i)
    for (std::size_t j = 0; j < sys.size(); ++j) {
      if (i == j) continue;
      const Point db = sys.B()[i] - sys.B()[j];
      for (const auto& l : sys.L()) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& v : y.vertices()) {
          // 2 pi (db).(v - l), with the rational phase reduced exactly first
          const Rational ph = dot(db, v - l);
          const double x = 2 * kPi * ph.get_d();
          lo = std::min(lo, x);
          hi = std::max(hi, x);
          best_vertex = std::max(best_vertex, std::abs(std::sin(2 * kPi * frac(ph).get_d())));
        }
        best = std::max(best, sup_abs_sin(lo, hi));
      }
    }
  if (vertex_value) *vertex_value = best_vertex;
  return best;
}

namespace {

bool nonoverlapping(const AffineSystem& sys, const Polytope& y) {
  if (!y.full_dimensional()) return true;
  std::vector<Point> diffs;
  for (const auto& v : y.vertices())
    for (const auto& w : y.vertices()) diffs.push_back(v - w);
  const Polytope body = convex_hull(diffs);
  for (const auto& l : sys.L()) {
    if (!is_zero(l) && body.contains_in_interior(l)) return false;
  }
  return true;
}

}  // namespace

ContractivityReport gamma_supnorm(const AffineSystem& sys, const Polytope& y) {
  if (y.ambient_dim() != sys.dim()) throw std::invalid_argument("gamma_supnorm: hull dimension differs");
  ContractivityReport rep;
  rep.norms = matrix_norms(sys);
  const auto& nm = rep.norms;
  const double n = static_cast<double>(sys.size());
  const double s = sup_sin_over(sys, y, &rep.beta_vertex);
  rep.beta = 2 * kPi * nm.diam_B * s;
  rep.beta_vertex = 2 * kPi * nm.diam_B * rep.beta_vertex;
  rep.beta_vertex_disagrees = std::abs(rep.beta - rep.beta_vertex) > 0.01 * std::max(rep.beta, 1e-300);
  rep.gamma_sup = (n - 1) * (n - 1) / n * rep.beta * nm.inverse_op * nm.max_l_norm + nm.inverse_hs;
  const L1Bounds l1 = gamma_L1(sys, y);
  rep.gamma_L1 = l1.bound;
  rep.gamma_L1_sharp = l1.sharp;
  rep.det_times_hs = nm.abs_det * nm.inverse_hs;
  const double f = (1 - 1 / n) * rep.beta * nm.inverse_op * nm.max_l_norm + nm.inverse_hs;
  rep.nonoverlap_diagnostic = n * f * y.volume().get_d();
  return rep;
}

L1Bounds gamma_L1(const AffineSystem& sys, const Polytope& y) {
  const MatrixNorms nm = matrix_norms(sys);
  const double n = static_cast<double>(sys.size());
  const double beta = 2 * kPi * nm.diam_B * sup_sin_over(sys, y);
  const double first = (1 - 1 / n) * beta * nm.inverse_op * nm.max_l_norm;
  L1Bounds out;
  out.bound = nm.abs_det * (first + n * nm.inverse_hs);
  if (nonoverlapping(sys, y)) out.sharp = nm.abs_det * (first + nm.inverse_hs);
  return out;
}

double grad_norm(const GridFunction& q, GradFlavor flavor, const Polytope* domain) {
  const std::size_t k = q.param_dim();
  const auto& res = q.resolution();
  std::vector<std::size_t> stride(k, 1);
  for (std::size_t a = k - 1; a-- > 0;) stride[a] = stride[a + 1] * res[a + 1];
  double sup = 0, integral = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (domain) {
      const Eigen::VectorXd x = q.node(i);
      if (!domain->contains_approx(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), 1e-9))
        continue;
    }
    double g2 = 0, w = 1;
    for (std::size_t a = 0; a < k; ++a) {
      const std::size_t ia = (i / stride[a]) % res[a];
      const double h = q.step(a);
      double d;
      if (ia == 0) {
        d = (q.value(i + stride[a]) - q.value(i)) / h;
      } else if (ia + 1 == res[a]) {
        d = (q.value(i) - q.value(i - stride[a])) / h;
      } else {
        d = (q.value(i + stride[a]) - q.value(i - stride[a])) / (2 * h);
      }
      g2 += d * d;
      w *= (ia == 0 || ia + 1 == res[a]) ? h / 2 : h;
    }
    const double g = std::sqrt(g2);
    sup = std::max(sup, g);
    integral += w * g;
  }
  return flavor == GradFlavor::sup ? sup : integral;
}

}  // namespace selfaffine
