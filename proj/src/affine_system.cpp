#include "selfaffine/affine_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace selfaffine {

namespace {

Eigen::MatrixXd to_eigen(const RationalMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).get_d();
  return out;
}

Eigen::VectorXd to_eigen(const Point& p) {
  Eigen::VectorXd v(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) v(i) = p[i].get_d();
  return v;
}

std::optional<std::size_t> find_zero(const std::vector<Point>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (is_zero(pts[i])) return i;
  }
  return std::nullopt;
}

void require_member(const std::vector<Point>& set, const Point& p, const char* what) {
  if (std::find(set.begin(), set.end(), p) == set.end()) {
    throw std::invalid_argument(std::string(what) + " digit " + to_string(p) + " is not in the digit set");
  }
}

std::complex<double> unit_phase(const Rational& phase) {
  // exp(i 2 pi phase) with the phase reduced mod 1 exactly first.
  const double f = frac(phase).get_d();
  return std::polar(1.0, 2.0 * std::numbers::pi * f);
}

}  // namespace

ScalingMatrix::ScalingMatrix(RationalMatrix entries) : m_(std::move(entries)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) throw StructuralError("R must be a nonempty square matrix");
  det_ = m_.determinant();
  if (det_ == 0) throw StructuralError("R is singular");
  inv_ = m_.inverse();
  adj_ = m_.transpose();
  adj_inv_ = inv_.transpose();
}

ScalingMatrix ScalingMatrix::scalar(std::size_t dim, const Rational& r) {
  return ScalingMatrix(RationalMatrix::identity(dim) * r);
}

std::vector<std::complex<double>> ScalingMatrix::eigenvalues() const {
  Eigen::EigenSolver<Eigen::MatrixXd> es(real(), false);
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

double ScalingMatrix::min_eigenvalue_modulus() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& z : eigenvalues()) m = std::min(m, std::abs(z));
  return m;
}

Eigen::MatrixXd ScalingMatrix::real() const { return to_eigen(m_); }
Eigen::MatrixXd ScalingMatrix::real_inverse() const { return to_eigen(inv_); }

AffineSystem::AffineSystem(ScalingMatrix r, std::vector<Point> b, std::vector<Point> l, std::string name)
    : r_(std::move(r)), b_(std::move(b)), l_(std::move(l)), name_(std::move(name)) {
  const std::size_t nu = r_.dim();
  if (b_.empty()) throw StructuralError("digit set B is empty");
  if (b_.size() != l_.size()) {
    throw StructuralError("#B = " + std::to_string(b_.size()) + " differs from #L = " + std::to_string(l_.size()));
  }
  for (const auto& p : b_)
    if (p.size() != nu) throw StructuralError("point " + to_string(p) + " in B has wrong dimension");
  for (const auto& p : l_)
    if (p.size() != nu) throw StructuralError("point " + to_string(p) + " in L has wrong dimension");
  for (const auto& p : b_) b_real_.push_back(to_eigen(p));
  for (const auto& p : l_) l_real_.push_back(to_eigen(p));
  adj_inv_real_ = to_eigen(r_.adjoint_inverse());
  inv_real_ = to_eigen(r_.inverse());
}

AffineSystem AffineSystem::scaled(const Rational& r) const {
  std::string nm = name_.empty() ? std::string{} : name_ + "*" + to_string(r);
  return AffineSystem(ScalingMatrix(r_.matrix() * r), b_, l_, nm);
}

AffineSystem AffineSystem::with_name(std::string name) const {
  return AffineSystem(r_, b_, l_, std::move(name));
}

std::optional<std::size_t> AffineSystem::zero_index_B() const { return find_zero(b_); }
std::optional<std::size_t> AffineSystem::zero_index_L() const { return find_zero(l_); }

std::vector<AxiomCheck> ValidationReport::checks() const {
  std::vector<AxiomCheck> out;
  out.push_back({"zero_in_B", zero_in_B, true, zero_in_B ? "0 in B" : "0 missing from B"});
  out.push_back({"zero_in_L", zero_in_L, true, zero_in_L ? "0 in L" : "0 missing from L"});
  {
    std::ostringstream w;
    w.precision(17);
    w << "min |eigenvalue| = " << min_eigenvalue_modulus;
    out.push_back({"expansive", expansive, true, w.str()});
  }
  {
    std::ostringstream w;
    w.precision(17);
    w << "defect = " << hadamard_defect;
    out.push_back({"hadamard", hadamard, true, w.str()});
  }
  {
    std::string w = "checked n = 1.." + std::to_string(n_check);
    if (!compatibility_failures.empty()) {
      const auto& f = compatibility_failures.front();
      w += "; n=" + std::to_string(f.n) + ", b#" + std::to_string(f.b_index) + ", l#" + std::to_string(f.l_index) +
           ": (R^n b).l = " + to_string(f.value) + " not integer (" + std::to_string(compatibility_failure_count) +
           " failures)";
    }
    out.push_back({"compatibility", compatible, true, w});
  }
  out.push_back({"L_integer", L_integer, false, L_integer ? "L in Z^nu" : "L not contained in Z^nu"});
  out.push_back({"L_spans", L_spans, false,
                 "rank of L\\{0} = " + std::to_string(L_rank) + " of " + std::to_string(dim)});
  out.push_back({"N_below_det", N_below_det, false,
                 "N = " + std::to_string(n) + ", |det R| = " + to_string(abs_det)});
  return out;
}

bool ValidationReport::passed() const {
  for (const auto& c : checks()) {
    if (c.mandatory && !c.passed) return false;
  }
  return true;
}

ValidationReport validate_system(const AffineSystem& sys, int n_check) {
  if (n_check < 1) throw std::invalid_argument("n_check must be positive");
  ValidationReport rep;
  rep.dim = sys.dim();
  rep.n = sys.size();
  rep.eigenvalues = sys.R().eigenvalues();
  rep.min_eigenvalue_modulus = sys.R().min_eigenvalue_modulus();
  rep.expansive = rep.min_eigenvalue_modulus > 1.0 + kExpansivityMargin;
  rep.zero_in_B = sys.zero_index_B().has_value();
  rep.zero_in_L = sys.zero_index_L().has_value();
  rep.hadamard_defect = unitarity_defect(hadamard_matrix(sys.B(), sys.L()));
  rep.hadamard = rep.hadamard_defect <= kUnitarityTolerance;

  rep.n_check = n_check;
  RationalMatrix power = sys.R().matrix();
  for (int n = 1; n <= n_check; ++n) {
    for (std::size_t i = 0; i < sys.size(); ++i) {
      const Point rb = power * sys.B()[i];
      for (std::size_t j = 0; j < sys.size(); ++j) {
        Rational v = dot(rb, sys.L()[j]);
        if (!is_integer(v)) {
          if (rep.compatibility_failures.size() < 8) rep.compatibility_failures.push_back({n, i, j, v});
          ++rep.compatibility_failure_count;
        }
      }
    }
    power = power * sys.R().matrix();
  }
  rep.compatible = rep.compatibility_failure_count == 0;

  rep.L_integer = true;
  std::vector<RationalVector> nonzero;
  for (const auto& l : sys.L()) {
    for (const auto& q : l) rep.L_integer = rep.L_integer && is_integer(q);
    if (!is_zero(l)) nonzero.push_back(l);
  }
  rep.L_rank = rank_of(nonzero);
  rep.L_spans = rep.L_rank == sys.dim();
  rep.abs_det = abs(sys.R().determinant());
  rep.N_below_det = Rational(static_cast<long>(sys.size())) < rep.abs_det;
  return rep;
}

Eigen::MatrixXcd hadamard_matrix(std::span<const Point> B, std::span<const Point> L) {
  if (B.size() != L.size()) {
    throw std::invalid_argument("hadamard_matrix: #B = " + std::to_string(B.size()) +
                                " differs from #L = " + std::to_string(L.size()));
  }
  const auto n = static_cast<Eigen::Index>(B.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXcd h(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) h(j, k) = scale * unit_phase(dot(B[j], L[k]));
  return h;
}

double unitarity_defect(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("unitarity_defect: matrix is not square");
  const Eigen::MatrixXcd d = h.adjoint() * h - Eigen::MatrixXcd::Identity(h.rows(), h.cols());
  return d.cwiseAbs().maxCoeff();
}

std::complex<double> chi_B(const AffineSystem& sys, std::span<const double> t) {
  if (t.size() != sys.dim()) throw std::invalid_argument("chi_B: dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> tv(t.data(), static_cast<Eigen::Index>(t.size()));
  std::complex<double> s = 0;
  for (const auto& b : sys.B_real()) s += std::polar(1.0, 2.0 * std::numbers::pi * b.dot(tv));
  return s / static_cast<double>(sys.size());
}

std::complex<double> chi_B(const AffineSystem& sys, const Point& t) {
  if (t.size() != sys.dim()) throw std::invalid_argument("chi_B: dimension mismatch");
  std::complex<double> s = 0;
  for (const auto& b : sys.B()) s += unit_phase(dot(b, t));
  return s / static_cast<double>(sys.size());
}

Eigen::VectorXd chi_B_sq_gradient(const AffineSystem& sys, std::span<const double> t) {
  // |chi|^2 = N^-2 sum_{b,b'} cos(2 pi (b - b').t)
  const Eigen::Map<const Eigen::VectorXd> tv(t.data(), static_cast<Eigen::Index>(t.size()));
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.dim()));
  for (const auto& b : sys.B_real())
    for (const auto& bp : sys.B_real()) {
      const Eigen::VectorXd d = b - bp;
      g -= 2.0 * std::numbers::pi * std::sin(2.0 * std::numbers::pi * d.dot(tv)) * d;
    }
  const double n = static_cast<double>(sys.size());
  return g / (n * n);
}

Point map_sigma(const AffineSystem& sys, const Point& b, const Point& x) {
  require_member(sys.B(), b, "B");
  return sys.R().inverse() * x + b;
}

Point map_rho(const AffineSystem& sys, const Point& l, const Point& t) {
  require_member(sys.L(), l, "L");
  return sys.R().adjoint_inverse() * (t - l);
}

Point map_tau(const AffineSystem& sys, const Point& l, const Point& x) {
  require_member(sys.L(), l, "L");
  return sys.R().adjoint() * x + l;
}

Point map_omega(const AffineSystem& sys, const Point& b, const Point& x) {
  require_member(sys.B(), b, "B");
  return sys.R().matrix() * (x - b);
}

Eigen::VectorXd map_rho(const AffineSystem& sys, std::size_t l_index, const Eigen::VectorXd& t) {
  return sys.adjoint_inverse_real() * (t - sys.L_real().at(l_index));
}

// ---- catalog ----

namespace {

Point pt(std::initializer_list<const char*> coords) {
  Point p;
  for (const char* c : coords) p.push_back(parse_rational(c));
  return p;
}

AffineSystem scale_system(long r, const char* name) {
  return AffineSystem(ScalingMatrix::scalar(1, r), {pt({"0"}), pt({"1/2"})}, {pt({"0"}), pt({"1"})}, name);
}

AffineSystem triadic_system() {
  return AffineSystem(ScalingMatrix::scalar(1, 3), {pt({"0"}), pt({"2/3"})}, {pt({"0"}), pt({"3/4"})}, "triadic");
}

AffineSystem planar_collapse_system() {
  return AffineSystem(ScalingMatrix::scalar(2, 6), {pt({"0", "0"}), pt({"1/2", "0"}), pt({"0", "1/2"})},
                      {pt({"0", "0"}), pt({"2/3", "-2/3"}), pt({"-2/3", "2/3"})}, "planar-collapse");
}

// Parses "name(arg, arg)" into name and arguments.
std::pair<std::string, std::vector<std::string>> split_call(std::string_view s) {
  const auto open = s.find('(');
  if (open == std::string_view::npos) return {std::string(s), {}};
  if (s.back() != ')') throw std::invalid_argument("malformed catalog name \"" + std::string(s) + "\"");
  std::string name(s.substr(0, open));
  std::vector<std::string> args;
  std::string_view inner = s.substr(open + 1, s.size() - open - 2);
  while (!inner.empty()) {
    const auto comma = inner.find(',');
    args.emplace_back(inner.substr(0, comma));
    if (comma == std::string_view::npos) break;
    inner.remove_prefix(comma + 1);
  }
  return {name, args};
}

long parse_long(const std::string& s) {
  const Rational q = parse_rational(s);
  if (!is_integer(q)) throw std::invalid_argument("expected an integer, got \"" + s + "\"");
  return q.get_num().get_si();
}

}  // namespace

AffineSystem eiffel_system(long r) {
  if (r < 2) throw std::invalid_argument("eiffel(r) needs integer r >= 2");
  return AffineSystem(ScalingMatrix::scalar(3, r),
                      {pt({"0", "0", "0"}), pt({"1/2", "0", "0"}), pt({"0", "1/2", "0"}), pt({"0", "0", "1/2"})},
                      {pt({"0", "0", "0"}), pt({"1", "1", "0"}), pt({"1", "0", "1"}), pt({"0", "1", "1"})},
                      "eiffel(" + std::to_string(r) + ")");
}

AffineSystem two_digit_system(long r, const Rational& b) {
  if (b == 0) throw std::invalid_argument("two-digit system needs b != 0");
  const Rational l = 1 / (2 * abs(b));
  return AffineSystem(ScalingMatrix::scalar(1, r), {Point{0}, Point{b}}, {Point{0}, Point{l}},
                      "two-digit(" + std::to_string(r) + "," + to_string(b) + ")");
}

std::vector<std::pair<std::string, AffineSystem>> builtin_catalog() {
  std::vector<std::pair<std::string, AffineSystem>> out;
  out.emplace_back("scale2", scale_system(2, "scale2"));
  out.emplace_back("scale4", scale_system(4, "scale4"));
  out.emplace_back("triadic", triadic_system());
  out.emplace_back("eiffel(2)", eiffel_system(2));
  out.emplace_back("planar-collapse", planar_collapse_system());
  out.emplace_back("two-digit(4,1/2)", two_digit_system(4, Rational(1, 2)));
  return out;
}

AffineSystem catalog_system(std::string_view name) {
  const auto [base, args] = split_call(name);
  if (base == "scale2" && args.empty()) return scale_system(2, "scale2");
  if (base == "scale4" && args.empty()) return scale_system(4, "scale4");
  if (base == "triadic" && args.empty()) return triadic_system();
  if (base == "planar-collapse" && args.empty()) return planar_collapse_system();
  if (base == "eiffel" && args.size() <= 1) return eiffel_system(args.empty() ? 2 : parse_long(args[0]));
  if (base == "two-digit" && args.size() == 2) return two_digit_system(parse_long(args[0]), parse_rational(args[1]));
  std::string msg = "unknown system \"" + std::string(name) + "\"; available:";
  for (const auto& [n, s] : builtin_catalog()) msg += " " + n;
  msg += " (parametrized: eiffel(r), two-digit(R,b))";
  throw std::invalid_argument(msg);
}

}  // namespace selfaffine
