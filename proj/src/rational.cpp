#include "selfaffine/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace selfaffine {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  const auto slash = s.find('/');
  std::string_view num = s.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : s.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den)) {
    throw std::invalid_argument("not an exact rational: \"" + std::string(text) + "\"");
  }
  mpz_class p(std::string(num), 10);
  mpz_class q(std::string(den), 10);
  if (q == 0) throw std::invalid_argument("zero denominator: \"" + std::string(text) + "\"");
  Rational r(p, q);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const RationalVector& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += to_string(v[i]);
  }
  return out + ")";
}

double to_double(const Rational& q) { return q.get_d(); }

std::vector<double> to_double(std::span<const Rational> v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& q : v) out.push_back(q.get_d());
  return out;
}

Rational from_double(double x) { return Rational(x); }

bool is_integer(const Rational& q) { return q.get_den() == 1; }

Rational frac(const Rational& q) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return q - Rational(fl);
}

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RationalVector operator+(const RationalVector& a, const RationalVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector add: dimension mismatch");
  RationalVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

RationalVector operator-(const RationalVector& a, const RationalVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector sub: dimension mismatch");
  RationalVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

RationalVector operator*(const Rational& s, const RationalVector& v) {
  RationalVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
  return out;
}

bool is_zero(std::span<const Rational> v) {
  for (const auto& q : v) {
    if (q != 0) return false;
  }
  return true;
}

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::from_rows(const std::vector<RationalVector>& rows) {
  if (rows.empty()) return {};
  RationalMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols_) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& other) const {
  if (cols_ != other.rows_) throw std::invalid_argument("matrix product: dimension mismatch");
  RationalMatrix p(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      if ((*this)(i, k) == 0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) p(i, j) += (*this)(i, k) * other(k, j);
    }
  return p;
}

RationalMatrix RationalMatrix::operator-(const RationalMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("matrix sub: dimension mismatch");
  RationalMatrix d(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) d.data_[i] = data_[i] - other.data_[i];
  return d;
}

RationalMatrix RationalMatrix::operator*(const Rational& s) const {
  RationalMatrix d(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) d.data_[i] = data_[i] * s;
  return d;
}

RationalVector RationalMatrix::operator*(std::span<const Rational> v) const {
  if (v.size() != cols_) throw std::invalid_argument("matrix-vector: dimension mismatch");
  RationalVector out(rows_, Rational(0));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) {
      if (v[j] != 0) out[i] += (*this)(i, j) * v[j];
    }
  return out;
}

bool RationalMatrix::operator==(const RationalMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
}

Rational RationalMatrix::determinant() const {
  if (rows_ != cols_) throw std::invalid_argument("determinant of non-square matrix");
  RationalMatrix a = *this;
  Rational det = 1;
  const std::size_t n = rows_;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a(piv, c) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(c, j));
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a(r, c) == 0) continue;
      Rational f = a(r, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
    }
  }
  return det;
}

RationalMatrix RationalMatrix::inverse() const {
  if (rows_ != cols_) throw std::invalid_argument("inverse of non-square matrix");
  const std::size_t n = rows_;
  RationalMatrix a = *this;
  RationalMatrix inv = identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a(piv, c) == 0) ++piv;
    if (piv == n) throw std::domain_error("matrix is singular");
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(c, j));
        std::swap(inv(piv, j), inv(c, j));
      }
    }
    const Rational p = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= p;
      inv(c, j) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a(r, c) == 0) continue;
      const Rational f = a(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

std::size_t RationalMatrix::rank() const {
  RationalMatrix a = *this;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
    std::size_t piv = rank;
    while (piv < rows_ && a(piv, c) == 0) ++piv;
    if (piv == rows_) continue;
    for (std::size_t j = 0; j < cols_; ++j) std::swap(a(piv, j), a(rank, j));
    for (std::size_t r = rank + 1; r < rows_; ++r) {
      if (a(r, c) == 0) continue;
      Rational f = a(r, c) / a(rank, c);
      for (std::size_t j = c; j < cols_; ++j) a(r, j) -= f * a(rank, j);
    }
    ++rank;
  }
  return rank;
}

bool RationalMatrix::is_integer() const {
  for (const auto& q : data_) {
    if (q.get_den() != 1) return false;
  }
  return true;
}

std::vector<double> RationalMatrix::to_double() const {
  std::vector<double> out;
  out.reserve(data_.size());
  for (const auto& q : data_) out.push_back(q.get_d());
  return out;
}

std::size_t rank_of(const std::vector<RationalVector>& rows) {
  if (rows.empty()) return 0;
  return RationalMatrix::from_rows(rows).rank();
}

RationalVector solve(const RationalMatrix& a, std::span<const Rational> b) {
  return a.inverse() * b;
}

}  // namespace selfaffine
