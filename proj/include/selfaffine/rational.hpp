#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace selfaffine {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

// Parses "p/q", "p" or "-p/q". Throws std::invalid_argument on anything else
// (in particular decimal floats, which would silently lose exactness).
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
std::string to_string(const RationalVector& v);

double to_double(const Rational& q);
std::vector<double> to_double(std::span<const Rational> v);
Rational from_double(double x);  // exact binary value

bool is_integer(const Rational& q);
// Fractional part in [0, 1).
Rational frac(const Rational& q);

Rational dot(std::span<const Rational> a, std::span<const Rational> b);
RationalVector operator+(const RationalVector& a, const RationalVector& b);
RationalVector operator-(const RationalVector& a, const RationalVector& b);
RationalVector operator*(const Rational& s, const RationalVector& v);
bool is_zero(std::span<const Rational> v);

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols);
  static RationalMatrix identity(std::size_t n);
  static RationalMatrix from_rows(const std::vector<RationalVector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  RationalMatrix transpose() const;
  RationalMatrix operator*(const RationalMatrix& other) const;
  RationalMatrix operator-(const RationalMatrix& other) const;
  RationalMatrix operator*(const Rational& s) const;
  RationalVector operator*(std::span<const Rational> v) const;
  bool operator==(const RationalMatrix& other) const;

  Rational determinant() const;
  // Throws std::domain_error when singular.
  RationalMatrix inverse() const;
  std::size_t rank() const;
  bool is_integer() const;
  std::vector<double> to_double() const;  // row-major

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

// Exact rank of the matrix whose rows are the given vectors.
std::size_t rank_of(const std::vector<RationalVector>& rows);

// Solves A x = b exactly for square nonsingular A.
RationalVector solve(const RationalMatrix& a, std::span<const Rational> b);

}  // namespace selfaffine
