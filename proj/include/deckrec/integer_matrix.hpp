#pragma once

// Dense matrices of arbitrary-precision integers and the Smith Normal Form.

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "deckrec/types.hpp"

namespace deckrec {

using BigInt = boost::multiprecision::cpp_int;

class IntegerMatrix {
 public:
  IntegerMatrix() = default;
  IntegerMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntegerMatrix(std::initializer_list<std::initializer_list<long long>> rows);

  static IntegerMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  BigInt& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const BigInt& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<BigInt> row(std::size_t i) const;
  IntegerMatrix transpose() const;
  bool is_zero() const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  /// row[dst] += k * row[src]
  void add_row_multiple(std::size_t dst, std::size_t src, const BigInt& k);
  void add_col_multiple(std::size_t dst, std::size_t src, const BigInt& k);
  void negate_row(std::size_t i);

  friend IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b);
  friend bool operator==(const IntegerMatrix& a, const IntegerMatrix& b) = default;

  std::string to_string() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> data_;
};

/// Exact determinant by fraction-free (Bareiss) elimination.
BigInt determinant(const IntegerMatrix& A);

/// Rank over the rationals.
std::size_t rational_rank(const IntegerMatrix& A);

/// U * A * V = diag(d_1, ..., d_k, 0, ...), d_i | d_{i+1}, d_i > 0.
struct SnfDecomposition {
  IntegerMatrix U;
  std::vector<BigInt> diagonal;  // length min(rows, cols)
  IntegerMatrix V;

  /// Recomputes U*A*V and both determinants.
  bool verify(const IntegerMatrix& A) const;
};

SnfDecomposition smith_normal_form(const IntegerMatrix& A);

/// Smallest non-negative representative of a mod m.
BigInt mod_floor(const BigInt& a, const BigInt& m);

}  // namespace deckrec
