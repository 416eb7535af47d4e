#include "deckrec/integer_matrix.hpp"

#include <sstream>

namespace deckrec {

IntegerMatrix::IntegerMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error("ragged integer matrix literal");
    for (long long v : r) data_.emplace_back(v);
  }
}

IntegerMatrix IntegerMatrix::identity(std::size_t n) {
  IntegerMatrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1;
  return I;
}

std::vector<BigInt> IntegerMatrix::row(std::size_t i) const {
  return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
          data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

IntegerMatrix IntegerMatrix::transpose() const {
  IntegerMatrix T(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
  return T;
}

bool IntegerMatrix::is_zero() const {
  for (const auto& v : data_)
    if (v != 0) return false;
  return true;
}

void IntegerMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntegerMatrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntegerMatrix::add_row_multiple(std::size_t dst, std::size_t src, const BigInt& k) {
  if (k == 0) return;
  for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) += k * (*this)(src, j);
}

void IntegerMatrix::add_col_multiple(std::size_t dst, std::size_t src, const BigInt& k) {
  if (k == 0) return;
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) += k * (*this)(i, src);
}

void IntegerMatrix::negate_row(std::size_t i) {
  for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = -(*this)(i, j);
}

IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b) {
  if (a.cols_ != b.rows_) throw Error("integer matrix product dimension mismatch");
  IntegerMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const BigInt& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

std::string IntegerMatrix::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < rows_; ++i) {
    os << "[";
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? " " : "") << (*this)(i, j);
    os << "]\n";
  }
  return os.str();
}

BigInt determinant(const IntegerMatrix& A) {
  if (A.rows() != A.cols()) throw Error("determinant of a non-square matrix");
  const std::size_t n = A.rows();
  if (n == 0) return 1;
  IntegerMatrix M = A;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (M(k, k) == 0) {
      std::size_t r = k + 1;
      while (r < n && M(r, k) == 0) ++r;
      if (r == n) return 0;
      M.swap_rows(k, r);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) M(i, j) = (M(i, j) * M(k, k) - M(i, k) * M(k, j)) / prev;
    prev = M(k, k);
  }
  return sign * M(n - 1, n - 1);
}

std::size_t rational_rank(const IntegerMatrix& A) {
  IntegerMatrix M = A;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < M.cols() && rank < M.rows(); ++col) {
    std::size_t piv = rank;
    while (piv < M.rows() && M(piv, col) == 0) ++piv;
    if (piv == M.rows()) continue;
    M.swap_rows(rank, piv);
    for (std::size_t i = rank + 1; i < M.rows(); ++i) {
      if (M(i, col) == 0) continue;
      const BigInt a = M(rank, col);
      const BigInt b = M(i, col);
      for (std::size_t j = col; j < M.cols(); ++j) M(i, j) = M(i, j) * a - M(rank, j) * b;
      BigInt g = 0;
      for (std::size_t j = col; j < M.cols(); ++j) g = gcd(g, M(i, j));
      if (g > 1)
        for (std::size_t j = col; j < M.cols(); ++j) M(i, j) /= g;
    }
    ++rank;
  }
  return rank;
}

BigInt mod_floor(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

bool SnfDecomposition::verify(const IntegerMatrix& A) const {
  if (U.rows() != A.rows() || V.cols() != A.cols()) return false;
  const IntegerMatrix D = U * A * V;
  for (std::size_t i = 0; i < D.rows(); ++i)
    for (std::size_t j = 0; j < D.cols(); ++j) {
      const BigInt expected = (i == j && i < diagonal.size()) ? diagonal[i] : BigInt(0);
      if (D(i, j) != expected) return false;
    }
  for (std::size_t i = 0; i + 1 < diagonal.size(); ++i) {
    if (diagonal[i] < 0) return false;
    if (diagonal[i] == 0 && diagonal[i + 1] != 0) return false;
    if (diagonal[i] != 0 && diagonal[i + 1] % diagonal[i] != 0) return false;
  }
  const BigInt du = determinant(U);
  const BigInt dv = determinant(V);
  return (du == 1 || du == -1) && (dv == 1 || dv == -1);
}

SnfDecomposition smith_normal_form(const IntegerMatrix& A) {
  const std::size_t r = A.rows();
  const std::size_t c = A.cols();
  IntegerMatrix M = A;
  IntegerMatrix U = IntegerMatrix::identity(r);
  IntegerMatrix V = IntegerMatrix::identity(c);
  const std::size_t k = std::min(r, c);

  for (std::size_t t = 0; t < k; ++t) {
    for (;;) {
      // Move the smallest nonzero entry of the trailing block to (t, t).
      std::size_t pi = r, pj = c;
      BigInt best = 0;
      for (std::size_t i = t; i < r; ++i)
        for (std::size_t j = t; j < c; ++j) {
          if (M(i, j) == 0) continue;
          const BigInt a = abs(M(i, j));
          if (pi == r || a < best) {
            best = a;
            pi = i;
            pj = j;
          }
        }
      if (pi == r) goto done;
      M.swap_rows(t, pi);
      U.swap_rows(t, pi);
      M.swap_cols(t, pj);
      V.swap_cols(t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < r; ++i) {
        if (M(i, t) == 0) continue;
        const BigInt q = M(i, t) / M(t, t);
        M.add_row_multiple(i, t, -q);
        U.add_row_multiple(i, t, -q);
        if (M(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < c; ++j) {
        if (M(t, j) == 0) continue;
        const BigInt q = M(t, j) / M(t, t);
        M.add_col_multiple(j, t, -q);
        V.add_col_multiple(j, t, -q);
        if (M(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // Enforce divisibility of the remaining block by the pivot.
      bool divides = true;
      for (std::size_t i = t + 1; i < r && divides; ++i)
        for (std::size_t j = t + 1; j < c; ++j)
          if (M(i, j) % M(t, t) != 0) {
            M.add_row_multiple(t, i, 1);
            U.add_row_multiple(t, i, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (M(t, t) < 0) {
      M.negate_row(t);
      U.negate_row(t);
    }
  }
done:
  SnfDecomposition snf{std::move(U), {}, std::move(V)};
  snf.diagonal.resize(k);
  for (std::size_t i = 0; i < k; ++i) snf.diagonal[i] = M(i, i);
  return snf;
}

}  // namespace deckrec
