#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "chns/common/errors.hpp"

namespace chns::linalg {

using Vec = std::vector<double>;

/// Row-compressed sparse matrix with sorted column indices per row.
struct CsrMatrix {
  std::size_t nrows = 0;
  std::size_t ncols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<int> col;
  Vec val;

  std::size_t nnz() const { return col.size(); }

  /// Position of (i, j) in val, or npos.
  std::size_t find(std::size_t i, std::size_t j) const {
    auto b = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    auto e = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    auto it = std::lower_bound(b, e, static_cast<int>(j));
    if (it == e || *it != static_cast<int>(j)) return npos;
    return static_cast<std::size_t>(it - col.begin());
  }

  double at(std::size_t i, std::size_t j) const {
    const std::size_t k = find(i, j);
    return k == npos ? 0.0 : val[k];
  }

  void multiply(const Vec& x, Vec& y) const {
    CHNS_REQUIRE(x.size() == ncols, ContractError, "spmv: input size mismatch");
    y.assign(nrows, 0.0);
    for (std::size_t i = 0; i < nrows; ++i) {
      double s = 0.0;
      for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[static_cast<std::size_t>(col[k])];
      y[i] = s;
    }
  }

  Vec operator*(const Vec& x) const {
    Vec y;
    multiply(x, y);
    return y;
  }

  Vec diagonal() const {
    Vec d(nrows, 0.0);
    for (std::size_t i = 0; i < nrows; ++i) d[i] = at(i, i);
    return d;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Builds a matrix from (row, col, value) triplets, summing duplicates.
inline CsrMatrix from_triplets(std::size_t nrows, std::size_t ncols, std::vector<std::size_t> rows,
                               std::vector<std::size_t> cols, std::vector<double> vals) {
  CHNS_REQUIRE(rows.size() == cols.size() && rows.size() == vals.size(), ContractError,
               "triplet arrays differ in length");
  std::vector<std::size_t> perm(rows.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return rows[a] != rows[b] ? rows[a] < rows[b] : cols[a] < cols[b];
  });
  CsrMatrix m;
  m.nrows = nrows;
  m.ncols = ncols;
  m.row_ptr.assign(nrows + 1, 0);
  for (std::size_t q = 0; q < perm.size(); ++q) {
    const std::size_t k = perm[q];
    CHNS_REQUIRE(rows[k] < nrows && cols[k] < ncols, ContractError, "triplet index out of range");
    if (q > 0 && rows[perm[q - 1]] == rows[k] && cols[perm[q - 1]] == cols[k]) {
      m.val.back() += vals[k];
      continue;
    }
    m.col.push_back(static_cast<int>(cols[k]));
    m.val.push_back(vals[k]);
    ++m.row_ptr[rows[k] + 1];
  }
  for (std::size_t i = 0; i < nrows; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double a, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace chns::linalg
