#pragma once

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <string>

#include "chns/linalg/csr.hpp"

namespace chns::linalg {

/// Coordinate real general format, 1-based indices.
inline void write_matrix_market(std::ostream& os, const CsrMatrix& A) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.nrows << ' ' << A.ncols << ' ' << A.nnz() << '\n';
  os << std::setprecision(17);
  for (std::size_t i = 0; i < A.nrows; ++i)
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) os << i + 1 << ' ' << A.col[k] + 1 << ' ' << A.val[k] << '\n';
}

inline void save_matrix_market(const std::string& path, const CsrMatrix& A) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  write_matrix_market(f, A);
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace chns::linalg
