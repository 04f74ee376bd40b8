#pragma once

#include <vector>

#include "chns/linalg/csr.hpp"

namespace chns::linalg {

/// Imposes x[i] = value[i] for flagged rows by symmetric elimination: the known
/// values are moved to the right-hand side and the row and column are cleared,
/// keeping the original diagonal entry.
inline void apply_dirichlet(CsrMatrix& A, Vec& b, const std::vector<char>& fixed, const Vec& value) {
  CHNS_REQUIRE(fixed.size() == A.nrows && value.size() == A.nrows && b.size() == A.nrows, ContractError,
               "dirichlet: size mismatch");
  for (std::size_t i = 0; i < A.nrows; ++i) {
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
      const std::size_t j = static_cast<std::size_t>(A.col[k]);
      if (fixed[i]) {
        if (j != i) A.val[k] = 0.0;
      } else if (fixed[j]) {
        b[i] -= A.val[k] * value[j];
        A.val[k] = 0.0;
      }
    }
  }
  for (std::size_t i = 0; i < A.nrows; ++i) {
    if (!fixed[i]) continue;
    const std::size_t k = A.find(i, i);
    CHNS_REQUIRE(k != CsrMatrix::npos, ContractError, "dirichlet row without a diagonal entry");
    if (A.val[k] == 0.0) A.val[k] = 1.0;
    b[i] = A.val[k] * value[i];
  }
}

}  // namespace chns::linalg
