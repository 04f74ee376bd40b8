#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "chns/linalg/csr.hpp"

namespace chns::linalg {

enum class PrecondType { None, Jacobi, SSOR, ILU0 };

inline PrecondType parse_precond(const std::string& s) {
  if (s == "none") return PrecondType::None;
  if (s == "jacobi") return PrecondType::Jacobi;
  if (s == "ssor") return PrecondType::SSOR;
  if (s == "ilu0") return PrecondType::ILU0;
  throw ConfigError("unknown preconditioner '" + s + "' (expected none, jacobi, ssor or ilu0)");
}

inline std::string to_string(PrecondType p) {
  switch (p) {
    case PrecondType::None: return "none";
    case PrecondType::Jacobi: return "jacobi";
    case PrecondType::SSOR: return "ssor";
    case PrecondType::ILU0: return "ilu0";
  }
  return "none";
}

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(const Vec& r, Vec& z) const = 0;
};

class IdentityPrecond final : public Preconditioner {
 public:
  void apply(const Vec& r, Vec& z) const override { z = r; }
};

/// Inverts the bs x bs diagonal blocks (bs = dofs per node, at most 4).
class BlockJacobi final : public Preconditioner {
 public:
  BlockJacobi(const CsrMatrix& A, int bs) : bs_(bs) {
    CHNS_REQUIRE(bs >= 1 && bs <= 4 && A.nrows % static_cast<std::size_t>(bs) == 0, ContractError,
                 "block size must divide the matrix size");
    const std::size_t nb = A.nrows / static_cast<std::size_t>(bs);
    inv_.resize(nb * static_cast<std::size_t>(bs * bs));
    for (std::size_t b = 0; b < nb; ++b) {
      std::array<double, 16> M{}, I{};
      for (int i = 0; i < bs; ++i) {
        for (int j = 0; j < bs; ++j) M[static_cast<std::size_t>(i * bs + j)] = A.at(b * bs + i, b * bs + j);
        I[static_cast<std::size_t>(i * bs + i)] = 1.0;
      }
      invert(M, I);
      std::copy(I.begin(), I.begin() + bs * bs, inv_.begin() + static_cast<std::ptrdiff_t>(b * bs * bs));
    }
  }

  void apply(const Vec& r, Vec& z) const override {
    z.assign(r.size(), 0.0);
    const std::size_t bs = static_cast<std::size_t>(bs_);
    for (std::size_t b = 0; b < r.size() / bs; ++b)
      for (std::size_t i = 0; i < bs; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < bs; ++j) s += inv_[b * bs * bs + i * bs + j] * r[b * bs + j];
        z[b * bs + i] = s;
      }
  }

 private:
  // Gauss-Jordan with partial pivoting; zero pivots fall back to identity rows.
  void invert(std::array<double, 16>& M, std::array<double, 16>& I) const {
    const int n = bs_;
    for (int c = 0; c < n; ++c) {
      int p = c;
      for (int r = c + 1; r < n; ++r)
        if (std::abs(M[static_cast<std::size_t>(r * n + c)]) > std::abs(M[static_cast<std::size_t>(p * n + c)])) p = r;
      if (M[static_cast<std::size_t>(p * n + c)] == 0.0) {
        M[static_cast<std::size_t>(c * n + c)] = 1.0;
        continue;
      }
      for (int k = 0; k < n; ++k) {
        std::swap(M[static_cast<std::size_t>(c * n + k)], M[static_cast<std::size_t>(p * n + k)]);
        std::swap(I[static_cast<std::size_t>(c * n + k)], I[static_cast<std::size_t>(p * n + k)]);
      }
      const double d = M[static_cast<std::size_t>(c * n + c)];
      for (int k = 0; k < n; ++k) {
        M[static_cast<std::size_t>(c * n + k)] /= d;
        I[static_cast<std::size_t>(c * n + k)] /= d;
      }
      for (int r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = M[static_cast<std::size_t>(r * n + c)];
        for (int k = 0; k < n; ++k) {
          M[static_cast<std::size_t>(r * n + k)] -= f * M[static_cast<std::size_t>(c * n + k)];
          I[static_cast<std::size_t>(r * n + k)] -= f * I[static_cast<std::size_t>(c * n + k)];
        }
      }
    }
  }

  int bs_;
  Vec inv_;
};

/// Symmetric successive over-relaxation sweep.
class Ssor final : public Preconditioner {
 public:
  Ssor(const CsrMatrix& A, double omega) : A_(A), omega_(omega), diag_(A.diagonal()) {
    CHNS_REQUIRE(omega > 0.0 && omega < 2.0, ConfigError, "SSOR relaxation must lie in (0, 2)");
    for (auto& d : diag_)
      if (d == 0.0) d = 1.0;
  }

  void apply(const Vec& r, Vec& z) const override {
    const std::size_t n = A_.nrows;
    z.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = r[i];
      for (std::size_t k = A_.row_ptr[i]; k < A_.row_ptr[i + 1]; ++k) {
        const std::size_t j = static_cast<std::size_t>(A_.col[k]);
        if (j < i) s -= A_.val[k] * z[j];
      }
      z[i] = s * omega_ / diag_[i];
    }
    for (std::size_t i = 0; i < n; ++i) z[i] *= diag_[i] / omega_;
    for (std::size_t ii = n; ii-- > 0;) {
      double s = z[ii];
      for (std::size_t k = A_.row_ptr[ii]; k < A_.row_ptr[ii + 1]; ++k) {
        const std::size_t j = static_cast<std::size_t>(A_.col[k]);
        if (j > ii) s -= A_.val[k] * z[j];
      }
      z[ii] = s * omega_ / diag_[ii];
    }
    const double scale = (2.0 - omega_) / omega_;
    for (auto& v : z) v *= scale;
  }

 private:
  const CsrMatrix& A_;
  double omega_;
  Vec diag_;
};

/// Incomplete LU factorization restricted to the sparsity pattern of A.
class Ilu0 final : public Preconditioner {
 public:
  explicit Ilu0(const CsrMatrix& A) : LU_(A), diag_pos_(A.nrows) {
    const std::size_t n = A.nrows;
    for (std::size_t i = 0; i < n; ++i) {
      diag_pos_[i] = LU_.find(i, i);
      CHNS_REQUIRE(diag_pos_[i] != CsrMatrix::npos, ContractError, "ILU(0) needs a stored diagonal");
    }
    std::vector<std::size_t> pos(n, CsrMatrix::npos);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = LU_.row_ptr[i]; k < LU_.row_ptr[i + 1]; ++k) pos[static_cast<std::size_t>(LU_.col[k])] = k;
      for (std::size_t k = LU_.row_ptr[i]; k < LU_.row_ptr[i + 1]; ++k) {
        const std::size_t j = static_cast<std::size_t>(LU_.col[k]);
        if (j >= i) break;
        double piv = LU_.val[diag_pos_[j]];
        if (piv == 0.0) piv = 1e-300;
        const double f = LU_.val[k] / piv;
        LU_.val[k] = f;
        for (std::size_t m = diag_pos_[j] + 1; m < LU_.row_ptr[j + 1]; ++m) {
          const std::size_t q = pos[static_cast<std::size_t>(LU_.col[m])];
          if (q != CsrMatrix::npos) LU_.val[q] -= f * LU_.val[m];
        }
      }
      for (std::size_t k = LU_.row_ptr[i]; k < LU_.row_ptr[i + 1]; ++k) pos[static_cast<std::size_t>(LU_.col[k])] = CsrMatrix::npos;
      if (LU_.val[diag_pos_[i]] == 0.0) LU_.val[diag_pos_[i]] = 1e-300;
    }
  }

  void apply(const Vec& r, Vec& z) const override {
    const std::size_t n = LU_.nrows;
    z = r;
    for (std::size_t i = 0; i < n; ++i) {
      double s = z[i];
      for (std::size_t k = LU_.row_ptr[i]; k < diag_pos_[i]; ++k) s -= LU_.val[k] * z[static_cast<std::size_t>(LU_.col[k])];
      z[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = z[i];
      for (std::size_t k = diag_pos_[i] + 1; k < LU_.row_ptr[i + 1]; ++k) s -= LU_.val[k] * z[static_cast<std::size_t>(LU_.col[k])];
      z[i] = s / LU_.val[diag_pos_[i]];
    }
  }

 private:
  CsrMatrix LU_;
  std::vector<std::size_t> diag_pos_;
};

inline std::unique_ptr<Preconditioner> make_preconditioner(const CsrMatrix& A, PrecondType type, double omega,
                                                           int block_size) {
  switch (type) {
    case PrecondType::None: return std::make_unique<IdentityPrecond>();
    case PrecondType::Jacobi: return std::make_unique<BlockJacobi>(A, block_size);
    case PrecondType::SSOR: return std::make_unique<Ssor>(A, omega);
    case PrecondType::ILU0: return std::make_unique<Ilu0>(A);
  }
  return std::make_unique<IdentityPrecond>();
}

}  // namespace chns::linalg
