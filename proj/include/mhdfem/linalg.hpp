#pragma once

#include "mhdfem/types.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <memory>
#include <string>
#include <vector>

namespace mhdfem {

/// Row-compressed sparse matrix with 64-bit real entries.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// Sum triplets into a rows x cols sparse matrix. Duplicate entries add up.
inline SparseMatrix assemble(int rows, int cols,
                             const std::vector<Triplet>& triplets) {
  for (const auto& t : triplets)
    if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols)
      throw std::out_of_range("assemble: triplet index out of range");
  SparseMatrix A(rows, cols);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

/// Reusable sparse LU factorization. Solves many right-hand sides against
/// one factorization; matrices at desk scale are handled directly.
class FactorHandle {
 public:
  FactorHandle() = default;

  FactorHandle(const SparseMatrix& A, std::string label)
      : label_(std::move(label)),
        lu_(std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>()) {
    if (A.rows() != A.cols())
      throw SingularMatrixError("factorize: matrix not square: " + label_);
    Eigen::SparseMatrix<double> col(A);
    lu_->compute(col);
    if (lu_->info() != Eigen::Success)
      throw SingularMatrixError("factorize: singular matrix: " + label_);
  }

  VectorXd solve(const VectorXd& b) const {
    VectorXd x = lu_->solve(b);
    if (lu_->info() != Eigen::Success)
      throw SolverError("solve failed: " + label_);
    return x;
  }

  bool valid() const { return static_cast<bool>(lu_); }
  const std::string& label() const { return label_; }

 private:
  std::string label_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

inline FactorHandle factorize(const SparseMatrix& A,
                              const std::string& label = "matrix") {
  return FactorHandle(A, label);
}

inline VectorXd solve(const FactorHandle& f, const VectorXd& b) {
  return f.solve(b);
}

struct SaddleResult {
  VectorXd primal;
  VectorXd multiplier;
  double gauge = 0.0;  // multiplier of the optional null-space row
};

/// Factorized symmetric saddle-point system
///
///     [ A   B^T  0 ] [ x  ]   [ f ]
///     [ B   0    c ] [ mu ] = [ g ]
///     [ 0   c^T  0 ] [ la ]   [ 0 ]
///
/// where the optional column c repairs a one-dimensional rank deficiency of
/// the constraint block (e.g. the zero-mean pressure gauge).
class SaddleSystem {
 public:
  SaddleSystem(const SparseMatrix& A, const SparseMatrix& B,
               const VectorXd* nullvec = nullptr,
               const std::string& label = "saddle system")
      : n_(static_cast<int>(A.rows())), m_(static_cast<int>(B.rows())),
        gauged_(nullvec != nullptr) {
    if (A.cols() != n_ || B.cols() != n_)
      throw SolverError("saddle system: inconsistent block dimensions: " +
                        label);
    const int size = n_ + m_ + (gauged_ ? 1 : 0);
    std::vector<Triplet> trip;
    trip.reserve(A.nonZeros() + 2 * B.nonZeros() + 2 * m_);
    for (int r = 0; r < A.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(A, r); it; ++it)
        trip.emplace_back(static_cast<int>(it.row()),
                          static_cast<int>(it.col()), it.value());
    for (int r = 0; r < B.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(B, r); it; ++it) {
        trip.emplace_back(n_ + static_cast<int>(it.row()),
                          static_cast<int>(it.col()), it.value());
        trip.emplace_back(static_cast<int>(it.col()),
                          n_ + static_cast<int>(it.row()), it.value());
      }
    if (gauged_) {
      for (int i = 0; i < m_; ++i) {
        double v = (*nullvec)[i];
        if (v != 0.0) {
          trip.emplace_back(n_ + i, n_ + m_, v);
          trip.emplace_back(n_ + m_, n_ + i, v);
        }
      }
    }
    factor_ = factorize(assemble(size, size, trip), label);
  }

  SaddleResult solve(const VectorXd& f, const VectorXd& g) const {
    VectorXd rhs = VectorXd::Zero(n_ + m_ + (gauged_ ? 1 : 0));
    rhs.head(n_) = f;
    rhs.segment(n_, m_) = g;
    VectorXd x = factor_.solve(rhs);
    SaddleResult r;
    r.primal = x.head(n_);
    r.multiplier = x.segment(n_, m_);
    if (gauged_) r.gauge = x[n_ + m_];
    return r;
  }

 private:
  int n_, m_;
  bool gauged_;
  FactorHandle factor_;
};

/// One-shot saddle solve; see SaddleSystem for the block layout.
inline SaddleResult solve_saddle(const SparseMatrix& A, const SparseMatrix& B,
                                 const VectorXd& f, const VectorXd& g,
                                 const VectorXd* nullvec = nullptr,
                                 const std::string& label = "saddle system") {
  return SaddleSystem(A, B, nullvec, label).solve(f, g);
}

/// Conjugate gradients on a symmetric positive-semidefinite system with a
/// consistent right-hand side. Started from zero, the iterates stay in the
/// range of A, so the returned solution is the minimum-norm representative.
inline VectorXd cg_semidefinite(const SparseMatrix& A, const VectorXd& b,
                                double rel_tol = 1e-13,
                                int max_iters = -1) {
  const double bnorm = b.norm();
  VectorXd x = VectorXd::Zero(b.size());
  if (bnorm == 0.0) return x;
  if (max_iters < 0) max_iters = 20 * static_cast<int>(b.size()) + 100;
  VectorXd r = b, p = b;
  double rr = r.squaredNorm();
  for (int it = 0; it < max_iters; ++it) {
    if (std::sqrt(rr) <= rel_tol * bnorm) return x;
    VectorXd Ap = A * p;
    double pAp = p.dot(Ap);
    if (pAp <= 0.0) return x;  // numerically exhausted the range of A
    double alpha = rr / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  if (std::sqrt(rr) > 1e-6 * bnorm)
    throw SolverError("cg_semidefinite: no convergence");
  return x;
}

}  // namespace mhdfem
