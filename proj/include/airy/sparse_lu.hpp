#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <vector>

namespace airy {

// UMFPACK LU factorization of a square sparse matrix; owns the numeric object.
class SparseLU {
 public:
  explicit SparseLU(const Eigen::SparseMatrix<double>& a);
  ~SparseLU();
  SparseLU(const SparseLU&) = delete;
  SparseLU& operator=(const SparseLU&) = delete;
  SparseLU(SparseLU&& other) noexcept;
  SparseLU& operator=(SparseLU&& other) noexcept;

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  // UMFPACK's reciprocal condition estimate, min|U_ii| / max|U_ii|.
  double rcond() const { return rcond_; }
  long rows() const { return n_; }

 private:
  void release() noexcept;

  long n_ = 0;
  std::vector<int> col_ptr_;
  std::vector<int> row_idx_;
  std::vector<double> values_;
  void* numeric_ = nullptr;
  double rcond_ = 0.0;
};

}  // namespace airy
