#include "airy/sparse_lu.hpp"

#include <umfpack.h>

#include <cmath>
#include <string>
#include <utility>

#include "airy/core.hpp"
#include "airy/json_writer.hpp"

namespace airy {

SparseLU::SparseLU(const Eigen::SparseMatrix<double>& a) : n_(a.rows()) {
  if (a.rows() != a.cols()) throw ValidationError("SparseLU: matrix must be square");
  Eigen::SparseMatrix<double> m = a;
  m.makeCompressed();
  col_ptr_.assign(m.outerIndexPtr(), m.outerIndexPtr() + m.cols() + 1);
  row_idx_.assign(m.innerIndexPtr(), m.innerIndexPtr() + m.nonZeros());
  values_.assign(m.valuePtr(), m.valuePtr() + m.nonZeros());

  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  umfpack_di_defaults(control);
  void* symbolic = nullptr;
  const int n = static_cast<int>(n_);
  int status = umfpack_di_symbolic(n, n, col_ptr_.data(), row_idx_.data(), values_.data(), &symbolic, control, info);
  if (status != UMFPACK_OK) throw NumericalError("UMFPACK symbolic analysis failed, status " + std::to_string(status));
  status = umfpack_di_numeric(col_ptr_.data(), row_idx_.data(), values_.data(), symbolic, &numeric_, control, info);
  umfpack_di_free_symbolic(&symbolic);
  rcond_ = info[UMFPACK_RCOND];
  if (status == UMFPACK_WARNING_singular_matrix || (status == UMFPACK_OK && !(rcond_ > 1e-15))) {
    release();
    throw NumericalError("singular or ill-conditioned system, reciprocal condition estimate " + format_double(rcond_));
  }
  if (status != UMFPACK_OK) {
    release();
    throw NumericalError("UMFPACK numeric factorization failed, status " + std::to_string(status));
  }
}

SparseLU::~SparseLU() { release(); }

SparseLU::SparseLU(SparseLU&& other) noexcept
    : n_(other.n_),
      col_ptr_(std::move(other.col_ptr_)),
      row_idx_(std::move(other.row_idx_)),
      values_(std::move(other.values_)),
      numeric_(std::exchange(other.numeric_, nullptr)),
      rcond_(other.rcond_) {}

SparseLU& SparseLU::operator=(SparseLU&& other) noexcept {
  if (this != &other) {
    release();
    n_ = other.n_;
    col_ptr_ = std::move(other.col_ptr_);
    row_idx_ = std::move(other.row_idx_);
    values_ = std::move(other.values_);
    numeric_ = std::exchange(other.numeric_, nullptr);
    rcond_ = other.rcond_;
  }
  return *this;
}

void SparseLU::release() noexcept {
  if (numeric_ != nullptr) umfpack_di_free_numeric(&numeric_);
  numeric_ = nullptr;
}

Eigen::VectorXd SparseLU::solve(const Eigen::VectorXd& b) const {
  if (b.size() != n_) throw ValidationError("SparseLU::solve: right-hand side has the wrong size");
  Eigen::VectorXd x(n_);
  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  umfpack_di_defaults(control);
  const int status = umfpack_di_solve(UMFPACK_A, col_ptr_.data(), row_idx_.data(), values_.data(), x.data(), b.data(), numeric_,
                                      control, info);
  if (status != UMFPACK_OK) throw NumericalError("UMFPACK solve failed, status " + std::to_string(status));
  return x;
}

}  // namespace airy
