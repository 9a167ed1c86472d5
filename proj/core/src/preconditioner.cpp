#include "pivchol/preconditioner.hpp"

#include "pivchol/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pivchol {

LowRankTriangular LowRankTriangular::build(std::shared_ptr<const PartialCholesky> pc) {
  if (!pc) throw ContractViolation("build_preconditioner: null factor");
  const Index n = pc->size();
  const Index m = pc->rank();
  const double floor = 1e-12 * pc->scale;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  for (Index j = m; j < n; ++j) diag[j] = std::sqrt(std::max(pc->schur_diag[j], floor));
  return LowRankTriangular(std::move(pc), std::move(diag));
}

LowRankTriangular::LowRankTriangular(std::shared_ptr<const PartialCholesky> pc,
                                     Eigen::VectorXd resid_diag)
    : pc_(std::move(pc)), resid_diag_(std::move(resid_diag)) {
  if (!pc_) throw ContractViolation("LowRankTriangular: null factor");
  if (resid_diag_.size() != pc_->size()) {
    throw ContractViolation("LowRankTriangular: diagonal length does not match factor");
  }
  for (Index j = pc_->rank(); j < pc_->size(); ++j) {
    if (!(resid_diag_[j] > 0.0)) {
      throw ContractViolation("LowRankTriangular: diagonal entry " + std::to_string(j) +
                              " is not positive");
    }
  }
}

void LowRankTriangular::check_rhs(const Eigen::Ref<const Eigen::VectorXd>& b) const {
  if (b.size() != size()) {
    throw ContractViolation("preconditioner solve: vector length " + std::to_string(b.size()) +
                            " does not match size " + std::to_string(size()));
  }
  if (!b.allFinite()) throw ContractViolation("preconditioner solve: non-finite right-hand side");
}

Eigen::VectorXd LowRankTriangular::solve_lower(const Eigen::Ref<const Eigen::VectorXd>& b) const {
  check_rhs(b);
  const Index n = size();
  const Index m = rank();
  const auto& cols = pc_->cols;
  Eigen::VectorXd x = b;
  // Column-oriented forward substitution over the dense leading columns.
  for (Index k = 0; k < m; ++k) {
    const auto& col = cols[static_cast<std::size_t>(k)];
    x[k] /= col[k];
    const double xk = x[k];
    x.tail(n - k - 1) -= xk * col.tail(n - k - 1);
  }
  x.tail(n - m).array() /= resid_diag_.tail(n - m).array();
  return x;
}

Eigen::VectorXd LowRankTriangular::solve_upper(const Eigen::Ref<const Eigen::VectorXd>& b) const {
  check_rhs(b);
  const Index n = size();
  const Index m = rank();
  const auto& cols = pc_->cols;
  Eigen::VectorXd x = b;
  // Rows below M of L~^T are diagonal only.
  x.tail(n - m).array() /= resid_diag_.tail(n - m).array();
  for (Index k = m - 1; k >= 0; --k) {
    const auto& col = cols[static_cast<std::size_t>(k)];
    const double dot = col.tail(n - k - 1).dot(x.tail(n - k - 1));
    x[k] = (x[k] - dot) / col[k];
  }
  return x;
}

Eigen::VectorXd LowRankTriangular::apply_inverse(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  return solve_upper(solve_lower(v));
}

Eigen::MatrixXd LowRankTriangular::dense() const {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(size(), size());
  for (Index k = 0; k < rank(); ++k) l.col(k) = pc_->cols[static_cast<std::size_t>(k)];
  for (Index j = rank(); j < size(); ++j) l(j, j) = resid_diag_[j];
  return l;
}

}  // namespace pivchol
