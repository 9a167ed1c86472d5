#pragma once

#include "pivchol/pivoted_cholesky.hpp"

#include <Eigen/Core>

#include <memory>

namespace pivchol {

// Lower-triangular preconditioner factor  L~ = D~ + L_XI E_I^T  in pivoted
// order: the M columns of a partial factor plus a diagonal D~ that is zero on
// the first M positions and sqrt(d_j) on the rest. L~ L~^T is the FITC matrix
// diag(G - K^) + K^.
//
// The columns are shared with the PartialCholesky, not copied; only D~ is
// allocated here.
class LowRankTriangular {
 public:
  // D~_j = sqrt(max(d_j, 1e-12 * scale)) for j >= M.
  static LowRankTriangular build(std::shared_ptr<const PartialCholesky> pc);

  // Uses a given D~ (e.g. read back from disk).
  LowRankTriangular(std::shared_ptr<const PartialCholesky> pc, Eigen::VectorXd resid_diag);

  Index size() const { return pc_->size(); }
  Index rank() const { return pc_->rank(); }
  const PartialCholesky& factor() const { return *pc_; }
  const std::vector<Index>& pivots() const { return pc_->pivots; }
  const Eigen::VectorXd& resid_diag() const { return resid_diag_; }

  // x with L~ x = b, everything in pivoted order. O(NM).
  Eigen::VectorXd solve_lower(const Eigen::Ref<const Eigen::VectorXd>& b) const;
  // x with L~^T x = b. O(NM).
  Eigen::VectorXd solve_upper(const Eigen::Ref<const Eigen::VectorXd>& b) const;
  // (L~ L~^T)^{-1} v.
  Eigen::VectorXd apply_inverse(const Eigen::Ref<const Eigen::VectorXd>& v) const;

  // Dense L~, for checks.
  Eigen::MatrixXd dense() const;

 private:
  void check_rhs(const Eigen::Ref<const Eigen::VectorXd>& b) const;

  std::shared_ptr<const PartialCholesky> pc_;
  Eigen::VectorXd resid_diag_;
};

}  // namespace pivchol
