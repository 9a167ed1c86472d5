#pragma once

#include "pivchol/kernel.hpp"
#include "pivchol/pivoted_cholesky.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace pivchol {

struct MetricsRow {
  Index rank = 0;
  double sse = 0.0;
  double trace_residual = 0.0;
  double nlml = 0.0;
  std::uint64_t seed = 0;
  std::string strategy;
};

// Sum of the Schur diagonal over the unselected positions, i.e.
// tr(G - L L^T). O(N).
double trace_residual(const PartialCholesky& pc);

// Least-squares fit of y - mu on the latent kernel columns of the selected
// points, alpha = (K_IX K_XI)^{-1} K_IX (y - mu). Returns ||y - mu - K_XI alpha||^2.
// Throws SingularSystem if the normal equations stay singular after jitter.
double sse(const PartialCholesky& pc, const GramOperator& op,
           const Eigen::Ref<const Eigen::VectorXd>& y);

struct NlmlTerms {
  double constant = 0.0;
  double data_fit = 0.0;
  double complexity = 0.0;
  double penalty = 0.0;

  double total() const { return constant + data_fit + complexity + penalty; }
};

// Variational free energy of the sparse GP with the pivots of `pc` as inducing
// points:
//   N/2 log 2pi + 1/2 r^T (K^ + s2 I)^{-1} r + c_1 log|K^ + s2 I| + c_2 tr(K - K^) / s2
// with r = y - mu. The pivots are replayed on the latent kernel, so `pc` may
// come from either mode. Default coefficients are c_1 = c_2 = 1/2, an upper
// bound on the exact negative log marginal likelihood; `literal_coefficients`
// switches to c_1 = N/2 and c_2 = 1. Uses only O(N M^2) low-rank algebra.
NlmlTerms nlml(const PartialCholesky& pc, const GramOperator& op,
               const Eigen::Ref<const Eigen::VectorXd>& y, bool literal_coefficients = false);

struct TraceBoundRow {
  Index index = 0;
  double mean = 0.0;           // m_i
  double variance = 0.0;       // v_i
  double second_moment = 0.0;  // s_i = m_i^2 + v_i
  double tau = 0.0;            // exact trace reduction ||G_i||^2 / G_ii
  double lower = 0.0;          // N m_i^2 / G_ii
  double upper = 0.0;          // N m_i
  bool assumptions_hold = true;  // non-negative row, constant diagonal
  bool bounds_hold = true;       // lower <= tau <= upper
};

// Row statistics and trace-reduction bounds for every row of `op`. With
// `strict`, a negative entry or non-constant diagonal throws
// AssumptionViolated; otherwise the row is flagged.
std::vector<TraceBoundRow> trace_bounds(const GramOperator& op, bool strict = true);

}  // namespace pivchol
