#include "pivchol/metrics.hpp"

#include "pivchol/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>

namespace pivchol {

double trace_residual(const PartialCholesky& pc) { return pc.residual_trace(); }

double sse(const PartialCholesky& pc, const GramOperator& op,
           const Eigen::Ref<const Eigen::VectorXd>& y) {
  const Index n = op.size();
  const Index m = pc.rank();
  if (m < 1) throw ContractViolation("sse: needs at least one selected point");
  if (pc.size() != n || y.size() != n) throw ContractViolation("sse: size mismatch");

  const GramOperator latent = op.with_mode(GramMode::Latent);
  Eigen::MatrixXd features(n, m);
  for (Index k = 0; k < m; ++k) features.col(k) = latent.row(pc.pivots[k]);
  const Eigen::VectorXd r = y.array() - op.config().prior_mean;

  Eigen::MatrixXd normal = features.transpose() * features;
  const Eigen::VectorXd rhs = features.transpose() * r;
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) {
    normal.diagonal().array() += 1e-10 * op.scale() * static_cast<double>(n);
    llt.compute(normal);
    if (llt.info() != Eigen::Success) {
      throw SingularSystem("sse: normal equations singular at rank " + std::to_string(m));
    }
  }
  const Eigen::VectorXd alpha = llt.solve(rhs);
  return (r - features * alpha).squaredNorm();
}

NlmlTerms nlml(const PartialCholesky& pc, const GramOperator& op,
               const Eigen::Ref<const Eigen::VectorXd>& y, bool literal_coefficients) {
  const double noise = op.config().noise_variance;
  if (!(noise > 0.0)) throw ContractViolation("nlml: noise variance must be positive");
  const Index n = op.size();
  if (pc.size() != n || y.size() != n) throw ContractViolation("nlml: size mismatch");

  // Same inducing points, latent kernel.
  const PartialCholesky latent = replay(op.with_mode(GramMode::Latent), pc.selected());
  const Index m = latent.rank();
  const Eigen::MatrixXd l = latent.factor();

  Eigen::VectorXd r(n);
  for (Index k = 0; k < n; ++k) r[k] = y[latent.pivots[k]] - op.config().prior_mean;

  // Woodbury and the determinant lemma on noise * I + L L^T.
  Eigen::MatrixXd inner = l.transpose() * l;
  inner.diagonal().array() += noise;
  const Eigen::LLT<Eigen::MatrixXd> llt(inner);
  if (llt.info() != Eigen::Success) {
    throw SingularSystem("nlml: inner system not positive definite at rank " + std::to_string(m));
  }
  const Eigen::VectorXd projected = llt.matrixL().solve(l.transpose() * r);
  const double quad = (r.squaredNorm() - projected.squaredNorm()) / noise;
  double logdet = static_cast<double>(n - m) * std::log(noise);
  for (Index k = 0; k < m; ++k) logdet += 2.0 * std::log(llt.matrixLLT()(k, k));

  const double dn = static_cast<double>(n);
  NlmlTerms terms;
  terms.constant = 0.5 * dn * std::log(2.0 * std::numbers::pi);
  terms.data_fit = 0.5 * quad;
  terms.complexity = (literal_coefficients ? 0.5 * dn : 0.5) * logdet;
  terms.penalty = (literal_coefficients ? 1.0 : 0.5) * latent.residual_trace() / noise;
  return terms;
}

std::vector<TraceBoundRow> trace_bounds(const GramOperator& op, bool strict) {
  const Index n = op.size();
  const double dn = static_cast<double>(n);
  const double reference_diag = op.entry(0, 0);
  constexpr double kRelSlack = 1e-12;

  std::vector<TraceBoundRow> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Eigen::VectorXd g = op.row(i);
    const double gii = g[i];
    TraceBoundRow row;
    row.index = i;

    if (std::abs(gii - reference_diag) > kRelSlack * std::abs(reference_diag)) {
      if (strict) throw AssumptionViolated(i, i, "non-constant diagonal");
      row.assumptions_hold = false;
    }
    for (Index j = 0; j < n; ++j) {
      if (g[j] < 0.0) {
        if (strict) throw AssumptionViolated(i, j, "negative Gram entry");
        row.assumptions_hold = false;
        break;
      }
    }

    row.mean = g.mean();
    const double sum_sq = g.squaredNorm();
    row.variance = sum_sq / dn - row.mean * row.mean;
    row.second_moment = row.mean * row.mean + row.variance;
    row.tau = sum_sq / gii;
    row.lower = dn * row.mean * row.mean / gii;
    row.upper = dn * row.mean;
    row.bounds_hold = row.lower <= row.tau * (1.0 + kRelSlack) &&
                      row.tau <= row.upper * (1.0 + kRelSlack);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pivchol
