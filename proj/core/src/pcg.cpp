#include "pivchol/pcg.hpp"

#include "pivchol/errors.hpp"

#include <cmath>

namespace pivchol {

namespace {

Eigen::VectorXd precondition(const LowRankTriangular* pre, const Eigen::VectorXd& r) {
  if (!pre) return r;
  const auto& pivots = pre->pivots();
  const Index n = r.size();
  Eigen::VectorXd permuted(n);
  for (Index k = 0; k < n; ++k) permuted[k] = r[pivots[k]];
  const Eigen::VectorXd solved = pre->apply_inverse(permuted);
  Eigen::VectorXd z(n);
  for (Index k = 0; k < n; ++k) z[pivots[k]] = solved[k];
  return z;
}

}  // namespace

PcgReport pcg_solve(const GramOperator& op, const Eigen::Ref<const Eigen::VectorXd>& y,
                    const LowRankTriangular* preconditioner, const PcgOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Index n = op.size();
  if (y.size() != n) {
    throw ContractViolation("pcg_solve: right-hand side length " + std::to_string(y.size()) +
                            " does not match operator size " + std::to_string(n));
  }
  if (!y.allFinite()) throw ContractViolation("pcg_solve: non-finite right-hand side");
  if (!(options.tolerance > 0.0)) throw ContractViolation("pcg_solve: tolerance must be positive");
  if (options.max_iterations < 0) throw ContractViolation("pcg_solve: negative iteration cap");
  if (preconditioner && preconditioner->size() != n) {
    throw ContractViolation("pcg_solve: preconditioner size does not match operator");
  }
  const Index max_iterations = options.max_iterations > 0 ? options.max_iterations : 10 * n;
  const Index interval = options.true_residual_interval;

  PcgReport report;
  report.solution = Eigen::VectorXd::Zero(n);
  const double y_norm = y.norm();
  if (y_norm == 0.0) {
    report.converged = true;
    report.wall_time = std::chrono::steady_clock::now() - start;
    return report;
  }

  Eigen::VectorXd& x = report.solution;
  Eigen::VectorXd r = y;
  Eigen::VectorXd z = precondition(preconditioner, r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);

  for (Index k = 1; k <= max_iterations; ++k) {
    const Eigen::VectorXd ap = op.mvp(p);
    const double curvature = p.dot(ap);
    if (!std::isfinite(curvature) || !(curvature > 0.0)) {
      throw NumericalDivergence(k, "search direction curvature " + std::to_string(curvature));
    }
    const double alpha = rz / curvature;
    x += alpha * p;
    const bool refresh = interval > 0 && k % interval == 0;
    if (refresh) {
      r = y - op.mvp(x);
    } else {
      r -= alpha * ap;
    }

    double rel = r.norm() / y_norm;
    if (!std::isfinite(rel)) throw NumericalDivergence(k, "residual norm");
    report.iterations = k;
    report.residual_history.push_back(rel);
    if (options.on_iterate) options.on_iterate(k, x);

    if (rel <= options.tolerance) {
      if (!refresh) {
        // Confirm against the true residual before stopping.
        r = y - op.mvp(x);
        rel = r.norm() / y_norm;
        report.residual_history.back() = rel;
      }
      if (rel <= options.tolerance) {
        report.converged = true;
        break;
      }
    }

    z = precondition(preconditioner, r);
    const double rz_next = r.dot(z);
    if (!std::isfinite(rz_next)) throw NumericalDivergence(k, "preconditioned residual");
    const double beta = rz_next / rz;
    rz = rz_next;
    p = z + beta * p;
  }

  report.wall_time = std::chrono::steady_clock::now() - start;
  return report;
}

}  // namespace pivchol
