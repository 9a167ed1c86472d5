#pragma once

#include "pivchol/kernel.hpp"
#include "pivchol/preconditioner.hpp"

#include <Eigen/Core>

#include <chrono>
#include <functional>
#include <vector>

namespace pivchol {

struct PcgOptions {
  // Relative residual ||y - G a|| / ||y|| at which the solve stops.
  double tolerance = 1e-4;
  // 0 means 10 * N.
  Index max_iterations = 0;
  // Every this many iterations the recursive residual is replaced by the
  // true residual y - G a (one extra MVP). 0 disables the replacement.
  Index true_residual_interval = 25;
  // Observes the iterate after each iteration (1-based count).
  std::function<void(Index, const Eigen::VectorXd&)> on_iterate;
};

struct PcgReport {
  Eigen::VectorXd solution;  // user order
  Index iterations = 0;
  bool converged = false;
  // Relative residual after each iteration. A converged run's last entry is
  // the true residual.
  std::vector<double> residual_history;
  std::chrono::nanoseconds wall_time{0};
};

// Solves G a = y by left-preconditioned conjugate gradients from a zero
// initial guess. With a preconditioner, M = L~ L~^T is applied in pivoted
// order and mapped back to user order internally.
// Throws NumericalDivergence if the recurrence produces non-finite values or
// loses positive curvature.
PcgReport pcg_solve(const GramOperator& op, const Eigen::Ref<const Eigen::VectorXd>& y,
                    const LowRankTriangular* preconditioner = nullptr,
                    const PcgOptions& options = {});

}  // namespace pivchol
