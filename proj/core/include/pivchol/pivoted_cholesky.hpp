#pragma once

#include "pivchol/kernel.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace pivchol {

enum class StrategyKind {
  Var,       // largest Schur-complement diagonal (standard pivoting)
  PCov,      // largest residual row sum, (s* - s)^2 with s* = G 1
  WPCov,     // as PCov with s* = G (y - mu)
  Weighted,  // as PCov with s* = G w for a caller-supplied w
  ME,        // largest squared residual of the projected targets
  MI,        // largest (thresholded) mutual information with the remaining set
  AOpt,      // largest exact trace reduction ||S_j||^2 / S_jj
  Random,    // uniform draw from a seeded stream
};

std::string_view to_string(StrategyKind kind);
// Accepts the lower-case names used on the command line: var, pcov, wpcov,
// weighted, me, mi, aopt, random.
StrategyKind parse_strategy_kind(std::string_view name);

struct Strategy {
  StrategyKind kind = StrategyKind::Var;
  // Required for Weighted; ignored otherwise.
  Eigen::VectorXd weights;
  // Neighbourhood threshold for MI, in [0, 1].
  double mi_threshold = 0.5;
  // Seed of the Random strategy's private stream.
  std::uint64_t seed = 0;

  static Strategy of(StrategyKind kind) { return Strategy{kind, {}, 0.5, 0}; }
};

// Low-rank factor of P^T G P in pivoted order. Column m has zeros above row m
// and the Schur diagonal d holds G_jj - sum_m L_jm^2.
struct PartialCholesky {
  std::vector<Eigen::VectorXd> cols;
  // pivots[k] is the original index stored at pivoted position k.
  std::vector<Index> pivots;
  Eigen::VectorXd schur_diag;
  // Kernel scale of the operator that was factorized.
  double scale = 1.0;
  // sum(d) before the first step and after every step.
  std::vector<double> trace_history;

  static PartialCholesky initial(const GramOperator& op);

  Index size() const { return schur_diag.size(); }
  Index rank() const { return static_cast<Index>(cols.size()); }
  // Sum of d over the not-yet-selected positions.
  double residual_trace() const;
  // Original indices of the first rank() pivots, in selection order.
  std::vector<Index> selected() const;
  // Dense N x M factor in pivoted order.
  Eigen::MatrixXd factor() const;
};

// Per-strategy scores and recursion vectors, all in pivoted order.
struct StrategyState {
  StrategyKind kind = StrategyKind::Var;
  // Var reads the Schur diagonal directly and leaves this empty.
  Eigen::VectorXd score;
  // Projection family: s* = G w, fixed after initialisation.
  Eigen::VectorXd s_star;
  // Projection family: the first M entries hold z = L_II^{-1} s*_I, the rest
  // hold the running projection L_RI z.
  Eigen::VectorXd s_vec;
  // ME: the first M entries hold L_II^{-1} (y - mu)_I, the rest hold the
  // residual (y - mu) - L_XI L_II^{-1} (y - mu)_I.
  Eigen::VectorXd residual;
  // y - mu in pivoted order.
  Eigen::VectorXd targets;
  double mi_threshold = 0.5;
  std::mt19937_64 rng;
  // Matrix-vector products spent on initialisation.
  int mvp_count = 0;
};

// `y` may be empty for strategies that ignore targets (Var, PCov, Weighted,
// MI, AOpt, Random).
StrategyState init_strategy(const Strategy& strategy, const GramOperator& op,
                            const Eigen::VectorXd& y);

// Argmax of the score over positions [M, N) whose Schur diagonal exceeds
// `rank_tolerance`; ties go to the lowest position. Throws PivotBreakdown
// when no position qualifies.
Index select_pivot(StrategyState& state, const PartialCholesky& pc, double rank_tolerance);

// Selects a pivot, swaps it to position M, appends the new column and
// updates the strategy in O(N) (MI and AOpt rescore densely).
// Returns the original index of the selected point.
Index cholesky_step(PartialCholesky& pc, StrategyState& state, const GramOperator& op,
                    double rank_tolerance);

struct DecomposeOptions {
  // Target rank; defaults to N.
  std::optional<Index> rank;
  // Stop once residual_trace() <= trace_tolerance * initial trace (0 disables).
  double trace_tolerance = 0.0;
  // Breakdown threshold relative to the operator scale.
  double rank_tolerance = 1e-10;
  // Called after every completed step.
  std::function<void(const PartialCholesky&, const StrategyState&)> on_step;
};

// Runs cholesky_step until the target rank or trace tolerance is reached.
// A breakdown ends the run early unless the full rank N was requested, in
// which case PivotBreakdown propagates.
PartialCholesky decompose(const GramOperator& op, const Eigen::VectorXd& y,
                          const Strategy& strategy, const DecomposeOptions& options = {});

// Factorizes `op` along a fixed pivot order, skipping pivots that have become
// linearly dependent (Schur diagonal <= rank_tolerance * scale).
PartialCholesky replay(const GramOperator& op, const std::vector<Index>& order,
                       double rank_tolerance = 1e-10);

// Dense Schur complement over the remaining positions [M, N), pivoted order.
Eigen::MatrixXd schur_complement(const GramOperator& op, const PartialCholesky& pc);

// Mutual information of each point with the rest of `schur`, conditioning only
// on neighbours whose normalized covariance exceeds `threshold`:
//   score_j = log S_jj - log(S_jj - S_jQ S_QQ^{-1} S_Qj).
// `scale` sets the jitter used when S_QQ is singular.
Eigen::VectorXd mi_score(const Eigen::MatrixXd& schur, double threshold, double scale = 1.0);

// score_j = ||S_:j||^2 / S_jj. Throws NumericalError if S_jj <= 0.
Eigen::VectorXd aopt_score(const Eigen::MatrixXd& schur);

}  // namespace pivchol
