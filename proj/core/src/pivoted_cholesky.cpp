#include "pivchol/pivoted_cholesky.hpp"

#include "pivchol/errors.hpp"
#include "strategy_detail.hpp"

#include <numeric>
#include <utility>

namespace pivchol {

namespace {

void swap_positions(PartialCholesky& pc, Index a, Index b) {
  if (a == b) return;
  std::swap(pc.pivots[a], pc.pivots[b]);
  std::swap(pc.schur_diag[a], pc.schur_diag[b]);
  for (auto& col : pc.cols) std::swap(col[a], col[b]);
}

// Appends the column for the pivot already moved to position rank().
void append_column(PartialCholesky& pc, const GramOperator& op) {
  const Index n = pc.size();
  const Index m = pc.rank();
  const Index tail = n - m;

  const Eigen::VectorXd row = op.row(pc.pivots[m]);
  Eigen::VectorXd c(n);
  c.head(m).setZero();
  for (Index j = m; j < n; ++j) c[j] = row[pc.pivots[j]];
  for (Index k = 0; k < m; ++k) {
    const double coef = pc.cols[k][m];
    if (coef != 0.0) c.tail(tail) -= coef * pc.cols[k].tail(tail);
  }

  const double diag = std::sqrt(pc.schur_diag[m]);
  c[m] = diag;
  c.tail(tail - 1) /= diag;

  pc.schur_diag[m] = 0.0;
  for (Index j = m + 1; j < n; ++j) pc.schur_diag[j] -= c[j] * c[j];

  pc.cols.push_back(std::move(c));
  pc.trace_history.push_back(pc.residual_trace());
}

}  // namespace

PartialCholesky PartialCholesky::initial(const GramOperator& op) {
  PartialCholesky pc;
  pc.schur_diag = op.diagonal();
  pc.pivots.resize(static_cast<std::size_t>(op.size()));
  std::iota(pc.pivots.begin(), pc.pivots.end(), Index{0});
  pc.scale = op.scale();
  pc.trace_history.push_back(pc.schur_diag.sum());
  return pc;
}

double PartialCholesky::residual_trace() const {
  return schur_diag.tail(size() - rank()).sum();
}

std::vector<Index> PartialCholesky::selected() const {
  return {pivots.begin(), pivots.begin() + rank()};
}

Eigen::MatrixXd PartialCholesky::factor() const {
  Eigen::MatrixXd l(size(), rank());
  for (Index k = 0; k < rank(); ++k) l.col(k) = cols[static_cast<std::size_t>(k)];
  return l;
}

Index cholesky_step(PartialCholesky& pc, StrategyState& state, const GramOperator& op,
                    double rank_tolerance) {
  if (op.size() != pc.size()) {
    throw ContractViolation("cholesky_step: operator and factor sizes differ");
  }
  const Index m = pc.rank();
  const double tolerance = rank_tolerance * pc.scale;
  const Index chosen = select_pivot(state, pc, tolerance);
  swap_positions(pc, m, chosen);
  detail::swap_positions(state, m, chosen);
  append_column(pc, op);
  detail::update_strategy(state, pc, op, m, tolerance);
  return pc.pivots[m];
}

PartialCholesky decompose(const GramOperator& op, const Eigen::VectorXd& y,
                          const Strategy& strategy, const DecomposeOptions& options) {
  const Index n = op.size();
  const Index target = options.rank.value_or(n);
  if (target < 0 || target > n) {
    throw ContractViolation("decompose: target rank " + std::to_string(target) +
                            " outside [0, " + std::to_string(n) + "]");
  }
  if (!(options.trace_tolerance >= 0.0) || !(options.rank_tolerance >= 0.0)) {
    throw ContractViolation("decompose: tolerances must be non-negative");
  }

  PartialCholesky pc = PartialCholesky::initial(op);
  StrategyState state = init_strategy(strategy, op, y);
  const double initial_trace = pc.residual_trace();

  while (pc.rank() < target) {
    if (options.trace_tolerance > 0.0 &&
        pc.residual_trace() <= options.trace_tolerance * initial_trace) {
      break;
    }
    try {
      cholesky_step(pc, state, op, options.rank_tolerance);
    } catch (const PivotBreakdown&) {
      if (target == n) throw;
      break;
    }
    if (options.on_step) options.on_step(pc, state);
  }
  return pc;
}

PartialCholesky replay(const GramOperator& op, const std::vector<Index>& order,
                       double rank_tolerance) {
  PartialCholesky pc = PartialCholesky::initial(op);
  const Index n = pc.size();
  const double tolerance = rank_tolerance * pc.scale;
  for (Index original : order) {
    if (original < 0 || original >= n) {
      throw ContractViolation("replay: pivot " + std::to_string(original) + " out of range");
    }
    Index pos = -1;
    for (Index j = pc.rank(); j < n; ++j) {
      if (pc.pivots[j] == original) {
        pos = j;
        break;
      }
    }
    if (pos < 0) throw ContractViolation("replay: pivot " + std::to_string(original) + " repeated");
    if (!(pc.schur_diag[pos] > tolerance)) continue;
    swap_positions(pc, pc.rank(), pos);
    append_column(pc, op);
  }
  return pc;
}

Eigen::MatrixXd schur_complement(const GramOperator& op, const PartialCholesky& pc) {
  const Index n = pc.size();
  const Index m = pc.rank();
  const Index r = n - m;
  Eigen::MatrixXd s(r, r);
  for (Index b = 0; b < r; ++b) {
    for (Index a = b; a < r; ++a) {
      const double v = op.entry(pc.pivots[m + a], pc.pivots[m + b]);
      s(a, b) = v;
      s(b, a) = v;
    }
  }
  if (m > 0) {
    Eigen::MatrixXd lr(r, m);
    for (Index k = 0; k < m; ++k) lr.col(k) = pc.cols[k].tail(r);
    s.noalias() -= lr * lr.transpose();
  }
  return s;
}

}  // namespace pivchol
