#include "pivchol/errors.hpp"
#include "pivchol/pivoted_cholesky.hpp"
#include "strategy_detail.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <utility>

namespace pivchol {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Dense rescoring strategies materialize the remaining Schur complement.
constexpr Index kDenseStrategyCap = 4096;

bool is_projection(StrategyKind kind) {
  return kind == StrategyKind::PCov || kind == StrategyKind::WPCov ||
         kind == StrategyKind::Weighted;
}

void rescore_dense(StrategyState& state, const PartialCholesky& pc, const GramOperator& op,
                   double tolerance) {
  const Index m = pc.rank();
  const Eigen::MatrixXd schur = schur_complement(op, pc);
  state.score.head(m).setConstant(kNegInf);
  if (state.kind == StrategyKind::MI) {
    state.score.tail(pc.size() - m) = mi_score(schur, state.mi_threshold, pc.scale);
    return;
  }
  // AOpt: candidates that are numerically dependent cannot be pivots.
  for (Index j = 0; j < schur.rows(); ++j) {
    const double sjj = schur(j, j);
    state.score[m + j] = sjj > tolerance ? schur.col(j).squaredNorm() / sjj : kNegInf;
  }
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Var: return "var";
    case StrategyKind::PCov: return "pcov";
    case StrategyKind::WPCov: return "wpcov";
    case StrategyKind::Weighted: return "weighted";
    case StrategyKind::ME: return "me";
    case StrategyKind::MI: return "mi";
    case StrategyKind::AOpt: return "aopt";
    case StrategyKind::Random: return "random";
  }
  return "unknown";
}

StrategyKind parse_strategy_kind(std::string_view name) {
  for (auto kind : {StrategyKind::Var, StrategyKind::PCov, StrategyKind::WPCov,
                    StrategyKind::Weighted, StrategyKind::ME, StrategyKind::MI,
                    StrategyKind::AOpt, StrategyKind::Random}) {
    if (to_string(kind) == name) return kind;
  }
  throw ContractViolation("unknown strategy '" + std::string(name) + "'");
}

StrategyState init_strategy(const Strategy& strategy, const GramOperator& op,
                            const Eigen::VectorXd& y) {
  const Index n = op.size();
  StrategyState state;
  state.kind = strategy.kind;
  state.mi_threshold = strategy.mi_threshold;

  const bool needs_targets =
      strategy.kind == StrategyKind::WPCov || strategy.kind == StrategyKind::ME;
  if (y.size() != 0 && y.size() != n) {
    throw ContractViolation("target length " + std::to_string(y.size()) +
                            " does not match operator size " + std::to_string(n));
  }
  if (needs_targets && y.size() == 0) {
    throw ContractViolation(std::string(to_string(strategy.kind)) + " requires targets");
  }
  state.targets = y.size() == 0 ? Eigen::VectorXd::Zero(n)
                                : Eigen::VectorXd(y.array() - op.config().prior_mean);

  switch (strategy.kind) {
    case StrategyKind::Var:
      break;
    case StrategyKind::PCov:
    case StrategyKind::WPCov:
    case StrategyKind::Weighted: {
      Eigen::VectorXd w;
      if (strategy.kind == StrategyKind::PCov) {
        w = Eigen::VectorXd::Ones(n);
      } else if (strategy.kind == StrategyKind::WPCov) {
        w = state.targets;
      } else {
        if (strategy.weights.size() != n) {
          throw ContractViolation("weighted strategy needs a weight vector of length " +
                                  std::to_string(n) + ", got " +
                                  std::to_string(strategy.weights.size()));
        }
        w = strategy.weights;
      }
      state.s_star = op.mvp(w);
      state.mvp_count = 1;
      state.s_vec = Eigen::VectorXd::Zero(n);
      state.score = state.s_star.array().square();
      break;
    }
    case StrategyKind::ME:
      state.residual = state.targets;
      state.score = state.residual.array().square();
      break;
    case StrategyKind::MI:
    case StrategyKind::AOpt: {
      if (strategy.kind == StrategyKind::MI &&
          !(strategy.mi_threshold >= 0.0 && strategy.mi_threshold <= 1.0)) {
        throw ContractViolation("MI threshold must lie in [0, 1]");
      }
      if (n > kDenseStrategyCap) {
        throw ContractViolation(std::string(to_string(strategy.kind)) +
                                " needs a dense Schur complement; N=" + std::to_string(n) +
                                " exceeds " + std::to_string(kDenseStrategyCap));
      }
      state.score = Eigen::VectorXd::Zero(n);
      rescore_dense(state, PartialCholesky::initial(op), op, 0.0);
      break;
    }
    case StrategyKind::Random:
      state.rng.seed(strategy.seed);
      break;
  }
  return state;
}

Index select_pivot(StrategyState& state, const PartialCholesky& pc, double rank_tolerance) {
  const Index n = pc.size();
  const Index m = pc.rank();
  if (m >= n) {
    throw ContractViolation("select_pivot: rank " + std::to_string(m) + " already equals N");
  }
  const auto& d = pc.schur_diag;

  if (state.kind == StrategyKind::Random) {
    std::vector<Index> eligible;
    eligible.reserve(static_cast<std::size_t>(n - m));
    for (Index j = m; j < n; ++j) {
      if (d[j] > rank_tolerance) eligible.push_back(j);
    }
    if (eligible.empty()) throw PivotBreakdown(m, d.tail(n - m).maxCoeff());
    std::uniform_int_distribution<std::size_t> draw(0, eligible.size() - 1);
    return eligible[draw(state.rng)];
  }

  const bool use_diag = state.kind == StrategyKind::Var;
  Index best = -1;
  double best_value = kNegInf;
  for (Index j = m; j < n; ++j) {
    if (!(d[j] > rank_tolerance)) continue;
    const double value = use_diag ? d[j] : state.score[j];
    if (best < 0 || value > best_value) {
      best = j;
      best_value = value;
    }
  }
  if (best < 0) throw PivotBreakdown(m, d.tail(n - m).maxCoeff());
  return best;
}

namespace detail {

void swap_positions(StrategyState& state, Index a, Index b) {
  if (a == b) return;
  for (Eigen::VectorXd* v : {&state.score, &state.s_star, &state.s_vec, &state.residual,
                             &state.targets}) {
    if (v->size() > 0) std::swap((*v)[a], (*v)[b]);
  }
}

void update_strategy(StrategyState& state, const PartialCholesky& pc, const GramOperator& op,
                     Index pos, double tolerance) {
  const Eigen::VectorXd& c = pc.cols.back();
  const Index n = pc.size();

  if (is_projection(state.kind)) {
    // First pos entries of s_vec already hold z; solve for z_pos in place.
    double acc = state.s_star[pos];
    for (Index k = 0; k < pos; ++k) acc -= pc.cols[k][pos] * state.s_vec[k];
    const double z = acc / c[pos];
    state.s_vec[pos] = z;
    state.score[pos] = kNegInf;
    for (Index j = pos + 1; j < n; ++j) {
      state.s_vec[j] += c[j] * z;
      const double r = state.s_star[j] - state.s_vec[j];
      state.score[j] = r * r;
    }
    return;
  }

  switch (state.kind) {
    case StrategyKind::ME: {
      double acc = state.targets[pos];
      for (Index k = 0; k < pos; ++k) acc -= pc.cols[k][pos] * state.residual[k];
      const double w = acc / c[pos];
      state.residual[pos] = w;
      state.score[pos] = kNegInf;
      for (Index j = pos + 1; j < n; ++j) {
        state.residual[j] -= c[j] * w;
        state.score[j] = state.residual[j] * state.residual[j];
      }
      break;
    }
    case StrategyKind::MI:
    case StrategyKind::AOpt:
      if (pc.rank() < n) rescore_dense(state, pc, op, tolerance);
      break;
    default:
      break;
  }
}

}  // namespace detail

Eigen::VectorXd mi_score(const Eigen::MatrixXd& schur, double threshold, double scale) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ContractViolation("MI threshold must lie in [0, 1]");
  }
  const Index r = schur.rows();
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(r);
  std::vector<Index> nbrs;
  for (Index j = 0; j < r; ++j) {
    const double sjj = schur(j, j);
    if (!(sjj > 0.0)) continue;
    nbrs.clear();
    for (Index i = 0; i < r; ++i) {
      if (i == j || !(schur(i, i) > 0.0)) continue;
      if (threshold == 0.0 || std::abs(schur(i, j)) > threshold * std::sqrt(schur(i, i) * sjj)) {
        nbrs.push_back(i);
      }
    }
    if (nbrs.empty()) continue;

    const auto q = static_cast<Index>(nbrs.size());
    Eigen::MatrixXd sqq(q, q);
    Eigen::VectorXd sqj(q);
    for (Index a = 0; a < q; ++a) {
      sqj[a] = schur(nbrs[a], j);
      for (Index b = 0; b < q; ++b) sqq(a, b) = schur(nbrs[a], nbrs[b]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sqq);
    if (llt.info() != Eigen::Success) {
      sqq.diagonal().array() += 1e-10 * scale;
      llt.compute(sqq);
      if (llt.info() != Eigen::Success) {
        throw NumericalError("mutual information: singular neighbourhood covariance for point " +
                             std::to_string(j));
      }
    }
    const double explained = sqj.dot(llt.solve(sqj));
    const double conditional = std::max(std::abs(sjj - explained), std::numeric_limits<double>::min());
    scores[j] = std::log(sjj) - std::log(conditional);
  }
  return scores;
}

Eigen::VectorXd aopt_score(const Eigen::MatrixXd& schur) {
  Eigen::VectorXd scores(schur.rows());
  for (Index j = 0; j < schur.rows(); ++j) {
    const double sjj = schur(j, j);
    if (!(sjj > 0.0)) {
      throw NumericalError("A-optimal score: non-positive Schur diagonal at " + std::to_string(j));
    }
    scores[j] = schur.col(j).squaredNorm() / sjj;
  }
  return scores;
}

}  // namespace pivchol
