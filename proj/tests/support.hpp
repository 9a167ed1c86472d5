#pragma once

// Shared fixtures and dense reference implementations. Everything here is
// deliberately naive: explicit matrices, textbook formulas, no pivoted
// bookkeeping shared with the library.

#include "pivchol/kernel.hpp"
#include "pivchol/pivoted_cholesky.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

namespace pivchol::testing {

inline Dataset random_dataset(Index n, Index d, std::uint64_t seed, double spread = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, spread);
  Dataset data;
  data.X.resize(n, d);
  data.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) data.X(i, j) = normal(rng);
    data.y[i] = normal(rng);
  }
  return data;
}

inline KernelConfig kernel(Index d, double theta, double lengthscale, double noise,
                           double jitter = 0.0) {
  KernelConfig c = KernelConfig::isotropic(d, theta, lengthscale, noise);
  c.jitter = jitter;
  return c;
}

inline GramOperator make_op(const Dataset& data, const KernelConfig& config,
                            GramMode mode = GramMode::Noisy, bool cache = false) {
  GramOptions options;
  options.dense_cache = cache;
  return GramOperator(std::make_shared<const Dataset>(data), config, mode, options);
}

// Kernel matrix straight from the formula.
inline Eigen::MatrixXd dense_kernel(const Dataset& data, const KernelConfig& c) {
  const Index n = data.size();
  Eigen::MatrixXd k(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Index d = 0; d < data.dim(); ++d) {
        const double t = (data.X(i, d) - data.X(j, d)) / c.lengthscales[d];
        s += t * t;
      }
      k(i, j) = c.signal_variance * std::exp(-0.5 * s);
    }
  }
  return k;
}

inline Eigen::MatrixXd dense_noisy(const Dataset& data, const KernelConfig& c) {
  Eigen::MatrixXd g = dense_kernel(data, c);
  g.diagonal().array() += c.noise_variance + c.jitter;
  return g;
}

// P^T A P for the pivot vector (row k of the result is row pivots[k] of A).
inline Eigen::MatrixXd permute(const Eigen::MatrixXd& a, const std::vector<Index>& pivots) {
  const auto n = static_cast<Index>(pivots.size());
  Eigen::MatrixXd out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) out(i, j) = a(pivots[i], pivots[j]);
  }
  return out;
}

inline Eigen::MatrixXd submatrix(const Eigen::MatrixXd& a, const std::vector<Index>& rows,
                                 const std::vector<Index>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = a(rows[i], cols[j]);
  }
  return out;
}

inline std::vector<Index> all_indices(Index n) {
  std::vector<Index> v(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

// Nystrom matrix A_XI A_II^{-1} A_IX over all rows, in the original order.
inline Eigen::MatrixXd nystrom(const Eigen::MatrixXd& a, const std::vector<Index>& inducing) {
  const auto all = all_indices(a.rows());
  if (inducing.empty()) return Eigen::MatrixXd::Zero(a.rows(), a.cols());
  const Eigen::MatrixXd axi = submatrix(a, all, inducing);
  const Eigen::MatrixXd aii = submatrix(a, inducing, inducing);
  return axi * aii.ldlt().solve(axi.transpose());
}

// Dense Schur complement A - Nystrom(A, I) in the original order.
inline Eigen::MatrixXd dense_schur(const Eigen::MatrixXd& a, const std::vector<Index>& inducing) {
  return a - nystrom(a, inducing);
}

inline double rel_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

inline double rel_inf(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).lpNorm<Eigen::Infinity>() / std::max(b.lpNorm<Eigen::Infinity>(), 1e-300);
}

// Exact negative log marginal likelihood of N(y | mu, K + s2 I).
inline double exact_nlml(const Eigen::MatrixXd& k, double noise, const Eigen::VectorXd& r) {
  Eigen::MatrixXd g = k;
  g.diagonal().array() += noise;
  const Eigen::LLT<Eigen::MatrixXd> llt(g);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return 0.5 * static_cast<double>(k.rows()) * std::log(2.0 * std::numbers::pi) +
         0.5 * r.dot(llt.solve(r)) + 0.5 * logdet;
}

// Plain conjugate gradients on a dense matrix, with the iterates recorded.
inline std::vector<Eigen::VectorXd> plain_cg(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                             int iterations) {
  std::vector<Eigen::VectorXd> iterates;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  double rr = r.dot(r);
  for (int k = 0; k < iterations; ++k) {
    const Eigen::VectorXd ap = a * p;
    const double alpha = rr / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    iterates.push_back(x);
    const double rr_next = r.dot(r);
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return iterates;
}

// Greedy reference that rebuilds the Schur complement densely at every step.
inline std::vector<Index> dense_var_order(const Eigen::MatrixXd& g, Index steps) {
  std::vector<Index> chosen;
  for (Index s = 0; s < steps; ++s) {
    const Eigen::MatrixXd schur = dense_schur(g, chosen);
    Index best = -1;
    for (Index j = 0; j < g.rows(); ++j) {
      if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
      if (best < 0 || schur(j, j) > schur(best, best)) best = j;
    }
    chosen.push_back(best);
  }
  return chosen;
}

// Two-vector form of the projection update: z and s are separate arrays and
// the Cholesky factor is rebuilt from a dense matrix with explicit row swaps.
inline std::vector<Index> two_vector_pcov_order(const Eigen::MatrixXd& g, const Eigen::VectorXd& w,
                                         Index steps) {
  const Index n = g.rows();
  std::vector<Index> perm = all_indices(n);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, steps);
  Eigen::VectorXd d = g.diagonal();
  const Eigen::VectorXd s_star_orig = g * w;
  Eigen::VectorXd s_star = s_star_orig;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(steps);

  std::vector<Index> order;
  for (Index m = 0; m < steps; ++m) {
    Index best = m;
    double best_score = -1.0;
    for (Index j = m; j < n; ++j) {
      const double r = s_star[j] - s[j];
      if (r * r > best_score) {
        best_score = r * r;
        best = j;
      }
    }
    std::swap(perm[m], perm[best]);
    std::swap(d[m], d[best]);
    std::swap(s_star[m], s_star[best]);
    std::swap(s[m], s[best]);
    l.row(m).swap(l.row(best));

    const double pivot = std::sqrt(d[m]);
    l(m, m) = pivot;
    for (Index j = m + 1; j < n; ++j) {
      double v = g(perm[j], perm[m]);
      for (Index k = 0; k < m; ++k) v -= l(j, k) * l(m, k);
      l(j, m) = v / pivot;
      d[j] -= l(j, m) * l(j, m);
    }
    double acc = s_star[m];
    for (Index k = 0; k < m; ++k) acc -= l(m, k) * z[k];
    z[m] = acc / pivot;
    for (Index j = m + 1; j < n; ++j) s[j] += l(j, m) * z[m];
    order.push_back(perm[m]);
  }
  return order;
}

inline double log_det(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace pivchol::testing
