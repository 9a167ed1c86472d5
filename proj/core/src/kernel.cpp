#include "pivchol/kernel.hpp"

#include "pivchol/errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <thread>
#include <vector>

namespace pivchol {

namespace {

// Shared by kernel_eval and the operator so both give bit-identical values.
inline double eq_kernel(const double* x, const double* x_other, const double* lengthscales,
                        Index dim, double signal_variance) {
  double sq = 0.0;
  for (Index d = 0; d < dim; ++d) {
    const double r = (x[d] - x_other[d]) / lengthscales[d];
    sq += r * r;
  }
  return signal_variance * std::exp(-0.5 * sq);
}

}  // namespace

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1) {
    throw ContractViolation("dataset must have at least one row and one column");
  }
  if (y.size() != X.rows()) {
    throw ContractViolation("target length " + std::to_string(y.size()) +
                            " does not match row count " + std::to_string(X.rows()));
  }
  if (!X.allFinite() || !y.allFinite()) {
    throw ContractViolation("dataset contains non-finite entries");
  }
}

Dataset Dataset::permuted(const std::vector<Index>& order) const {
  if (static_cast<Index>(order.size()) != size()) {
    throw ContractViolation("permutation length does not match dataset size");
  }
  Dataset out;
  out.X.resize(X.rows(), X.cols());
  out.y.resize(y.size());
  for (Index k = 0; k < size(); ++k) {
    out.X.row(k) = X.row(order[k]);
    out.y[k] = y[order[k]];
  }
  return out;
}

KernelConfig KernelConfig::isotropic(Index dim, double signal_variance, double lengthscale,
                                     double noise_variance) {
  KernelConfig c;
  c.signal_variance = signal_variance;
  c.lengthscales = Eigen::VectorXd::Constant(dim, lengthscale);
  c.noise_variance = noise_variance;
  c.jitter = 1e-10 * signal_variance;
  return c;
}

void KernelConfig::validate(Index dim) const {
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw ContractViolation("signal variance must be positive");
  }
  if (lengthscales.size() != dim) {
    throw ContractViolation("expected " + std::to_string(dim) + " lengthscales, got " +
                            std::to_string(lengthscales.size()));
  }
  for (Index d = 0; d < dim; ++d) {
    if (!(lengthscales[d] > 0.0) || !std::isfinite(lengthscales[d])) {
      throw ContractViolation("lengthscale " + std::to_string(d) + " must be positive");
    }
  }
  if (!(noise_variance >= 0.0) || !(jitter >= 0.0)) {
    throw ContractViolation("noise variance and jitter must be non-negative");
  }
  if (!std::isfinite(prior_mean)) {
    throw ContractViolation("prior mean must be finite");
  }
}

double kernel_eval(const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& x_other, const KernelConfig& config) {
  const Index dim = config.lengthscales.size();
  if (x.size() != dim || x_other.size() != dim) {
    throw ContractViolation("kernel_eval: input dimension does not match lengthscales");
  }
  const Eigen::VectorXd a = x;
  const Eigen::VectorXd b = x_other;
  return eq_kernel(a.data(), b.data(), config.lengthscales.data(), dim, config.signal_variance);
}

GramOperator::GramOperator(std::shared_ptr<const Dataset> data, KernelConfig config,
                           GramMode mode, GramOptions options)
    : mode_(mode) {
  if (!data) throw ContractViolation("GramOperator: null dataset");
  data->validate();
  config.validate(data->dim());

  auto shared = std::make_shared<Shared>();
  shared->data = std::move(data);
  shared->config = std::move(config);
  shared->scaled = shared->data->X.transpose();
  shared->scale = shared->config.signal_variance;
  shared->threads = std::max(1u, options.threads);
  n_ = shared->data->size();

  if (options.dense_cache) {
    if (n_ > options.dense_cache_cap) {
      throw ContractViolation("dense cache requested for N=" + std::to_string(n_) +
                              " above cap " + std::to_string(options.dense_cache_cap));
    }
    shared_ = shared;
    Eigen::MatrixXd k(n_, n_);
    for (Index j = 0; j < n_; ++j) {
      for (Index i = j; i < n_; ++i) {
        const double v = latent_entry(i, j);
        k(i, j) = v;
        k(j, i) = v;
      }
    }
    shared->dense = std::move(k);
  }
  shared_ = std::move(shared);
}

GramOperator GramOperator::from_matrix(Eigen::MatrixXd latent, double noise_variance,
                                       GramMode mode) {
  if (latent.rows() != latent.cols() || latent.rows() < 1) {
    throw ContractViolation("from_matrix: expected a non-empty square matrix");
  }
  if (!latent.allFinite()) throw ContractViolation("from_matrix: non-finite entries");
  if (!(noise_variance >= 0.0)) throw ContractViolation("from_matrix: negative noise");
  auto shared = std::make_shared<Shared>();
  shared->scale = latent.diagonal().maxCoeff();
  if (!(shared->scale > 0.0)) throw ContractViolation("from_matrix: non-positive diagonal");
  shared->config.signal_variance = shared->scale;
  shared->config.noise_variance = noise_variance;
  shared->explicit_shift = noise_variance;
  const Index n = latent.rows();
  shared->dense = std::move(latent);
  return GramOperator(std::move(shared), mode, n);
}

double GramOperator::diagonal_shift() const {
  if (mode_ == GramMode::Latent) return 0.0;
  if (!shared_->data) return shared_->explicit_shift;
  return shared_->config.noise_variance + shared_->config.jitter;
}

GramOperator GramOperator::with_mode(GramMode mode) const {
  return GramOperator(shared_, mode, n_);
}

void GramOperator::check_index(Index i) const {
  if (i < 0 || i >= n_) {
    throw ContractViolation("index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(n_) + ")");
  }
}

double GramOperator::latent_entry(Index i, Index j) const {
  if (shared_->dense) return (*shared_->dense)(i, j);
  const auto& s = *shared_;
  const Index dim = s.scaled.rows();
  double v = eq_kernel(s.scaled.col(i).data(), s.scaled.col(j).data(),
                       s.config.lengthscales.data(), dim, s.config.signal_variance);
  assert(v >= 0.0);
  return v;
}

double GramOperator::entry(Index i, Index j) const {
  check_index(i);
  check_index(j);
  double v = latent_entry(i, j);
  if (i == j) v += diagonal_shift();
  return v;
}

Eigen::VectorXd GramOperator::diagonal() const {
  Eigen::VectorXd d(n_);
  for (Index i = 0; i < n_; ++i) d[i] = latent_entry(i, i) + diagonal_shift();
  return d;
}

Eigen::VectorXd GramOperator::row(Index i) const {
  check_index(i);
  Eigen::VectorXd r(n_);
  if (shared_->dense) {
    r = shared_->dense->row(i).transpose();
  } else {
    for (Index j = 0; j < n_; ++j) r[j] = latent_entry(i, j);
  }
  r[i] += diagonal_shift();
  return r;
}

Eigen::VectorXd GramOperator::mvp(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  if (v.size() != n_) {
    throw ContractViolation("mvp: vector length " + std::to_string(v.size()) +
                            " does not match operator size " + std::to_string(n_));
  }
  Eigen::VectorXd out(n_);
  const double shift = diagonal_shift();
  // Each row is reduced left to right, so the result does not depend on how
  // rows are split across workers.
  auto rows = [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      double acc = 0.0;
      if (shared_->dense) {
        const auto& k = *shared_->dense;
        for (Index j = 0; j < n_; ++j) acc += k(j, i) * v[j];
      } else {
        for (Index j = 0; j < n_; ++j) acc += latent_entry(i, j) * v[j];
      }
      out[i] = acc + shift * v[i];
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<Index>(shared_->threads, std::max<Index>(1, n_ / 64)));
  if (workers <= 1) {
    rows(0, n_);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    const Index chunk = (n_ + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const Index begin = w * chunk;
      const Index end = std::min(n_, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(rows, begin, end);
    }
  }
  return out;
}

Eigen::MatrixXd GramOperator::dense() const {
  Eigen::MatrixXd g(n_, n_);
  for (Index i = 0; i < n_; ++i) g.row(i) = row(i).transpose();
  return g;
}

}  // namespace pivchol
