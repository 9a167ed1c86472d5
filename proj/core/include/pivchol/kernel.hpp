#pragma once

#include <Eigen/Core>

#include <memory>
#include <optional>

namespace pivchol {

using Index = Eigen::Index;

// Inputs X (N x D) and targets y (N). Rows are data points.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  Index size() const { return X.rows(); }
  Index dim() const { return X.cols(); }

  // Throws ContractViolation on empty data, shape mismatch or non-finite entries.
  void validate() const;

  // Rows reordered so that row k of the result is row order[k] of this set.
  Dataset permuted(const std::vector<Index>& order) const;
};

// Exponentiated-quadratic kernel with one lengthscale per input dimension:
//   k(x, x') = theta * exp(-1/2 * sum_d (x_d - x'_d)^2 / l_d^2)
struct KernelConfig {
  double signal_variance = 1.0;
  Eigen::VectorXd lengthscales;
  double noise_variance = 0.0;
  double prior_mean = 0.0;
  // Added to the diagonal of G = K + noise*I on top of the noise.
  double jitter = 0.0;

  // Same lengthscale in every dimension; jitter defaults to 1e-10 * theta.
  static KernelConfig isotropic(Index dim, double signal_variance, double lengthscale,
                                double noise_variance);

  void validate(Index dim) const;
};

double kernel_eval(const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& x_other, const KernelConfig& config);

enum class GramMode {
  Latent,  // K
  Noisy,   // G = K + (noise + jitter) * I
};

struct GramOptions {
  // Materialize K once. Only allowed when N <= dense_cache_cap.
  bool dense_cache = false;
  Index dense_cache_cap = 4096;
  // Worker count for mvp(); results do not depend on it.
  unsigned threads = 1;
};

// Matrix-free access to K or G over a dataset. Immutable after construction;
// copies share the underlying data.
class GramOperator {
 public:
  GramOperator(std::shared_ptr<const Dataset> data, KernelConfig config,
               GramMode mode = GramMode::Noisy, GramOptions options = {});

  // Wraps an explicit symmetric latent matrix. In Noisy mode noise_variance is
  // added to the diagonal. The kernel scale is the largest diagonal entry.
  static GramOperator from_matrix(Eigen::MatrixXd latent, double noise_variance = 0.0,
                                  GramMode mode = GramMode::Latent);

  Index size() const { return n_; }
  GramMode mode() const { return mode_; }
  const KernelConfig& config() const { return shared_->config; }
  const Dataset* dataset() const { return shared_->data.get(); }
  bool cached() const { return shared_->dense.has_value(); }

  // Kernel diagonal (theta); reference scale for relative tolerances.
  double scale() const { return shared_->scale; }
  // What G mode adds to the diagonal: noise + jitter. Zero in K mode.
  double diagonal_shift() const;

  GramOperator with_mode(GramMode mode) const;

  double entry(Index i, Index j) const;
  Eigen::VectorXd diagonal() const;
  Eigen::VectorXd row(Index i) const;
  Eigen::VectorXd mvp(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  Eigen::MatrixXd dense() const;

 private:
  struct Shared {
    std::shared_ptr<const Dataset> data;
    KernelConfig config;
    // Inputs divided by lengthscales, stored transposed (D x N) for column access.
    Eigen::MatrixXd scaled;
    std::optional<Eigen::MatrixXd> dense;
    double scale = 1.0;
    double explicit_shift = 0.0;
    unsigned threads = 1;
  };

  GramOperator(std::shared_ptr<const Shared> shared, GramMode mode, Index n)
      : shared_(std::move(shared)), mode_(mode), n_(n) {}

  double latent_entry(Index i, Index j) const;
  void check_index(Index i) const;

  std::shared_ptr<const Shared> shared_;
  GramMode mode_;
  Index n_;
};

}  // namespace pivchol
