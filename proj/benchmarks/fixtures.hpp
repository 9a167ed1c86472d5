#pragma once

#include "pivchol/kernel.hpp"

#include <memory>
#include <random>

namespace fixtures {

inline pivchol::GramOperator gram(pivchol::Index n, bool cache = false) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal;
  auto data = std::make_shared<pivchol::Dataset>();
  data->X.resize(n, 2);
  data->y.resize(n);
  for (auto& x : data->X.reshaped()) x = normal(rng);
  for (auto& v : data->y) v = normal(rng);
  pivchol::GramOptions options;
  options.dense_cache = cache;
  return pivchol::GramOperator(data, pivchol::KernelConfig::isotropic(2, 1.0, 0.5, 1e-2),
                               pivchol::GramMode::Noisy, options);
}

inline Eigen::VectorXd targets(const pivchol::GramOperator& op) { return op.dataset()->y; }

}  // namespace fixtures
