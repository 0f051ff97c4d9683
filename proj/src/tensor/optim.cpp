// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "strokenet/optim.hpp"

#include <stdexcept>

namespace strokenet {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("optimizer.learning_rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("optimizer.momentum must lie in [0,1)");
  }
  if (epochs < 0) throw std::invalid_argument("optimizer.epochs must be nonnegative");
}

template <typename T>
void sgd_step(std::span<Parameter<T>* const> params, const OptimizerConfig& cfg) {
  const T lr = static_cast<T>(cfg.learning_rate);
  const T mu = static_cast<T>(cfg.momentum);
  for (Parameter<T>* p : params) {
    if (!p->value.has_grad()) continue;
    auto w = p->value.mutable_data();
    auto g = p->value.grad();
    auto& v = p->velocity;
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = mu * v[i] + g[i];
      w[i] -= lr * v[i];
    }
  }
}

template <typename T>
void zero_grads(std::span<Parameter<T>* const> params) {
  for (Parameter<T>* p : params) p->value.zero_grad();
}

template void sgd_step(std::span<Parameter<float>* const>, const OptimizerConfig&);
template void sgd_step(std::span<Parameter<double>* const>, const OptimizerConfig&);
template void zero_grads(std::span<Parameter<float>* const>);
template void zero_grads(std::span<Parameter<double>* const>);

}  // namespace strokenet
