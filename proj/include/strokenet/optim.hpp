// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "strokenet/tensor.hpp"

namespace strokenet {

template <typename T>
struct Parameter {
  Parameter() = default;
  Parameter(std::string name_, Tensor<T> value_)
      : name(std::move(name_)), value(std::move(value_)), velocity(value.numel(), T(0)) {}

  std::string name;
  Tensor<T> value;  // leaf, requires_grad
  std::vector<T> velocity;
};

struct OptimizerConfig {
  double learning_rate = 1e-4;
  double momentum = 0.5;
  int epochs = 2000;

  void validate() const;
};

// Classical momentum: v <- momentum*v + g; w <- w - lr*v.
// Parameters whose gradient was never populated are left untouched.
template <typename T>
void sgd_step(std::span<Parameter<T>* const> params, const OptimizerConfig& cfg);

template <typename T>
void zero_grads(std::span<Parameter<T>* const> params);

}  // namespace strokenet
