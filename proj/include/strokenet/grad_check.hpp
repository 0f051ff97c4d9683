// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>

#include "strokenet/optim.hpp"
#include "strokenet/tensor.hpp"

namespace strokenet {

// Relative error |a-b| / max(|a|, |b|, 1e-8).
double relative_error(double a, double b);

// Worst relative error between `analytic` and central differences of f at x.
// f must be scalar-valued; x is perturbed in place and restored.
double compare_with_finite_differences(const std::function<Tensor<double>(const Tensor<double>&)>& f,
                                       Tensor<double>& x, std::span<const double> analytic,
                                       double h);

// Runs backward() on f(x) and compares the resulting gradient of x with
// central differences. x must require grad.
double grad_check(const std::function<Tensor<double>(const Tensor<double>&)>& f, Tensor<double> x,
                  double h = 1e-6);

// Same check across every coordinate of every parameter, for a loss closure
// that reads the parameters directly.
double grad_check_parameters(const std::function<Tensor<double>()>& loss,
                             std::span<Parameter<double>* const> params, double h = 1e-6);

// Normwise form over the whole parameter set:
// max_i |fd_i - analytic_i| / max(max_i |analytic_i|, 1e-8). Deep networks
// have entries whose true gradient sits at the finite-difference noise floor,
// which makes the entrywise maximum meaningless there.
double grad_check_parameters_normwise(const std::function<Tensor<double>()>& loss,
                                      std::span<Parameter<double>* const> params, double h = 1e-6);

}  // namespace strokenet
