// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "strokenet/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace strokenet {

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

double compare_with_finite_differences(const std::function<Tensor<double>(const Tensor<double>&)>& f,
                                       Tensor<double>& x, std::span<const double> analytic,
                                       double h) {
  if (analytic.size() != x.numel()) throw std::invalid_argument("gradient size mismatch");
  NoGradGuard no_grad;
  auto values = x.mutable_data();
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + h;
    const double up = f(x).item();
    values[i] = saved - h;
    const double down = f(x).item();
    values[i] = saved;
    worst = std::max(worst, relative_error((up - down) / (2.0 * h), analytic[i]));
  }
  return worst;
}

double grad_check(const std::function<Tensor<double>(const Tensor<double>&)>& f, Tensor<double> x,
                  double h) {
  if (!x.requires_grad()) throw std::invalid_argument("grad_check: x must require grad");
  x.zero_grad();
  f(x).backward();
  std::vector<double> analytic(x.numel(), 0.0);
  if (x.has_grad()) std::copy(x.grad().begin(), x.grad().end(), analytic.begin());
  return compare_with_finite_differences(f, x, analytic, h);
}

double grad_check_parameters(const std::function<Tensor<double>()>& loss,
                             std::span<Parameter<double>* const> params, double h) {
  for (auto* p : params) p->value.zero_grad();
  loss().backward();
  double worst = 0.0;
  NoGradGuard no_grad;
  for (auto* p : params) {
    auto values = p->value.mutable_data();
    std::vector<double> analytic(values.size(), 0.0);
    if (p->value.has_grad()) std::copy(p->value.grad().begin(), p->value.grad().end(), analytic.begin());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      const double up = loss().item();
      values[i] = saved - h;
      const double down = loss().item();
      values[i] = saved;
      worst = std::max(worst, relative_error((up - down) / (2.0 * h), analytic[i]));
    }
  }
  return worst;
}

double grad_check_parameters_normwise(const std::function<Tensor<double>()>& loss,
                                      std::span<Parameter<double>* const> params, double h) {
  for (auto* p : params) p->value.zero_grad();
  loss().backward();
  double diff = 0.0;
  double scale = 1e-8;
  NoGradGuard no_grad;
  for (auto* p : params) {
    auto values = p->value.mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double analytic = p->value.has_grad() ? p->value.grad()[i] : 0.0;
      const double saved = values[i];
      values[i] = saved + h;
      const double up = loss().item();
      values[i] = saved - h;
      const double down = loss().item();
      values[i] = saved;
      diff = std::max(diff, std::abs((up - down) / (2.0 * h) - analytic));
      scale = std::max(scale, std::abs(analytic));
    }
  }
  return diff / scale;
}

}  // namespace strokenet
