// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>

#include "faqir/error.hpp"
#include "faqir/simd/kernels.hpp"
#include "faqir/training.hpp"

namespace faqir {

HeadGradients HeadGradients::zeros_like(const TenantHead& head) {
  return {std::vector<float>(head.weight.size(), 0.0f), std::vector<float>(head.bias.size(), 0.0f)};
}

void HeadGradients::clear() {
  std::fill(weight.begin(), weight.end(), 0.0f);
  std::fill(bias.begin(), bias.end(), 0.0f);
}

AdamWState AdamWState::zeros_like(const TenantHead& head) {
  AdamWState s;
  s.m_weight.assign(head.weight.size(), 0.0f);
  s.v_weight.assign(head.weight.size(), 0.0f);
  s.m_bias.assign(head.bias.size(), 0.0f);
  s.v_bias.assign(head.bias.size(), 0.0f);
  return s;
}

std::size_t warmup_steps(std::size_t total_steps, double warmup_fraction) {
  return static_cast<std::size_t>(std::floor(warmup_fraction * static_cast<double>(total_steps)));
}

double scheduled_lr(double base_lr, std::size_t step, std::size_t total_steps, std::size_t warmup) {
  if (step >= total_steps) return 0.0;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double s = static_cast<double>(step);
  const double rise = warmup == 0 ? kInf : s / static_cast<double>(warmup);
  const double fall = total_steps == warmup
                          ? kInf
                          : (static_cast<double>(total_steps) - s) /
                                static_cast<double>(total_steps - warmup);
  return base_lr * std::min({rise, fall, 1.0});
}

namespace {

void check_finite(const std::vector<float>& g, const char* tensor) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i])) {
      fail(ErrorCode::kNumerical, std::string("non-finite gradient in ") + tensor + "[" +
                                      std::to_string(i) + "] = " + std::to_string(g[i]));
    }
  }
}

}  // namespace

StepInfo optimizer_step(TenantHead& head, HeadGradients& grads, AdamWState& state,
                        std::size_t step_index, const TrainConfig& config) {
  if (grads.weight.size() != head.weight.size() || grads.bias.size() != head.bias.size() ||
      state.m_weight.size() != head.weight.size() || state.m_bias.size() != head.bias.size()) {
    fail(ErrorCode::kDimensionMismatch, "optimizer tensors do not match the head");
  }
  check_finite(grads.weight, "weight gradient");
  check_finite(grads.bias, "bias gradient");

  double sq = 0.0;
  for (float g : grads.weight) sq += static_cast<double>(g) * g;
  for (float g : grads.bias) sq += static_cast<double>(g) * g;
  StepInfo info;
  info.grad_norm = std::sqrt(sq);
  if (info.grad_norm > config.max_grad_norm && info.grad_norm > 0.0) {
    const float scale = static_cast<float>(config.max_grad_norm / info.grad_norm);
    for (auto& g : grads.weight) g *= scale;
    for (auto& g : grads.bias) g *= scale;
  }

  info.learning_rate = scheduled_lr(config.learning_rate, step_index, config.iterations,
                                    warmup_steps(config.iterations, config.warmup_fraction));
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  const double t = static_cast<double>(step_index + 1);
  simd::AdamWStep step{static_cast<float>(info.learning_rate),
                       static_cast<float>(kBeta1),
                       static_cast<float>(kBeta2),
                       1e-8f,
                       static_cast<float>(config.weight_decay),
                       static_cast<float>(1.0 - std::pow(kBeta1, t)),
                       static_cast<float>(1.0 - std::pow(kBeta2, t))};
  const auto& k = simd::active();
  k.adamw_update(head.weight.data(), state.m_weight.data(), state.v_weight.data(),
                 grads.weight.data(), head.weight.size(), step);
  step.weight_decay = 0.0f;
  k.adamw_update(head.bias.data(), state.m_bias.data(), state.v_bias.data(), grads.bias.data(),
                 head.bias.size(), step);
  return info;
}

}  // namespace faqir
