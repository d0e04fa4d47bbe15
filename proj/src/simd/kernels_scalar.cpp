// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "faqir/simd/kernels.hpp"

namespace faqir::simd {
namespace {

float dot_scalar(const float* a, const float* b, std::size_t n) {
  float sum = 0.0f;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_scalar(float alpha, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const float* w, const float* x, const float* bias, float* y,
                 std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    float acc = dot_scalar(w + r * cols, x, cols);
    y[r] = bias ? acc + bias[r] : acc;
  }
}

void rank1_update_scalar(float* w, float alpha, const float* u, const float* v,
                         std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    axpy_scalar(alpha * u[r], v, w + r * cols, cols);
  }
}

void dot_rows_scalar(const float* m, const float* q, float* out, std::size_t rows,
                     std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_scalar(m + r * cols, q, cols);
}

void adamw_update_scalar(float* param, float* m, float* v, const float* grad,
                         std::size_t n, const AdamWStep& s) {
  const float decay = 1.0f - s.lr * s.weight_decay;
  for (std::size_t i = 0; i < n; ++i) {
    const float g = grad[i];
    m[i] = s.beta1 * m[i] + (1.0f - s.beta1) * g;
    v[i] = s.beta2 * v[i] + (1.0f - s.beta2) * g * g;
    const float m_hat = m[i] / s.bias_correction1;
    const float v_hat = v[i] / s.bias_correction2;
    param[i] = param[i] * decay - s.lr * m_hat / (std::sqrt(v_hat) + s.epsilon);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::kScalar,       dot_scalar,      axpy_scalar,
                                 gemv_scalar,        rank1_update_scalar, dot_rows_scalar,
                                 adamw_update_scalar};
  return table;
}

}  // namespace faqir::simd
