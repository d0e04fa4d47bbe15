// SPDX-License-Identifier: Apache-2.0
#pragma once

// Float kernels behind the hot loops: index scans, head application,
// gradient accumulation and the AdamW update. Each kernel has a scalar
// reference implementation and, on x86-64, an AVX2+FMA variant picked at
// startup. Set FAQIR_SIMD=scalar to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace faqir::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa);

struct AdamWStep {
  float lr;
  float beta1;
  float beta2;
  float epsilon;
  float weight_decay;
  // 1 - beta^t for the current step.
  float bias_correction1;
  float bias_correction2;
};

struct KernelTable {
  Isa isa;
  float (*dot)(const float* a, const float* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(float alpha, const float* x, float* y, std::size_t n);
  // y = W x + bias, W row-major rows x cols; bias may be null.
  void (*gemv)(const float* w, const float* x, const float* bias, float* y,
               std::size_t rows, std::size_t cols);
  // W += alpha * u v^T
  void (*rank1_update)(float* w, float alpha, const float* u, const float* v,
                       std::size_t rows, std::size_t cols);
  // out[i] = dot(row i of m, q)
  void (*dot_rows)(const float* m, const float* q, float* out, std::size_t rows,
                   std::size_t cols);
  void (*adamw_update)(float* param, float* m, float* v, const float* grad,
                       std::size_t n, const AdamWStep& step);
};

const KernelTable& scalar_kernels();
// Null when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

// The table chosen for this process.
const KernelTable& active();

// Span conveniences over active().
float dot(std::span<const float> a, std::span<const float> b);
float squared_norm(std::span<const float> a);
void axpy(float alpha, std::span<const float> x, std::span<float> y);

}  // namespace faqir::simd
