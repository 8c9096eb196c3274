//
// Project MolPair - Copyright 2026 MolPair Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "molpair/core/kernels.hpp"

#include <atomic>
#include <cstdint>

namespace molpair::kernels {

namespace {
std::atomic<Backend> g_backend{Backend::parallel};
}

Backend backend() noexcept { return g_backend.load(std::memory_order_relaxed); }
void set_backend(Backend b) noexcept { g_backend.store(b, std::memory_order_relaxed); }

namespace detail {

void matmul_serial(const double* a, const double* b, double* y, std::size_t m,
                   std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* yrow = y + i * n;
    for (std::size_t j = 0; j < n; ++j) yrow[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) yrow[j] += aip * brow[j];
    }
  }
}

void matmul_parallel(const double* a, const double* b, double* y, std::size_t m,
                     std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    double* yrow = y + i * n;
    for (std::size_t j = 0; j < n; ++j) yrow[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) yrow[j] += aip * brow[j];
    }
  }
}

void matmul_at_b_serial(const double* a, const double* b, double* y, std::size_t m,
                        std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* yrow = y + i * n;
    for (std::size_t j = 0; j < n; ++j) yrow[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[p * m + i];
      if (aip == 0.0) continue;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) yrow[j] += aip * brow[j];
    }
  }
}

void matmul_at_b_parallel(const double* a, const double* b, double* y, std::size_t m,
                          std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    double* yrow = y + i * n;
    for (std::size_t j = 0; j < n; ++j) yrow[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[p * m + i];
      if (aip == 0.0) continue;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) yrow[j] += aip * brow[j];
    }
  }
}

void matmul_a_bt_serial(const double* a, const double* b, double* y, std::size_t m,
                        std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* yrow = y + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      yrow[j] = acc;
    }
  }
}

void matmul_a_bt_parallel(const double* a, const double* b, double* y, std::size_t m,
                          std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    const double* arow = a + i * k;
    double* yrow = y + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      yrow[j] = acc;
    }
  }
}

void conv1d_forward_serial(const double* x, const double* w, double* y,
                           std::size_t in_ch, std::size_t len, std::size_t out_ch,
                           std::size_t k) {
  const std::size_t out_len = len - k + 1;
  for (std::size_t oc = 0; oc < out_ch; ++oc) {
    const double* wrow = w + oc * in_ch * k;
    double* yrow = y + oc * out_len;
    for (std::size_t t = 0; t < out_len; ++t) {
      double acc = 0.0;
      for (std::size_t ic = 0; ic < in_ch; ++ic) {
        const double* xrow = x + ic * len + t;
        const double* wk = wrow + ic * k;
        for (std::size_t q = 0; q < k; ++q) acc += xrow[q] * wk[q];
      }
      yrow[t] = acc;
    }
  }
}

void conv1d_forward_parallel(const double* x, const double* w, double* y,
                             std::size_t in_ch, std::size_t len, std::size_t out_ch,
                             std::size_t k) {
  const std::size_t out_len = len - k + 1;
#pragma omp parallel for schedule(static)
  for (std::int64_t oc = 0; oc < static_cast<std::int64_t>(out_ch); ++oc) {
    const double* wrow = w + oc * in_ch * k;
    double* yrow = y + oc * out_len;
    for (std::size_t t = 0; t < out_len; ++t) {
      double acc = 0.0;
      for (std::size_t ic = 0; ic < in_ch; ++ic) {
        const double* xrow = x + ic * len + t;
        const double* wk = wrow + ic * k;
        for (std::size_t q = 0; q < k; ++q) acc += xrow[q] * wk[q];
      }
      yrow[t] = acc;
    }
  }
}

void conv1d_backward_input_serial(const double* dy, const double* w, double* dx,
                                  std::size_t in_ch, std::size_t len, std::size_t out_ch,
                                  std::size_t k) {
  const std::size_t out_len = len - k + 1;
  for (std::size_t ic = 0; ic < in_ch; ++ic) {
    double* dxrow = dx + ic * len;
    for (std::size_t p = 0; p < len; ++p) {
      double acc = 0.0;
      for (std::size_t oc = 0; oc < out_ch; ++oc) {
        const double* wk = w + oc * in_ch * k + ic * k;
        const double* dyrow = dy + oc * out_len;
        // y[t] touched x[t + q]; invert: t = p - q
        const std::size_t qlo = (p + 1 > out_len) ? (p + 1 - out_len) : 0;
        for (std::size_t q = qlo; q < k && q <= p; ++q) acc += wk[q] * dyrow[p - q];
      }
      dxrow[p] += acc;
    }
  }
}

void conv1d_backward_input_parallel(const double* dy, const double* w, double* dx,
                                    std::size_t in_ch, std::size_t len,
                                    std::size_t out_ch, std::size_t k) {
  const std::size_t out_len = len - k + 1;
#pragma omp parallel for schedule(static)
  for (std::int64_t ic = 0; ic < static_cast<std::int64_t>(in_ch); ++ic) {
    double* dxrow = dx + ic * len;
    for (std::size_t p = 0; p < len; ++p) {
      double acc = 0.0;
      for (std::size_t oc = 0; oc < out_ch; ++oc) {
        const double* wk = w + oc * in_ch * k + ic * k;
        const double* dyrow = dy + oc * out_len;
        const std::size_t qlo = (p + 1 > out_len) ? (p + 1 - out_len) : 0;
        for (std::size_t q = qlo; q < k && q <= p; ++q) acc += wk[q] * dyrow[p - q];
      }
      dxrow[p] += acc;
    }
  }
}

void conv1d_backward_weight_serial(const double* x, const double* dy, double* dw,
                                   std::size_t in_ch, std::size_t len,
                                   std::size_t out_ch, std::size_t k) {
  const std::size_t out_len = len - k + 1;
  for (std::size_t oc = 0; oc < out_ch; ++oc) {
    const double* dyrow = dy + oc * out_len;
    for (std::size_t ic = 0; ic < in_ch; ++ic) {
      const double* xrow = x + ic * len;
      double* wk = dw + oc * in_ch * k + ic * k;
      for (std::size_t q = 0; q < k; ++q) {
        double acc = 0.0;
        for (std::size_t t = 0; t < out_len; ++t) acc += xrow[t + q] * dyrow[t];
        wk[q] += acc;
      }
    }
  }
}

void conv1d_backward_weight_parallel(const double* x, const double* dy, double* dw,
                                     std::size_t in_ch, std::size_t len,
                                     std::size_t out_ch, std::size_t k) {
  const std::size_t out_len = len - k + 1;
#pragma omp parallel for schedule(static)
  for (std::int64_t oc = 0; oc < static_cast<std::int64_t>(out_ch); ++oc) {
    const double* dyrow = dy + oc * out_len;
    for (std::size_t ic = 0; ic < in_ch; ++ic) {
      const double* xrow = x + ic * len;
      double* wk = dw + oc * in_ch * k + ic * k;
      for (std::size_t q = 0; q < k; ++q) {
        double acc = 0.0;
        for (std::size_t t = 0; t < out_len; ++t) acc += xrow[t + q] * dyrow[t];
        wk[q] += acc;
      }
    }
  }
}

}  // namespace detail

void matmul(const double* a, const double* b, double* y, std::size_t m, std::size_t k,
            std::size_t n) {
  if (backend() == Backend::parallel)
    detail::matmul_parallel(a, b, y, m, k, n);
  else
    detail::matmul_serial(a, b, y, m, k, n);
}

void matmul_at_b(const double* a, const double* b, double* y, std::size_t m,
                 std::size_t k, std::size_t n) {
  if (backend() == Backend::parallel)
    detail::matmul_at_b_parallel(a, b, y, m, k, n);
  else
    detail::matmul_at_b_serial(a, b, y, m, k, n);
}

void matmul_a_bt(const double* a, const double* b, double* y, std::size_t m,
                 std::size_t k, std::size_t n) {
  if (backend() == Backend::parallel)
    detail::matmul_a_bt_parallel(a, b, y, m, k, n);
  else
    detail::matmul_a_bt_serial(a, b, y, m, k, n);
}

void conv1d_forward(const double* x, const double* w, double* y, std::size_t in_ch,
                    std::size_t len, std::size_t out_ch, std::size_t k) {
  if (backend() == Backend::parallel)
    detail::conv1d_forward_parallel(x, w, y, in_ch, len, out_ch, k);
  else
    detail::conv1d_forward_serial(x, w, y, in_ch, len, out_ch, k);
}

void conv1d_backward_input(const double* dy, const double* w, double* dx,
                           std::size_t in_ch, std::size_t len, std::size_t out_ch,
                           std::size_t k) {
  if (backend() == Backend::parallel)
    detail::conv1d_backward_input_parallel(dy, w, dx, in_ch, len, out_ch, k);
  else
    detail::conv1d_backward_input_serial(dy, w, dx, in_ch, len, out_ch, k);
}

void conv1d_backward_weight(const double* x, const double* dy, double* dw,
                            std::size_t in_ch, std::size_t len, std::size_t out_ch,
                            std::size_t k) {
  if (backend() == Backend::parallel)
    detail::conv1d_backward_weight_parallel(x, dy, dw, in_ch, len, out_ch, k);
  else
    detail::conv1d_backward_weight_serial(x, dy, dw, in_ch, len, out_ch, k);
}

}  // namespace molpair::kernels
