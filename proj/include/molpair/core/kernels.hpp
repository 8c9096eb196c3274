//
// Project MolPair - Copyright 2026 MolPair Developers.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>

namespace molpair::kernels {

// Two implementations of every hot kernel: a plain serial reference and an
// OpenMP-parallel version. Parallel loops split over output elements only, so
// each element is accumulated in the same order as the serial path and the
// results are bit-identical for any thread count.
enum class Backend { serial, parallel };

Backend backend() noexcept;
void set_backend(Backend b) noexcept;

// y (m x n) = a (m x k) * b (k x n)
void matmul(const double* a, const double* b, double* y, std::size_t m, std::size_t k,
            std::size_t n);

// y (m x n) = a^T (m x k, stored k x m) * b (k x n)
void matmul_at_b(const double* a, const double* b, double* y, std::size_t m,
                 std::size_t k, std::size_t n);

// y (m x n) = a (m x k) * b^T (k x n, stored n x k)
void matmul_a_bt(const double* a, const double* b, double* y, std::size_t m,
                 std::size_t k, std::size_t n);

// 1D convolution over the length axis. x is (in_ch x len), w is
// (out_ch x in_ch*k), y is (out_ch x out_len) with out_len = len - k + 1
// (valid padding). Accumulation order: channel-major, then tap.
void conv1d_forward(const double* x, const double* w, double* y, std::size_t in_ch,
                    std::size_t len, std::size_t out_ch, std::size_t k);

// dx (in_ch x len) += backprop of dy (out_ch x out_len) through w.
void conv1d_backward_input(const double* dy, const double* w, double* dx,
                           std::size_t in_ch, std::size_t len, std::size_t out_ch,
                           std::size_t k);

// dw (out_ch x in_ch*k) += x (*) dy.
void conv1d_backward_weight(const double* x, const double* dy, double* dw,
                            std::size_t in_ch, std::size_t len, std::size_t out_ch,
                            std::size_t k);

namespace detail {
void matmul_serial(const double* a, const double* b, double* y, std::size_t m,
                   std::size_t k, std::size_t n);
void matmul_parallel(const double* a, const double* b, double* y, std::size_t m,
                     std::size_t k, std::size_t n);
void matmul_at_b_serial(const double* a, const double* b, double* y, std::size_t m,
                        std::size_t k, std::size_t n);
void matmul_at_b_parallel(const double* a, const double* b, double* y, std::size_t m,
                          std::size_t k, std::size_t n);
void matmul_a_bt_serial(const double* a, const double* b, double* y, std::size_t m,
                        std::size_t k, std::size_t n);
void matmul_a_bt_parallel(const double* a, const double* b, double* y, std::size_t m,
                          std::size_t k, std::size_t n);
void conv1d_forward_serial(const double* x, const double* w, double* y,
                           std::size_t in_ch, std::size_t len, std::size_t out_ch,
                           std::size_t k);
void conv1d_forward_parallel(const double* x, const double* w, double* y,
                             std::size_t in_ch, std::size_t len, std::size_t out_ch,
                             std::size_t k);
void conv1d_backward_input_serial(const double* dy, const double* w, double* dx,
                                  std::size_t in_ch, std::size_t len, std::size_t out_ch,
                                  std::size_t k);
void conv1d_backward_input_parallel(const double* dy, const double* w, double* dx,
                                    std::size_t in_ch, std::size_t len,
                                    std::size_t out_ch, std::size_t k);
void conv1d_backward_weight_serial(const double* x, const double* dy, double* dw,
                                   std::size_t in_ch, std::size_t len,
                                   std::size_t out_ch, std::size_t k);
void conv1d_backward_weight_parallel(const double* x, const double* dy, double* dw,
                                     std::size_t in_ch, std::size_t len,
                                     std::size_t out_ch, std::size_t k);
}  // namespace detail

}  // namespace molpair::kernels
