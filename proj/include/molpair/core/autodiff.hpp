//
// Project MolPair - Copyright 2026 MolPair Developers.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "molpair/core/tensor.hpp"

namespace molpair::ad {

// Reverse-mode autodiff over 2D tensors. Graphs are built define-by-run:
// every op returns a shared node holding the forward value and a closure
// that pushes gradients into its parents. Parameters are leaf nodes that
// outlive the per-batch graph.
class Node {
public:
  Tensor val;
  Tensor grad;  // allocated lazily by backward()
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;

  void ensure_grad() {
    if (grad.rows() != val.rows() || grad.cols() != val.cols())
      grad = Tensor(val.rows(), val.cols(), 0.0);
  }
};

using Value = std::shared_ptr<Node>;

Value constant(Tensor v);
Value param(Tensor v);

// Runs reverse-mode accumulation from a scalar (1x1) root.
void backward(const Value& root);

void zero_grad(const std::vector<Value>& params);

// --- elementwise -----------------------------------------------------------
Value add(const Value& a, const Value& b);  // same shape, or b a (1,n) row bias
Value sub(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);  // same shape, or b a (1,n) row
Value scale(const Value& a, double c);
Value add_scalar(const Value& a, double c);
Value relu(const Value& a);
Value leaky_relu(const Value& a, double alpha);
Value tanh_(const Value& a);
Value sigmoid(const Value& a);

// --- linear algebra ---------------------------------------------------------
Value matmul(const Value& a, const Value& b);
Value transpose(const Value& a);
Value reshape(const Value& a, std::size_t rows, std::size_t cols);

// --- structure --------------------------------------------------------------
Value concat_cols(const std::vector<Value>& parts);
Value concat_rows(const std::vector<Value>& parts);
Value slice_rows(const Value& a, std::size_t r0, std::size_t r1);
Value slice_cols(const Value& a, std::size_t c0, std::size_t c1);
Value gather_rows(const Value& a, std::vector<std::size_t> index);

// --- reductions --------------------------------------------------------------
Value row_sum(const Value& a);   // (m,n) -> (m,1)
Value col_sum(const Value& a);   // (m,n) -> (1,n)
Value col_mean(const Value& a);  // (m,n) -> (1,n)
Value col_max(const Value& a);   // (m,n) -> (1,n), grad routed to argmax
Value row_max(const Value& a);   // (m,n) -> (m,1)

// --- activations over rows ----------------------------------------------------
// Softmax along each row. When mask is given (same shape, 1 = keep) masked
// entries get probability 0; a fully masked row stays all-zero.
Value softmax_rows(const Value& a);
Value masked_softmax_rows(const Value& a, const Tensor& mask);

Value layer_norm(const Value& x, const Value& gamma, const Value& beta,
                 double eps = 1e-5);

// Batch normalization over the row (sample) axis using batch statistics;
// batch_mean/batch_var report the statistics used so callers can maintain
// running averages. The eval variant normalizes with frozen statistics.
Value batch_norm_train(const Value& x, const Value& gamma, const Value& beta,
                       Tensor& batch_mean, Tensor& batch_var, double eps = 1e-5);
Value batch_norm_eval(const Value& x, const Value& gamma, const Value& beta,
                      const Tensor& mean, const Tensor& var, double eps = 1e-5);

// --- convolution ---------------------------------------------------------------
// x (in_ch, len), w (out_ch, in_ch*k) -> (out_ch, len-k+1); valid padding.
Value conv1d(const Value& x, const Value& w, std::size_t kernel);

// --- losses ---------------------------------------------------------------------
// logits (B,1), labels (B,1) in {0,1} -> scalar mean BCE (numerically stable).
Value bce_with_logits(const Value& logits, const Tensor& labels);
// logits (B,K), labels row indices -> scalar mean cross entropy.
Value ce_with_logits(const Value& logits, const std::vector<std::size_t>& labels);
// preds (B,1) vs targets -> scalar mean squared error.
Value mse_loss(const Value& preds, const Tensor& targets);

}  // namespace molpair::ad
