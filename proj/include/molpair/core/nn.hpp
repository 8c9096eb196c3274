//
// Project MolPair - Copyright 2026 MolPair Developers.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cmath>
#include <vector>

#include "molpair/core/autodiff.hpp"
#include "molpair/core/rng.hpp"

namespace molpair::nn {

// Affine map x (m, in) -> x W + b with W (in, out), b (1, out).
struct Linear {
  ad::Value W;
  ad::Value b;

  Linear() = default;
  Linear(std::size_t in, std::size_t out, Rng& rng)
      : W(ad::param(glorot_uniform(in, out, rng))), b(ad::param(Tensor(1, out))) {}

  ad::Value forward(const ad::Value& x) const { return ad::add(ad::matmul(x, W), b); }

  void collect(std::vector<ad::Value>& out) const {
    out.push_back(W);
    out.push_back(b);
  }
};

// Affine stack with ReLU between layers and a linear final layer.
struct Mlp {
  std::vector<Linear> layers;

  Mlp() = default;
  Mlp(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out,
      Rng& rng) {
    std::size_t prev = in;
    for (std::size_t h : hidden) {
      layers.emplace_back(prev, h, rng);
      prev = h;
    }
    layers.emplace_back(prev, out, rng);
  }

  ad::Value forward(const ad::Value& x) const {
    ad::Value h = x;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      h = layers[i].forward(h);
      if (i + 1 < layers.size()) h = ad::relu(h);
    }
    return h;
  }

  void collect(std::vector<ad::Value>& out) const {
    for (const auto& l : layers) l.collect(out);
  }
};

// GRU cell, torch orientation: h' = (1-z) * n + z * h.
struct GruCell {
  Linear ir, iz, in;  // input maps
  Linear hr, hz, hn;  // state maps

  GruCell() = default;
  GruCell(std::size_t input, std::size_t state, Rng& rng)
      : ir(input, state, rng),
        iz(input, state, rng),
        in(input, state, rng),
        hr(state, state, rng),
        hz(state, state, rng),
        hn(state, state, rng) {}

  ad::Value forward(const ad::Value& x, const ad::Value& h) const {
    using namespace ad;
    Value r = sigmoid(add(ir.forward(x), hr.forward(h)));
    Value z = sigmoid(add(iz.forward(x), hz.forward(h)));
    Value n = tanh_(add(in.forward(x), mul(r, hn.forward(h))));
    Value ones_minus_z = add_scalar(scale(z, -1.0), 1.0);
    return add(mul(ones_minus_z, n), mul(z, h));
  }

  void collect(std::vector<ad::Value>& out) const {
    ir.collect(out);
    iz.collect(out);
    in.collect(out);
    hr.collect(out);
    hz.collect(out);
    hn.collect(out);
  }
};

// Adaptive moment estimation over a fixed parameter list.
class Adam {
public:
  Adam(std::vector<ad::Value> params, double lr, double beta1 = 0.9,
       double beta2 = 0.999, double eps = 1e-8)
      : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& p : params_) {
      m_.emplace_back(p->val.rows(), p->val.cols());
      v_.emplace_back(p->val.rows(), p->val.cols());
    }
  }

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto& p = *params_[i];
      p.ensure_grad();
      for (std::size_t j = 0; j < p.val.size(); ++j) {
        const double g = p.grad[j];
        m_[i][j] = beta1_ * m_[i][j] + (1.0 - beta1_) * g;
        v_[i][j] = beta2_ * v_[i][j] + (1.0 - beta2_) * g * g;
        const double mhat = m_[i][j] / bc1;
        const double vhat = v_[i][j] / bc2;
        p.val[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
      }
    }
  }

  void zero_grad() { ad::zero_grad(params_); }

  const std::vector<ad::Value>& params() const { return params_; }

private:
  std::vector<ad::Value> params_;
  double lr_, beta1_, beta2_, eps_;
  std::vector<Tensor> m_, v_;
  long t_ = 0;
};

}  // namespace molpair::nn
