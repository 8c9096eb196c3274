//
// Project MolPair - Copyright 2026 MolPair Developers.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "molpair/core/autodiff.hpp"

namespace molpair::testing {

// Central finite-difference check of d(loss)/d(leaf) for every checked leaf.
// `make_loss` must rebuild the graph from the current leaf values and return a
// scalar node. Returns the worst relative error across all probed entries.
inline double gradcheck(const std::function<ad::Value()>& make_loss,
                        const std::vector<ad::Value>& leaves, double h = 1e-6,
                        std::size_t stride = 1) {
  ad::Value loss = make_loss();
  ad::zero_grad(leaves);
  ad::backward(loss);
  std::vector<Tensor> analytic;
  analytic.reserve(leaves.size());
  for (const auto& l : leaves) analytic.push_back(l->grad);

  double worst = 0.0;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    auto& leaf = *leaves[li];
    for (std::size_t i = 0; i < leaf.val.size(); i += stride) {
      const double keep = leaf.val[i];
      leaf.val[i] = keep + h;
      const double fp = make_loss()->val.at(0, 0);
      leaf.val[i] = keep - h;
      const double fm = make_loss()->val.at(0, 0);
      leaf.val[i] = keep;
      const double fd = (fp - fm) / (2.0 * h);
      const double an = analytic[li][i];
      const double denom = std::max({std::abs(fd), std::abs(an), 1e-8});
      worst = std::max(worst, std::abs(fd - an) / denom);
    }
  }
  return worst;
}

}  // namespace molpair::testing
