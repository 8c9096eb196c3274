//
// Project MolPair - Copyright 2026 MolPair Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include "molpair/core/kernels.hpp"
#include "molpair/core/rng.hpp"
#include "molpair/core/tensor.hpp"

using namespace molpair;

namespace {

Tensor random_tensor(std::size_t r, std::size_t c, Rng& rng) {
  Tensor t(r, c);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1.0, 1.0);
  return t;
}

}  // namespace

TEST_CASE("parallel matmul is bit-identical to the serial reference") {
  Rng rng(11);
  for (auto [m, k, n] : {std::tuple<int, int, int>{3, 5, 7}, {17, 31, 13}, {64, 64, 64}}) {
    Tensor a = random_tensor(m, k, rng);
    Tensor b = random_tensor(k, n, rng);
    Tensor ys(m, n), yp(m, n);
    kernels::detail::matmul_serial(a.data(), b.data(), ys.data(), m, k, n);
    kernels::detail::matmul_parallel(a.data(), b.data(), yp.data(), m, k, n);
    for (std::size_t i = 0; i < ys.size(); ++i) CHECK(ys[i] == yp[i]);
  }
}

TEST_CASE("transposed matmul variants agree with explicit transposition") {
  Rng rng(12);
  const std::size_t m = 6, k = 9, n = 4;
  Tensor a = random_tensor(m, k, rng);
  Tensor b = random_tensor(k, n, rng);
  Tensor at(k, m), bt(n, k);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) at.at(j, i) = a.at(i, j);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) bt.at(j, i) = b.at(i, j);

  Tensor base(m, n), y1(m, n), y2(m, n);
  kernels::matmul(a.data(), b.data(), base.data(), m, k, n);
  kernels::matmul_at_b(at.data(), b.data(), y1.data(), m, k, n);
  kernels::matmul_a_bt(a.data(), bt.data(), y2.data(), m, k, n);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i] == doctest::Approx(y1[i]).epsilon(1e-12));
    CHECK(base[i] == doctest::Approx(y2[i]).epsilon(1e-12));
  }
}

TEST_CASE("conv1d serial and parallel match, and agree with a naive triple loop") {
  Rng rng(13);
  const std::size_t in_ch = 5, len = 20, out_ch = 7, k = 4;
  Tensor x = random_tensor(in_ch, len, rng);
  Tensor w = random_tensor(out_ch, in_ch * k, rng);
  const std::size_t out_len = len - k + 1;
  Tensor ys(out_ch, out_len), yp(out_ch, out_len), yn(out_ch, out_len);
  kernels::detail::conv1d_forward_serial(x.data(), w.data(), ys.data(), in_ch, len,
                                         out_ch, k);
  kernels::detail::conv1d_forward_parallel(x.data(), w.data(), yp.data(), in_ch, len,
                                           out_ch, k);
  for (std::size_t oc = 0; oc < out_ch; ++oc)
    for (std::size_t t = 0; t < out_len; ++t) {
      double acc = 0.0;
      for (std::size_t ic = 0; ic < in_ch; ++ic)
        for (std::size_t q = 0; q < k; ++q)
          acc += x.at(ic, t + q) * w.at(oc, ic * k + q);
      yn.at(oc, t) = acc;
    }
  for (std::size_t i = 0; i < ys.size(); ++i) {
    CHECK(ys[i] == yp[i]);
    CHECK(ys[i] == doctest::Approx(yn[i]).epsilon(1e-12));
  }
}

TEST_CASE("conv1d backward kernels match finite differences of the forward") {
  Rng rng(14);
  const std::size_t in_ch = 3, len = 10, out_ch = 2, k = 3;
  const std::size_t out_len = len - k + 1;
  Tensor x = random_tensor(in_ch, len, rng);
  Tensor w = random_tensor(out_ch, in_ch * k, rng);
  Tensor dy = random_tensor(out_ch, out_len, rng);

  auto loss = [&](const Tensor& xx, const Tensor& ww) {
    Tensor y(out_ch, out_len);
    kernels::conv1d_forward(xx.data(), ww.data(), y.data(), in_ch, len, out_ch, k);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * dy[i];
    return s;
  };

  Tensor dx(in_ch, len), dw(out_ch, in_ch * k);
  kernels::conv1d_backward_input(dy.data(), w.data(), dx.data(), in_ch, len, out_ch, k);
  kernels::conv1d_backward_weight(x.data(), dy.data(), dw.data(), in_ch, len, out_ch, k);

  const double h = 1e-6;
  for (std::size_t i = 0; i < x.size(); i += 7) {
    Tensor xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (loss(xp, w) - loss(xm, w)) / (2 * h);
    CHECK(dx[i] == doctest::Approx(fd).epsilon(1e-5));
  }
  for (std::size_t i = 0; i < w.size(); i += 5) {
    Tensor wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    const double fd = (loss(x, wp) - loss(x, wm)) / (2 * h);
    CHECK(dw[i] == doctest::Approx(fd).epsilon(1e-5));
  }
}
