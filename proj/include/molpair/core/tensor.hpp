//
// Project MolPair - Copyright 2026 MolPair Developers.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "molpair/core/error.hpp"

namespace molpair {

// Dense row-major matrix of doubles. Rank-1 data is carried as a single row
// (1 x d); everything in the differentiable substrate is rank-2.
class Tensor {
public:
  Tensor() = default;

  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Tensor row(std::vector<double> values) {
    Tensor t;
    t.rows_ = 1;
    t.cols_ = values.size();
    t.data_ = std::move(values);
    return t;
  }

  static Tensor from(std::initializer_list<std::initializer_list<double>> rows) {
    Tensor t(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t i = 0;
    for (const auto& r : rows) {
      assert(r.size() == t.cols_);
      std::size_t j = 0;
      for (double v : r) t.at(i, j++) = v;
      ++i;
    }
    return t;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& at(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  double at(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  const std::vector<double>& storage() const noexcept { return data_; }

  bool same_shape(const Tensor& o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  // Reinterpret the buffer with a new (rows, cols) of identical size.
  Tensor reshaped(std::size_t rows, std::size_t cols) const {
    if (rows * cols != size())
      throw ShapeError("reshape: size mismatch " + std::to_string(size()) + " -> " +
                       std::to_string(rows) + "x" + std::to_string(cols));
    Tensor t = *this;
    t.rows_ = rows;
    t.cols_ = cols;
    return t;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace molpair
