//
// Project MolPair - Copyright 2026 MolPair Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "molpair/core/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "molpair/core/kernels.hpp"

namespace molpair::ad {

namespace {

Value make_node(Tensor val, std::vector<Value> parents,
                std::function<void(Node&)> backprop) {
  auto n = std::make_shared<Node>();
  n->val = std::move(val);
  n->parents = std::move(parents);
  bool needs = false;
  for (const auto& p : n->parents) needs = needs || p->requires_grad;
  n->requires_grad = needs;
  if (needs) n->backprop = std::move(backprop);
  return n;
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) +
                     "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                     "x" + std::to_string(b.cols()) + ")");
}

bool row_broadcast(const Tensor& a, const Tensor& b) {
  return b.rows() == 1 && a.cols() == b.cols() && a.rows() != 1;
}

}  // namespace

Value constant(Tensor v) {
  auto n = std::make_shared<Node>();
  n->val = std::move(v);
  n->requires_grad = false;
  return n;
}

Value param(Tensor v) {
  auto n = std::make_shared<Node>();
  n->val = std::move(v);
  n->requires_grad = true;
  return n;
}

void backward(const Value& root) {
  if (root->val.rows() != 1 || root->val.cols() != 1)
    throw ShapeError("backward: root must be scalar");
  // Iterative post-order topological sort over the parent DAG.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.push_back({root.get(), 0});
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      Node* p = node->parents[idx].get();
      ++idx;
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.push_back({p, 0});
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (Node* n : order) n->ensure_grad();
  root->grad.at(0, 0) = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backprop) n->backprop(*n);
  }
}

void zero_grad(const std::vector<Value>& params) {
  for (const auto& p : params) {
    p->ensure_grad();
    p->grad.fill(0.0);
  }
}

Value add(const Value& a, const Value& b) {
  if (row_broadcast(a->val, b->val)) {
    Tensor out = a->val;
    for (std::size_t i = 0; i < out.rows(); ++i)
      for (std::size_t j = 0; j < out.cols(); ++j) out.at(i, j) += b->val.at(0, j);
    return make_node(std::move(out), {a, b}, [](Node& n) {
      auto& pa = *n.parents[0];
      auto& pb = *n.parents[1];
      if (pa.requires_grad) {
        pa.ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i) pa.grad[i] += n.grad[i];
      }
      if (pb.requires_grad) {
        pb.ensure_grad();
        for (std::size_t i = 0; i < n.grad.rows(); ++i)
          for (std::size_t j = 0; j < n.grad.cols(); ++j)
            pb.grad.at(0, j) += n.grad.at(i, j);
      }
    });
  }
  check_same_shape(a->val, b->val, "add");
  Tensor out = a->val;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b->val[i];
  return make_node(std::move(out), {a, b}, [](Node& n) {
    for (int s = 0; s < 2; ++s) {
      auto& p = *n.parents[s];
      if (!p.requires_grad) continue;
      p.ensure_grad();
      for (std::size_t i = 0; i < n.grad.size(); ++i) p.grad[i] += n.grad[i];
    }
  });
}

Value sub(const Value& a, const Value& b) { return add(a, scale(b, -1.0)); }

Value mul(const Value& a, const Value& b) {
  if (row_broadcast(a->val, b->val)) {
    Tensor out = a->val;
    for (std::size_t i = 0; i < out.rows(); ++i)
      for (std::size_t j = 0; j < out.cols(); ++j) out.at(i, j) *= b->val.at(0, j);
    return make_node(std::move(out), {a, b}, [](Node& n) {
      auto& pa = *n.parents[0];
      auto& pb = *n.parents[1];
      if (pa.requires_grad) {
        pa.ensure_grad();
        for (std::size_t i = 0; i < n.grad.rows(); ++i)
          for (std::size_t j = 0; j < n.grad.cols(); ++j)
            pa.grad.at(i, j) += n.grad.at(i, j) * pb.val.at(0, j);
      }
      if (pb.requires_grad) {
        pb.ensure_grad();
        for (std::size_t i = 0; i < n.grad.rows(); ++i)
          for (std::size_t j = 0; j < n.grad.cols(); ++j)
            pb.grad.at(0, j) += n.grad.at(i, j) * pa.val.at(i, j);
      }
    });
  }
  check_same_shape(a->val, b->val, "mul");
  Tensor out = a->val;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b->val[i];
  return make_node(std::move(out), {a, b}, [](Node& n) {
    auto& pa = *n.parents[0];
    auto& pb = *n.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (std::size_t i = 0; i < n.grad.size(); ++i)
        pa.grad[i] += n.grad[i] * pb.val[i];
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (std::size_t i = 0; i < n.grad.size(); ++i)
        pb.grad[i] += n.grad[i] * pa.val[i];
    }
  });
}

Value scale(const Value& a, double c) {
  Tensor out = a->val;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
  return make_node(std::move(out), {a}, [c](Node& n) {
    auto& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < n.grad.size(); ++i) p.grad[i] += c * n.grad[i];
  });
}

Value add_scalar(const Value& a, double c) {
  Tensor out = a->val;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c;
  return make_node(std::move(out), {a}, [](Node& n) {
    auto& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < n.grad.size(); ++i) p.grad[i] += n.grad[i];
  });
}

Value relu(const Value& a) {
  Tensor out = a->val;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
  return make_node(std::move(out), {a}, [](Node& n) {
    auto& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      if (p.val[i] > 0.0) p.grad[i] += n.grad[i];
  });
}

Value leaky_relu(const Value& a, double alpha) {
  Tensor out = a->val;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = out[i] > 0.0 ? out[i] : alpha * out[i];
  return make_node(std::move(out), {a}, [alpha](Node& n) {
    auto& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      p.grad[i] += n.grad[i] * (p.val[i] > 0.0 ? 1.0 : alpha);
  });
}

Value tanh_(const Value& a) {
  Tensor out = a->val;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  return make_node(std::move(out), {a}, [](Node& n) {
    auto& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      p.grad[i] += n.grad[i] * (1.0 - n.val[i] * n.val[i]);
  });
}

Value sigmoid(const Value& a) {
  Tensor out = a->val;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-out[i]));
  return make_node(std::move(out), {a}, [](Node& n) {
    auto& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      p.grad[i] += n.grad[i] * n.val[i] * (1.0 - n.val[i]);
  });
}

Value matmul(const Value& a, const Value& b) {
  if (a->val.cols() != b->val.rows())
    throw ShapeError("matmul: inner dims " + std::to_string(a->val.cols()) + " vs " +
                     std::to_string(b->val.rows()));
  const std::size_t m = a->val.rows(), k = a->val.cols(), n = b->val.cols();
  Tensor out(m, n);
  kernels::matmul(a->val.data(), b->val.data(), out.data(), m, k, n);
  return make_node(std::move(out), {a, b}, [m, k, n](Node& node) {
    auto& pa = *node.parents[0];
    auto& pb = *node.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      Tensor da(m, k);
      kernels::matmul_a_bt(node.grad.data(), pb.val.data(), da.data(), m, n, k);
      for (std::size_t i = 0; i < da.size(); ++i) pa.grad[i] += da[i];
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      Tensor db(k, n);
      kernels::matmul_at_b(pa.val.data(), node.grad.data(), db.data(), k, m, n);
      for (std::size_t i = 0; i < db.size(); ++i) pb.grad[i] += db[i];
    }
  });
}

Value transpose(const Value& a) {
  const std::size_t m = a->val.rows(), n = a->val.cols();
  Tensor out(n, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.at(j, i) = a->val.at(i, j);
  return make_node(std::move(out), {a}, [m, n](Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) p.grad.at(i, j) += node.grad.at(j, i);
  });
}

Value reshape(const Value& a, std::size_t rows, std::size_t cols) {
  Tensor out = a->val.reshaped(rows, cols);
  return make_node(std::move(out), {a}, [](Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < node.grad.size(); ++i) p.grad[i] += node.grad[i];
  });
}

Value concat_cols(const std::vector<Value>& parts) {
  if (parts.empty()) throw ArityError("concat_cols: no inputs");
  const std::size_t m = parts[0]->val.rows();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p->val.rows() != m) throw ShapeError("concat_cols: row mismatch");
    total += p->val.cols();
  }
  Tensor out(m, total);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < p->val.cols(); ++j)
        out.at(i, off + j) = p->val.at(i, j);
    off += p->val.cols();
  }
  return make_node(std::move(out), parts, [](Node& node) {
    std::size_t off = 0;
    for (auto& pp : node.parents) {
      auto& p = *pp;
      const std::size_t c = p.val.cols();
      if (p.requires_grad) {
        p.ensure_grad();
        for (std::size_t i = 0; i < p.val.rows(); ++i)
          for (std::size_t j = 0; j < c; ++j) p.grad.at(i, j) += node.grad.at(i, off + j);
      }
      off += c;
    }
  });
}

Value concat_rows(const std::vector<Value>& parts) {
  if (parts.empty()) throw ArityError("concat_rows: no inputs");
  const std::size_t n = parts[0]->val.cols();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p->val.cols() != n) throw ShapeError("concat_rows: col mismatch");
    total += p->val.rows();
  }
  Tensor out(total, n);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p->val.rows(); ++i)
      for (std::size_t j = 0; j < n; ++j) out.at(off + i, j) = p->val.at(i, j);
    off += p->val.rows();
  }
  return make_node(std::move(out), parts, [](Node& node) {
    std::size_t off = 0;
    for (auto& pp : node.parents) {
      auto& p = *pp;
      const std::size_t r = p.val.rows();
      if (p.requires_grad) {
        p.ensure_grad();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < p.val.cols(); ++j)
            p.grad.at(i, j) += node.grad.at(off + i, j);
      }
      off += r;
    }
  });
}

Value slice_rows(const Value& a, std::size_t r0, std::size_t r1) {
  if (r1 > a->val.rows() || r0 >= r1) throw ShapeError("slice_rows: bad range");
  Tensor out(r1 - r0, a->val.cols());
  for (std::size_t i = r0; i < r1; ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out.at(i - r0, j) = a->val.at(i, j);
  return make_node(std::move(out), {a}, [r0](Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < node.grad.rows(); ++i)
      for (std::size_t j = 0; j < node.grad.cols(); ++j)
        p.grad.at(r0 + i, j) += node.grad.at(i, j);
  });
}

Value slice_cols(const Value& a, std::size_t c0, std::size_t c1) {
  if (c1 > a->val.cols() || c0 >= c1) throw ShapeError("slice_cols: bad range");
  Tensor out(a->val.rows(), c1 - c0);
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = c0; j < c1; ++j) out.at(i, j - c0) = a->val.at(i, j);
  return make_node(std::move(out), {a}, [c0](Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < node.grad.rows(); ++i)
      for (std::size_t j = 0; j < node.grad.cols(); ++j)
        p.grad.at(i, c0 + j) += node.grad.at(i, j);
  });
}

Value gather_rows(const Value& a, std::vector<std::size_t> index) {
  Tensor out(index.size(), a->val.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= a->val.rows()) throw ShapeError("gather_rows: index out of range");
    for (std::size_t j = 0; j < out.cols(); ++j) out.at(i, j) = a->val.at(index[i], j);
  }
  return make_node(std::move(out), {a}, [idx = std::move(index)](Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < node.grad.cols(); ++j)
        p.grad.at(idx[i], j) += node.grad.at(i, j);
  });
}

Value row_sum(const Value& a) {
  Tensor out(a->val.rows(), 1);
  for (std::size_t i = 0; i < a->val.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a->val.cols(); ++j) acc += a->val.at(i, j);
    out.at(i, 0) = acc;
  }
  return make_node(std::move(out), {a}, [](Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < p.grad.rows(); ++i)
      for (std::size_t j = 0; j < p.grad.cols(); ++j)
        p.grad.at(i, j) += node.grad.at(i, 0);
  });
}

Value col_sum(const Value& a) {
  Tensor out(1, a->val.cols());
  for (std::size_t i = 0; i < a->val.rows(); ++i)
    for (std::size_t j = 0; j < a->val.cols(); ++j) out.at(0, j) += a->val.at(i, j);
  return make_node(std::move(out), {a}, [](Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < p.grad.rows(); ++i)
      for (std::size_t j = 0; j < p.grad.cols(); ++j)
        p.grad.at(i, j) += node.grad.at(0, j);
  });
}

Value col_mean(const Value& a) { return scale(col_sum(a), 1.0 / static_cast<double>(a->val.rows())); }

Value col_max(const Value& a) {
  const std::size_t m = a->val.rows(), n = a->val.cols();
  if (m == 0) throw ShapeError("col_max: empty input");
  Tensor out(1, n);
  auto argmax = std::make_shared<std::vector<std::size_t>>(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    double best = a->val.at(0, j);
    std::size_t bi = 0;
    for (std::size_t i = 1; i < m; ++i)
      if (a->val.at(i, j) > best) {
        best = a->val.at(i, j);
        bi = i;
      }
    out.at(0, j) = best;
    (*argmax)[j] = bi;
  }
  return make_node(std::move(out), {a}, [argmax](Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t j = 0; j < node.grad.cols(); ++j)
      p.grad.at((*argmax)[j], j) += node.grad.at(0, j);
  });
}

Value row_max(const Value& a) { return transpose(col_max(transpose(a))); }

namespace {
Value softmax_impl(const Value& a, const Tensor* mask) {
  const std::size_t m = a->val.rows(), n = a->val.cols();
  if (mask) check_same_shape(a->val, *mask, "masked_softmax");
  Tensor out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    double mx = -1e300;
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask && (*mask).at(i, j) == 0.0) continue;
      mx = std::max(mx, a->val.at(i, j));
      any = true;
    }
    if (!any) continue;  // fully masked row stays zero
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask && (*mask).at(i, j) == 0.0) continue;
      out.at(i, j) = std::exp(a->val.at(i, j) - mx);
      z += out.at(i, j);
    }
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) /= z;
  }
  return make_node(std::move(out), {a}, [](Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < node.val.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < node.val.cols(); ++j)
        dot += node.grad.at(i, j) * node.val.at(i, j);
      for (std::size_t j = 0; j < node.val.cols(); ++j)
        p.grad.at(i, j) += node.val.at(i, j) * (node.grad.at(i, j) - dot);
    }
  });
}
}  // namespace

Value softmax_rows(const Value& a) { return softmax_impl(a, nullptr); }

Value masked_softmax_rows(const Value& a, const Tensor& mask) {
  return softmax_impl(a, &mask);
}

Value layer_norm(const Value& x, const Value& gamma, const Value& beta, double eps) {
  const std::size_t m = x->val.rows(), n = x->val.cols();
  if (gamma->val.cols() != n || beta->val.cols() != n)
    throw ShapeError("layer_norm: gamma/beta width mismatch");
  Tensor out(m, n);
  auto stats = std::make_shared<Tensor>(m, 2);  // (mu, inv_std) per row
  for (std::size_t i = 0; i < m; ++i) {
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += x->val.at(i, j);
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = x->val.at(i, j) - mu;
      var += d * d;
    }
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);
    stats->at(i, 0) = mu;
    stats->at(i, 1) = inv;
    for (std::size_t j = 0; j < n; ++j)
      out.at(i, j) = (x->val.at(i, j) - mu) * inv * gamma->val.at(0, j) +
                     beta->val.at(0, j);
  }
  return make_node(std::move(out), {x, gamma, beta}, [stats, n](Node& node) {
    auto& px = *node.parents[0];
    auto& pg = *node.parents[1];
    auto& pb = *node.parents[2];
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < node.val.rows(); ++i) {
      const double mu = stats->at(i, 0), inv = stats->at(i, 1);
      double sum_dy_g = 0.0, sum_dy_g_xhat = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double xhat = (px.val.at(i, j) - mu) * inv;
        const double dyg = node.grad.at(i, j) * pg.val.at(0, j);
        sum_dy_g += dyg;
        sum_dy_g_xhat += dyg * xhat;
      }
      for (std::size_t j = 0; j < n; ++j) {
        const double xhat = (px.val.at(i, j) - mu) * inv;
        const double dyg = node.grad.at(i, j) * pg.val.at(0, j);
        if (px.requires_grad) {
          px.ensure_grad();
          px.grad.at(i, j) += inv * (dyg - sum_dy_g / dn - xhat * sum_dy_g_xhat / dn);
        }
        if (pg.requires_grad) {
          pg.ensure_grad();
          pg.grad.at(0, j) += node.grad.at(i, j) * xhat;
        }
        if (pb.requires_grad) {
          pb.ensure_grad();
          pb.grad.at(0, j) += node.grad.at(i, j);
        }
      }
    }
  });
}

namespace {
Value batch_norm_impl(const Value& x, const Value& gamma, const Value& beta,
                      const Tensor& mean, const Tensor& var, double eps,
                      bool batch_stats) {
  const std::size_t m = x->val.rows(), n = x->val.cols();
  Tensor out(m, n);
  auto inv_std = std::make_shared<Tensor>(1, n);
  auto mu = std::make_shared<Tensor>(mean);
  for (std::size_t j = 0; j < n; ++j) inv_std->at(0, j) = 1.0 / std::sqrt(var.at(0, j) + eps);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.at(i, j) = (x->val.at(i, j) - mu->at(0, j)) * inv_std->at(0, j) *
                         gamma->val.at(0, j) +
                     beta->val.at(0, j);
  return make_node(
      std::move(out), {x, gamma, beta},
      [inv_std, mu, batch_stats, m, n](Node& node) {
        auto& px = *node.parents[0];
        auto& pg = *node.parents[1];
        auto& pb = *node.parents[2];
        const double dm = static_cast<double>(m);
        for (std::size_t j = 0; j < n; ++j) {
          double sum_dy = 0.0, sum_dy_xhat = 0.0;
          for (std::size_t i = 0; i < m; ++i) {
            const double xhat = (px.val.at(i, j) - mu->at(0, j)) * inv_std->at(0, j);
            sum_dy += node.grad.at(i, j);
            sum_dy_xhat += node.grad.at(i, j) * xhat;
          }
          if (pg.requires_grad) {
            pg.ensure_grad();
            pg.grad.at(0, j) += sum_dy_xhat;
          }
          if (pb.requires_grad) {
            pb.ensure_grad();
            pb.grad.at(0, j) += sum_dy;
          }
          if (px.requires_grad) {
            px.ensure_grad();
            for (std::size_t i = 0; i < m; ++i) {
              const double xhat = (px.val.at(i, j) - mu->at(0, j)) * inv_std->at(0, j);
              double dx = node.grad.at(i, j);
              if (batch_stats)
                dx = (dx - sum_dy / dm - xhat * sum_dy_xhat / dm);
              px.grad.at(i, j) += dx * pg.val.at(0, j) * inv_std->at(0, j);
            }
          }
        }
      });
}
}  // namespace

Value batch_norm_train(const Value& x, const Value& gamma, const Value& beta,
                       Tensor& batch_mean, Tensor& batch_var, double eps) {
  const std::size_t m = x->val.rows(), n = x->val.cols();
  batch_mean = Tensor(1, n);
  batch_var = Tensor(1, n);
  for (std::size_t j = 0; j < n; ++j) {
    double mu = 0.0;
    for (std::size_t i = 0; i < m; ++i) mu += x->val.at(i, j);
    mu /= static_cast<double>(m);
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = x->val.at(i, j) - mu;
      var += d * d;
    }
    var /= static_cast<double>(m);
    batch_mean.at(0, j) = mu;
    batch_var.at(0, j) = var;
  }
  return batch_norm_impl(x, gamma, beta, batch_mean, batch_var, eps, true);
}

Value batch_norm_eval(const Value& x, const Value& gamma, const Value& beta,
                      const Tensor& mean, const Tensor& var, double eps) {
  return batch_norm_impl(x, gamma, beta, mean, var, eps, false);
}

Value conv1d(const Value& x, const Value& w, std::size_t kernel) {
  const std::size_t in_ch = x->val.rows(), len = x->val.cols();
  const std::size_t out_ch = w->val.rows();
  if (w->val.cols() != in_ch * kernel)
    throw ShapeError("conv1d: weight cols " + std::to_string(w->val.cols()) +
                     " != in_ch*k " + std::to_string(in_ch * kernel));
  if (len < kernel) throw ShapeError("conv1d: input shorter than kernel");
  const std::size_t out_len = len - kernel + 1;
  Tensor out(out_ch, out_len);
  kernels::conv1d_forward(x->val.data(), w->val.data(), out.data(), in_ch, len, out_ch,
                          kernel);
  return make_node(std::move(out), {x, w}, [in_ch, len, out_ch, kernel](Node& node) {
    auto& px = *node.parents[0];
    auto& pw = *node.parents[1];
    if (px.requires_grad) {
      px.ensure_grad();
      kernels::conv1d_backward_input(node.grad.data(), pw.val.data(), px.grad.data(),
                                     in_ch, len, out_ch, kernel);
    }
    if (pw.requires_grad) {
      pw.ensure_grad();
      kernels::conv1d_backward_weight(px.val.data(), node.grad.data(), pw.grad.data(),
                                      in_ch, len, out_ch, kernel);
    }
  });
}

Value bce_with_logits(const Value& logits, const Tensor& labels) {
  check_same_shape(logits->val, labels, "bce_with_logits");
  const std::size_t b = logits->val.rows();
  double loss = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    const double z = logits->val.at(i, 0);
    const double y = labels.at(i, 0);
    loss += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
  }
  Tensor out(1, 1);
  out.at(0, 0) = loss / static_cast<double>(b);
  return make_node(std::move(out), {logits}, [labels, b](Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    const double g = node.grad.at(0, 0) / static_cast<double>(b);
    for (std::size_t i = 0; i < b; ++i) {
      const double z = p.val.at(i, 0);
      const double s = 1.0 / (1.0 + std::exp(-z));
      p.grad.at(i, 0) += g * (s - labels.at(i, 0));
    }
  });
}

Value ce_with_logits(const Value& logits, const std::vector<std::size_t>& labels) {
  const std::size_t b = logits->val.rows(), k = logits->val.cols();
  if (labels.size() != b) throw ShapeError("ce_with_logits: label count mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    double mx = logits->val.at(i, 0);
    for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, logits->val.at(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += std::exp(logits->val.at(i, j) - mx);
    loss += -(logits->val.at(i, labels[i]) - mx) + std::log(z);
  }
  Tensor out(1, 1);
  out.at(0, 0) = loss / static_cast<double>(b);
  return make_node(std::move(out), {logits}, [labels, b, k](Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    const double g = node.grad.at(0, 0) / static_cast<double>(b);
    for (std::size_t i = 0; i < b; ++i) {
      double mx = p.val.at(i, 0);
      for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, p.val.at(i, j));
      double z = 0.0;
      for (std::size_t j = 0; j < k; ++j) z += std::exp(p.val.at(i, j) - mx);
      for (std::size_t j = 0; j < k; ++j) {
        const double soft = std::exp(p.val.at(i, j) - mx) / z;
        p.grad.at(i, j) += g * (soft - (j == labels[i] ? 1.0 : 0.0));
      }
    }
  });
}

Value mse_loss(const Value& preds, const Tensor& targets) {
  check_same_shape(preds->val, targets, "mse_loss");
  const std::size_t b = preds->val.rows();
  double loss = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    const double d = preds->val.at(i, 0) - targets.at(i, 0);
    loss += d * d;
  }
  Tensor out(1, 1);
  out.at(0, 0) = loss / static_cast<double>(b);
  return make_node(std::move(out), {preds}, [targets, b](Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    const double g = node.grad.at(0, 0) * 2.0 / static_cast<double>(b);
    for (std::size_t i = 0; i < b; ++i)
      p.grad.at(i, 0) += g * (p.val.at(i, 0) - targets.at(i, 0));
  });
}

}  // namespace molpair::ad
