#pragma once

#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

#include "sjhdr/tensor.hpp"

namespace sjhdr::nn {

// Reverse-mode tape. A Node owns its forward value and (lazily) a gradient
// buffer; backward_fn reads this node's grad and accumulates into the inputs'.
template <typename T>
struct Node {
  TensorT<T> value;
  TensorT<T> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void()> backward_fn;

  void ensure_grad() {
    if (grad.empty()) grad = TensorT<T>(value.shape());
  }
  void clear_grad() { grad = TensorT<T>(); }
};

template <typename T>
using VarT = std::shared_ptr<Node<T>>;

using Var = VarT<float>;
using VarD = VarT<double>;

template <typename T>
VarT<T> leaf(TensorT<T> value, bool requires_grad = false) {
  auto n = std::make_shared<Node<T>>();
  n->value = std::move(value);
  n->requires_grad = requires_grad;
  return n;
}

template <typename T>
VarT<T> constant(TensorT<T> value) {
  return leaf(std::move(value), false);
}

namespace detail {

template <typename T>
void topo_visit(const VarT<T>& n, std::unordered_set<Node<T>*>& seen,
                std::vector<Node<T>*>& order) {
  if (!n || seen.count(n.get())) return;
  seen.insert(n.get());
  for (const auto& in : n->inputs) topo_visit(in, seen, order);
  order.push_back(n.get());
}

}  // namespace detail

// Accumulates d root / d leaf into every reachable leaf with requires_grad.
// root must be scalar (size 1).
template <typename T>
void backward(const VarT<T>& root) {
  if (root->value.size() != 1)
    throw ShapeError("backward root must be scalar, got " + root->value.shape_str());
  std::unordered_set<Node<T>*> seen;
  std::vector<Node<T>*> order;
  detail::topo_visit(root, seen, order);
  root->ensure_grad();
  root->grad[0] = T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* n = *it;
    if (n->backward_fn && n->requires_grad && !n->grad.empty()) n->backward_fn();
  }
}

template <typename T>
bool any_requires_grad(const std::vector<VarT<T>>& vs) {
  for (const auto& v : vs)
    if (v && v->requires_grad) return true;
  return false;
}

}  // namespace sjhdr::nn
