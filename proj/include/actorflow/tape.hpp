#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "actorflow/tensor.hpp"

namespace actorflow {

class Tape;

// Handle to a node on a tape. Cheap to copy; valid until Tape::clear().
struct Value {
  Tape* tape = nullptr;
  int idx = -1;
};

enum class Op : std::uint8_t {
  kLeaf,      // tracked parameter leaf
  kInput,     // constant input (gradient discarded)
  kAdd,
  kAddRow,    // [N,D] + [1,D], broadcast over rows
  kAddCol,    // [N,K] + [N,1], broadcast over cols
  kSub,
  kMul,
  kNeg,
  kScale,     // x * c0
  kAddScalar, // x + c0
  kMatmul,
  kExp,
  kLog,
  kTanh,
  kRelu,
  kSigmoid,
  kSoftplus,
  kSumAll,
  kMeanAll,
  kSumRows,        // [N,D] -> [N,1]
  kLogSumExpRows,  // [N,D] -> [N,1]
  kSliceCols,      // columns [i0, i1)
  kConcatCols,
  kGatherCols,     // per-row column pick -> [N,1]
};

// Eager reverse-mode tape over Tensor values. Forward runs at op
// construction; backward replays nodes in reverse creation order, which is
// a valid reverse topological order because parents always precede children.
class Tape {
 public:
  Value leaf(const Tensor& t) { return push_nullary(Op::kLeaf, t); }
  Value input(const Tensor& t) { return push_nullary(Op::kInput, t); }
  Value input_scalar(double v) { return input(Tensor::scalar(v)); }

  Value add(Value a, Value b);
  Value add_row(Value a, Value row);
  Value add_col(Value a, Value col);
  Value sub(Value a, Value b);
  Value mul(Value a, Value b);
  Value neg(Value a);
  Value scale(Value a, double c);
  Value add_scalar(Value a, double c);
  Value matmul(Value a, Value b);
  Value exp(Value a);
  Value log(Value a);
  Value tanh(Value a);
  Value relu(Value a);
  Value sigmoid(Value a);
  Value softplus(Value a);
  Value sum_all(Value a);
  Value mean_all(Value a);
  Value sum_rows(Value a);
  Value logsumexp_rows(Value a);
  Value slice_cols(Value a, std::size_t c0, std::size_t c1);
  Value concat_cols(Value a, Value b);
  Value gather_cols(Value a, std::vector<std::size_t> col_of_row);

  // softmax over each row, composed from primitives
  Value softmax_rows(Value a) {
    Value lse = logsumexp_rows(a);
    return exp(add_col(a, scale(lse, -1.0)));
  }
  Value log_softmax_rows(Value a) {
    return add_col(a, scale(logsumexp_rows(a), -1.0));
  }

  // Accumulates d(output)/d(node) for every node. Output must be a scalar.
  void backward(Value output);

  const Tensor& value(Value v) const { return nodes_[v.idx].val; }
  const Tensor& grad(Value v) const { return grads_[v.idx]; }
  bool has_grads() const { return !grads_.empty(); }

  void clear() {
    nodes_.clear();
    grads_.clear();
  }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    Tensor val;
    double c0 = 0.0;                     // scalar operand
    std::size_t i0 = 0, i1 = 0;          // slice bounds
    std::vector<std::size_t> gather;     // per-row indices for kGatherCols
  };

  Value push_nullary(Op op, const Tensor& t) {
    Node n;
    n.op = op;
    n.val = t;
    nodes_.push_back(std::move(n));
    return Value{this, static_cast<int>(nodes_.size() - 1)};
  }
  Value push(Node n) {
    nodes_.push_back(std::move(n));
    return Value{this, static_cast<int>(nodes_.size() - 1)};
  }
  void check_same_tape(Value v) const;

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
};

// Per-tape binding of persistent parameter tensors to leaf values, with
// deduplication so each parameter owns exactly one leaf per graph build.
class Binder {
 public:
  explicit Binder(Tape& tape) : tape_(&tape) {}

  Value operator()(const Tensor& param) {
    auto it = bound_.find(&param);
    if (it != bound_.end()) return it->second;
    Value v = tape_->leaf(param);
    bound_.emplace(&param, v);
    return v;
  }

  // Gradient of the last backward pass w.r.t. a bound parameter; zeros if
  // the parameter did not participate in the graph.
  Tensor grad(const Tensor& param) const {
    auto it = bound_.find(&param);
    if (it == bound_.end() || !tape_->has_grads())
      return Tensor::zeros(param.rows(), param.cols());
    return tape_->grad(it->second);
  }

  Tape& tape() { return *tape_; }

 private:
  Tape* tape_;
  std::unordered_map<const Tensor*, Value> bound_;
};

}  // namespace actorflow
