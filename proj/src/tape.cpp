#include "actorflow/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace actorflow {

namespace {

[[noreturn]] void shape_error(const char* op, const Tensor& a,
                              const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " +
                              a.shape_str() + " and " + b.shape_str());
}

double stable_softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

}  // namespace

void Tape::check_same_tape(Value v) const {
  if (v.tape != this || v.idx < 0 ||
      v.idx >= static_cast<int>(nodes_.size()))
    throw std::invalid_argument("Tape: value does not belong to this tape");
}

Value Tape::add(Value a, Value b) {
  check_same_tape(a);
  check_same_tape(b);
  const Tensor& ta = nodes_[a.idx].val;
  const Tensor& tb = nodes_[b.idx].val;
  if (!ta.same_shape(tb)) shape_error("add", ta, tb);
  Node n;
  n.op = Op::kAdd;
  n.a = a.idx;
  n.b = b.idx;
  n.val = ta;
  for (std::size_t i = 0; i < n.val.size(); ++i) n.val.values[i] += tb.values[i];
  return push(std::move(n));
}

Value Tape::add_row(Value a, Value row) {
  check_same_tape(a);
  check_same_tape(row);
  const Tensor& ta = nodes_[a.idx].val;
  const Tensor& tr = nodes_[row.idx].val;
  if (tr.rows() != 1 || tr.cols() != ta.cols()) shape_error("add_row", ta, tr);
  Node n;
  n.op = Op::kAddRow;
  n.a = a.idx;
  n.b = row.idx;
  n.val = ta;
  const std::size_t d = ta.cols();
  for (std::size_t r = 0; r < ta.rows(); ++r)
    for (std::size_t c = 0; c < d; ++c) n.val.values[r * d + c] += tr.values[c];
  return push(std::move(n));
}

Value Tape::add_col(Value a, Value col) {
  check_same_tape(a);
  check_same_tape(col);
  const Tensor& ta = nodes_[a.idx].val;
  const Tensor& tc = nodes_[col.idx].val;
  if (tc.cols() != 1 || tc.rows() != ta.rows()) shape_error("add_col", ta, tc);
  Node n;
  n.op = Op::kAddCol;
  n.a = a.idx;
  n.b = col.idx;
  n.val = ta;
  const std::size_t d = ta.cols();
  for (std::size_t r = 0; r < ta.rows(); ++r)
    for (std::size_t c = 0; c < d; ++c) n.val.values[r * d + c] += tc.values[r];
  return push(std::move(n));
}

Value Tape::sub(Value a, Value b) {
  check_same_tape(a);
  check_same_tape(b);
  const Tensor& ta = nodes_[a.idx].val;
  const Tensor& tb = nodes_[b.idx].val;
  if (!ta.same_shape(tb)) shape_error("sub", ta, tb);
  Node n;
  n.op = Op::kSub;
  n.a = a.idx;
  n.b = b.idx;
  n.val = ta;
  for (std::size_t i = 0; i < n.val.size(); ++i) n.val.values[i] -= tb.values[i];
  return push(std::move(n));
}

Value Tape::mul(Value a, Value b) {
  check_same_tape(a);
  check_same_tape(b);
  const Tensor& ta = nodes_[a.idx].val;
  const Tensor& tb = nodes_[b.idx].val;
  if (!ta.same_shape(tb)) shape_error("mul", ta, tb);
  Node n;
  n.op = Op::kMul;
  n.a = a.idx;
  n.b = b.idx;
  n.val = ta;
  for (std::size_t i = 0; i < n.val.size(); ++i) n.val.values[i] *= tb.values[i];
  return push(std::move(n));
}

Value Tape::neg(Value a) { return scale(a, -1.0); }

Value Tape::scale(Value a, double c) {
  check_same_tape(a);
  Node n;
  n.op = Op::kScale;
  n.a = a.idx;
  n.c0 = c;
  n.val = nodes_[a.idx].val;
  for (auto& v : n.val.values) v *= c;
  return push(std::move(n));
}

Value Tape::add_scalar(Value a, double c) {
  check_same_tape(a);
  Node n;
  n.op = Op::kAddScalar;
  n.a = a.idx;
  n.c0 = c;
  n.val = nodes_[a.idx].val;
  for (auto& v : n.val.values) v += c;
  return push(std::move(n));
}

Value Tape::matmul(Value a, Value b) {
  check_same_tape(a);
  check_same_tape(b);
  const Tensor& ta = nodes_[a.idx].val;
  const Tensor& tb = nodes_[b.idx].val;
  if (ta.cols() != tb.rows()) shape_error("matmul", ta, tb);
  const std::size_t n_r = ta.rows(), k = ta.cols(), m = tb.cols();
  Node n;
  n.op = Op::kMatmul;
  n.a = a.idx;
  n.b = b.idx;
  n.val = Tensor::zeros(n_r, m);
  for (std::size_t i = 0; i < n_r; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ta.values[i * k + p];
      if (av == 0.0) continue;
      const double* brow = &tb.values[p * m];
      double* orow = &n.val.values[i * m];
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
    }
  }
  return push(std::move(n));
}

Value Tape::exp(Value a) {
  check_same_tape(a);
  Node n;
  n.op = Op::kExp;
  n.a = a.idx;
  n.val = nodes_[a.idx].val;
  for (auto& v : n.val.values) v = std::exp(v);
  return push(std::move(n));
}

Value Tape::log(Value a) {
  check_same_tape(a);
  Node n;
  n.op = Op::kLog;
  n.a = a.idx;
  n.val = nodes_[a.idx].val;
  for (auto& v : n.val.values) v = std::log(v);
  return push(std::move(n));
}

Value Tape::tanh(Value a) {
  check_same_tape(a);
  Node n;
  n.op = Op::kTanh;
  n.a = a.idx;
  n.val = nodes_[a.idx].val;
  for (auto& v : n.val.values) v = std::tanh(v);
  return push(std::move(n));
}

Value Tape::relu(Value a) {
  check_same_tape(a);
  Node n;
  n.op = Op::kRelu;
  n.a = a.idx;
  n.val = nodes_[a.idx].val;
  for (auto& v : n.val.values) v = v > 0.0 ? v : 0.0;
  return push(std::move(n));
}

Value Tape::sigmoid(Value a) {
  check_same_tape(a);
  Node n;
  n.op = Op::kSigmoid;
  n.a = a.idx;
  n.val = nodes_[a.idx].val;
  for (auto& v : n.val.values) v = 1.0 / (1.0 + std::exp(-v));
  return push(std::move(n));
}

Value Tape::softplus(Value a) {
  check_same_tape(a);
  Node n;
  n.op = Op::kSoftplus;
  n.a = a.idx;
  n.val = nodes_[a.idx].val;
  for (auto& v : n.val.values) v = stable_softplus(v);
  return push(std::move(n));
}

Value Tape::sum_all(Value a) {
  check_same_tape(a);
  Node n;
  n.op = Op::kSumAll;
  n.a = a.idx;
  double s = 0.0;
  for (double v : nodes_[a.idx].val.values) s += v;
  n.val = Tensor::scalar(s);
  return push(std::move(n));
}

Value Tape::mean_all(Value a) {
  check_same_tape(a);
  const Tensor& ta = nodes_[a.idx].val;
  if (ta.size() == 0)
    throw std::invalid_argument("mean_all: empty tensor");
  Node n;
  n.op = Op::kMeanAll;
  n.a = a.idx;
  double s = 0.0;
  for (double v : ta.values) s += v;
  n.val = Tensor::scalar(s / static_cast<double>(ta.size()));
  return push(std::move(n));
}

Value Tape::sum_rows(Value a) {
  check_same_tape(a);
  const Tensor& ta = nodes_[a.idx].val;
  Node n;
  n.op = Op::kSumRows;
  n.a = a.idx;
  n.val = Tensor::zeros(ta.rows(), 1);
  for (std::size_t r = 0; r < ta.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < ta.cols(); ++c) s += ta.at(r, c);
    n.val.values[r] = s;
  }
  return push(std::move(n));
}

Value Tape::logsumexp_rows(Value a) {
  check_same_tape(a);
  const Tensor& ta = nodes_[a.idx].val;
  if (ta.cols() == 0)
    throw std::invalid_argument("logsumexp_rows: zero columns");
  Node n;
  n.op = Op::kLogSumExpRows;
  n.a = a.idx;
  n.val = Tensor::zeros(ta.rows(), 1);
  for (std::size_t r = 0; r < ta.rows(); ++r) {
    double m = ta.at(r, 0);
    for (std::size_t c = 1; c < ta.cols(); ++c) m = std::max(m, ta.at(r, c));
    double s = 0.0;
    for (std::size_t c = 0; c < ta.cols(); ++c) s += std::exp(ta.at(r, c) - m);
    n.val.values[r] = m + std::log(s);
  }
  return push(std::move(n));
}

Value Tape::slice_cols(Value a, std::size_t c0, std::size_t c1) {
  check_same_tape(a);
  const Tensor& ta = nodes_[a.idx].val;
  if (c0 > c1 || c1 > ta.cols())
    throw std::invalid_argument("slice_cols: range [" + std::to_string(c0) +
                                "," + std::to_string(c1) +
                                ") out of bounds for " + ta.shape_str());
  Node n;
  n.op = Op::kSliceCols;
  n.a = a.idx;
  n.i0 = c0;
  n.i1 = c1;
  n.val = Tensor::zeros(ta.rows(), c1 - c0);
  for (std::size_t r = 0; r < ta.rows(); ++r)
    for (std::size_t c = c0; c < c1; ++c) n.val.at(r, c - c0) = ta.at(r, c);
  return push(std::move(n));
}

Value Tape::concat_cols(Value a, Value b) {
  check_same_tape(a);
  check_same_tape(b);
  const Tensor& ta = nodes_[a.idx].val;
  const Tensor& tb = nodes_[b.idx].val;
  if (ta.rows() != tb.rows()) shape_error("concat_cols", ta, tb);
  Node n;
  n.op = Op::kConcatCols;
  n.a = a.idx;
  n.b = b.idx;
  n.i0 = ta.cols();
  n.val = Tensor::zeros(ta.rows(), ta.cols() + tb.cols());
  for (std::size_t r = 0; r < ta.rows(); ++r) {
    for (std::size_t c = 0; c < ta.cols(); ++c) n.val.at(r, c) = ta.at(r, c);
    for (std::size_t c = 0; c < tb.cols(); ++c)
      n.val.at(r, ta.cols() + c) = tb.at(r, c);
  }
  return push(std::move(n));
}

Value Tape::gather_cols(Value a, std::vector<std::size_t> col_of_row) {
  check_same_tape(a);
  const Tensor& ta = nodes_[a.idx].val;
  if (col_of_row.size() != ta.rows())
    throw std::invalid_argument("gather_cols: index count " +
                                std::to_string(col_of_row.size()) +
                                " does not match rows of " + ta.shape_str());
  for (std::size_t idx : col_of_row)
    if (idx >= ta.cols())
      throw std::invalid_argument("gather_cols: column index out of range");
  Node n;
  n.op = Op::kGatherCols;
  n.a = a.idx;
  n.val = Tensor::zeros(ta.rows(), 1);
  for (std::size_t r = 0; r < ta.rows(); ++r)
    n.val.values[r] = ta.at(r, col_of_row[r]);
  n.gather = std::move(col_of_row);
  return push(std::move(n));
}

void Tape::backward(Value output) {
  check_same_tape(output);
  const Tensor& out = nodes_[output.idx].val;
  if (out.size() != 1)
    throw std::invalid_argument(
        "backward: output must be scalar, got shape " + out.shape_str());

  grads_.assign(nodes_.size(), Tensor());
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    grads_[i] = Tensor::zeros(nodes_[i].val.rows(), nodes_[i].val.cols());
  grads_[output.idx].values[0] = 1.0;

  for (int i = output.idx; i >= 0; --i) {
    const Node& n = nodes_[i];
    const Tensor& g = grads_[i];
    switch (n.op) {
      case Op::kLeaf:
      case Op::kInput:
        break;
      case Op::kAdd: {
        Tensor& ga = grads_[n.a];
        Tensor& gb = grads_[n.b];
        for (std::size_t j = 0; j < g.size(); ++j) {
          ga.values[j] += g.values[j];
          gb.values[j] += g.values[j];
        }
        break;
      }
      case Op::kAddRow: {
        Tensor& ga = grads_[n.a];
        Tensor& gb = grads_[n.b];
        const std::size_t d = g.cols();
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < d; ++c) {
            ga.values[r * d + c] += g.values[r * d + c];
            gb.values[c] += g.values[r * d + c];
          }
        break;
      }
      case Op::kAddCol: {
        Tensor& ga = grads_[n.a];
        Tensor& gb = grads_[n.b];
        const std::size_t d = g.cols();
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < d; ++c) {
            ga.values[r * d + c] += g.values[r * d + c];
            gb.values[r] += g.values[r * d + c];
          }
        break;
      }
      case Op::kSub: {
        Tensor& ga = grads_[n.a];
        Tensor& gb = grads_[n.b];
        for (std::size_t j = 0; j < g.size(); ++j) {
          ga.values[j] += g.values[j];
          gb.values[j] -= g.values[j];
        }
        break;
      }
      case Op::kMul: {
        Tensor& ga = grads_[n.a];
        Tensor& gb = grads_[n.b];
        const Tensor& va = nodes_[n.a].val;
        const Tensor& vb = nodes_[n.b].val;
        for (std::size_t j = 0; j < g.size(); ++j) {
          ga.values[j] += g.values[j] * vb.values[j];
          gb.values[j] += g.values[j] * va.values[j];
        }
        break;
      }
      case Op::kNeg:
        break;  // expressed as kScale
      case Op::kScale: {
        Tensor& ga = grads_[n.a];
        for (std::size_t j = 0; j < g.size(); ++j)
          ga.values[j] += n.c0 * g.values[j];
        break;
      }
      case Op::kAddScalar: {
        Tensor& ga = grads_[n.a];
        for (std::size_t j = 0; j < g.size(); ++j) ga.values[j] += g.values[j];
        break;
      }
      case Op::kMatmul: {
        const Tensor& va = nodes_[n.a].val;  // [N,K]
        const Tensor& vb = nodes_[n.b].val;  // [K,M]
        Tensor& ga = grads_[n.a];
        Tensor& gb = grads_[n.b];
        const std::size_t N = va.rows(), K = va.cols(), M = vb.cols();
        // ga += g * b^T
        for (std::size_t r = 0; r < N; ++r)
          for (std::size_t p = 0; p < K; ++p) {
            double s = 0.0;
            for (std::size_t c = 0; c < M; ++c)
              s += g.values[r * M + c] * vb.values[p * M + c];
            ga.values[r * K + p] += s;
          }
        // gb += a^T * g
        for (std::size_t r = 0; r < N; ++r) {
          const double* arow = &va.values[r * K];
          const double* grow = &g.values[r * M];
          for (std::size_t p = 0; p < K; ++p) {
            const double av = arow[p];
            if (av == 0.0) continue;
            double* gbrow = &gb.values[p * M];
            for (std::size_t c = 0; c < M; ++c) gbrow[c] += av * grow[c];
          }
        }
        break;
      }
      case Op::kExp: {
        Tensor& ga = grads_[n.a];
        for (std::size_t j = 0; j < g.size(); ++j)
          ga.values[j] += g.values[j] * n.val.values[j];
        break;
      }
      case Op::kLog: {
        Tensor& ga = grads_[n.a];
        const Tensor& va = nodes_[n.a].val;
        for (std::size_t j = 0; j < g.size(); ++j)
          ga.values[j] += g.values[j] / va.values[j];
        break;
      }
      case Op::kTanh: {
        Tensor& ga = grads_[n.a];
        for (std::size_t j = 0; j < g.size(); ++j)
          ga.values[j] += g.values[j] * (1.0 - n.val.values[j] * n.val.values[j]);
        break;
      }
      case Op::kRelu: {
        Tensor& ga = grads_[n.a];
        const Tensor& va = nodes_[n.a].val;
        for (std::size_t j = 0; j < g.size(); ++j)
          if (va.values[j] > 0.0) ga.values[j] += g.values[j];
        break;
      }
      case Op::kSigmoid: {
        Tensor& ga = grads_[n.a];
        for (std::size_t j = 0; j < g.size(); ++j) {
          const double s = n.val.values[j];
          ga.values[j] += g.values[j] * s * (1.0 - s);
        }
        break;
      }
      case Op::kSoftplus: {
        Tensor& ga = grads_[n.a];
        const Tensor& va = nodes_[n.a].val;
        for (std::size_t j = 0; j < g.size(); ++j)
          ga.values[j] += g.values[j] / (1.0 + std::exp(-va.values[j]));
        break;
      }
      case Op::kSumAll: {
        Tensor& ga = grads_[n.a];
        for (auto& v : ga.values) v += g.values[0];
        break;
      }
      case Op::kMeanAll: {
        Tensor& ga = grads_[n.a];
        const double w = g.values[0] / static_cast<double>(ga.size());
        for (auto& v : ga.values) v += w;
        break;
      }
      case Op::kSumRows: {
        Tensor& ga = grads_[n.a];
        const std::size_t d = ga.cols();
        for (std::size_t r = 0; r < ga.rows(); ++r)
          for (std::size_t c = 0; c < d; ++c)
            ga.values[r * d + c] += g.values[r];
        break;
      }
      case Op::kLogSumExpRows: {
        Tensor& ga = grads_[n.a];
        const Tensor& va = nodes_[n.a].val;
        const std::size_t d = ga.cols();
        for (std::size_t r = 0; r < ga.rows(); ++r) {
          const double lse = n.val.values[r];
          for (std::size_t c = 0; c < d; ++c)
            ga.values[r * d + c] +=
                g.values[r] * std::exp(va.values[r * d + c] - lse);
        }
        break;
      }
      case Op::kSliceCols: {
        Tensor& ga = grads_[n.a];
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c)
            ga.at(r, n.i0 + c) += g.at(r, c);
        break;
      }
      case Op::kConcatCols: {
        Tensor& ga = grads_[n.a];
        Tensor& gb = grads_[n.b];
        const std::size_t split = n.i0;
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < split; ++c) ga.at(r, c) += g.at(r, c);
          for (std::size_t c = split; c < g.cols(); ++c)
            gb.at(r, c - split) += g.at(r, c);
        }
        break;
      }
      case Op::kGatherCols: {
        Tensor& ga = grads_[n.a];
        for (std::size_t r = 0; r < g.rows(); ++r)
          ga.at(r, n.gather[r]) += g.values[r];
        break;
      }
    }
  }
}

}  // namespace actorflow
