#include "morphtag/graph.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace morphtag {

namespace {

using EMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EVec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

Eigen::Map<const EMat> mat(const Tensor& t) {
  return Eigen::Map<const EMat>(t.data.data(), t.dim(0), t.dim(1));
}
Eigen::Map<EMat> mat(Tensor& t) {
  return Eigen::Map<EMat>(t.data.data(), t.dim(0), t.dim(1));
}
Eigen::Map<const EVec> vec(const Tensor& t) {
  return Eigen::Map<const EVec>(t.data.data(), t.size());
}
Eigen::Map<EVec> vec(Tensor& t) {
  return Eigen::Map<EVec>(t.data.data(), t.size());
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw std::runtime_error(std::string(op) + ": incompatible shapes " +
                           shape_str(a.shape) + " and " + shape_str(b.shape));
}

}  // namespace

std::string shape_str(const std::vector<int>& shape) {
  std::string s = "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

Graph::Id Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size() - 1);
}

Graph::Id Graph::constant(Tensor t) {
  Node n;
  n.op = Op::kConstant;
  n.value = std::move(t);
  return push(std::move(n));
}

Graph::Id Graph::constant_ref(const Tensor* t) {
  Node n;
  n.op = Op::kConstant;
  n.ext = t;
  return push(std::move(n));
}

Graph::Id Graph::param(Parameter* p) {
  auto it = param_nodes_.find(p);
  if (it != param_nodes_.end()) return it->second;
  Node n;
  n.op = Op::kParam;
  n.ext = &p->value;
  n.parameter = p;
  Id id = push(std::move(n));
  param_nodes_.emplace(p, id);
  return id;
}

Graph::Id Graph::matmul(Id a, Id b) {
  const Tensor& ta = val(a);
  const Tensor& tb = val(b);
  if (ta.rank() != 2) shape_error("matmul", ta, tb);
  Node n;
  n.op = Op::kMatmul;
  n.inputs = {a, b};
  if (tb.rank() == 2) {
    if (ta.dim(1) != tb.dim(0)) shape_error("matmul", ta, tb);
    n.value = Tensor::zeros({ta.dim(0), tb.dim(1)});
    mat(n.value) = mat(ta) * mat(tb);
  } else if (tb.rank() == 1) {
    if (ta.dim(1) != tb.dim(0)) shape_error("matmul", ta, tb);
    n.value = Tensor::zeros({ta.dim(0)});
    vec(n.value) = mat(ta) * vec(tb);
  } else {
    shape_error("matmul", ta, tb);
  }
  return push(std::move(n));
}

Graph::Id Graph::add(Id a, Id b) {
  const Tensor& ta = val(a);
  const Tensor& tb = val(b);
  if (!ta.same_shape(tb)) shape_error("add", ta, tb);
  Node n;
  n.op = Op::kAdd;
  n.inputs = {a, b};
  n.value = Tensor::zeros(ta.shape);
  vec(n.value) = vec(ta) + vec(tb);
  return push(std::move(n));
}

Graph::Id Graph::mul(Id a, Id b) {
  const Tensor& ta = val(a);
  const Tensor& tb = val(b);
  if (!ta.same_shape(tb)) shape_error("mul", ta, tb);
  Node n;
  n.op = Op::kMul;
  n.inputs = {a, b};
  n.value = Tensor::zeros(ta.shape);
  vec(n.value) = vec(ta).cwiseProduct(vec(tb));
  return push(std::move(n));
}

Graph::Id Graph::affine(Id x, Real scale, Real shift) {
  const Tensor& tx = val(x);
  Node n;
  n.op = Op::kAffine;
  n.inputs = {x};
  n.r0 = scale;
  n.r1 = shift;
  n.value = Tensor::zeros(tx.shape);
  for (int i = 0; i < tx.size(); ++i) n.value[i] = scale * tx[i] + shift;
  return push(std::move(n));
}

Graph::Id Graph::concat(const std::vector<Id>& xs) {
  if (xs.empty()) throw std::runtime_error("concat: no inputs");
  int total = 0;
  for (Id x : xs) {
    const Tensor& t = val(x);
    if (t.rank() != 1) throw std::runtime_error("concat: expected 1-D input, got " + shape_str(t.shape));
    total += t.size();
  }
  Node n;
  n.op = Op::kConcat;
  n.inputs = xs;
  n.value = Tensor::zeros({total});
  int off = 0;
  for (Id x : xs) {
    const Tensor& t = val(x);
    std::copy(t.data.begin(), t.data.end(), n.value.data.begin() + off);
    off += t.size();
  }
  return push(std::move(n));
}

Graph::Id Graph::slice(Id x, int offset, int len) {
  const Tensor& tx = val(x);
  if (tx.rank() != 1 || offset < 0 || len < 0 || offset + len > tx.size())
    throw std::runtime_error("slice: range [" + std::to_string(offset) + "," +
                             std::to_string(offset + len) + ") out of bounds for " +
                             shape_str(tx.shape));
  Node n;
  n.op = Op::kSlice;
  n.inputs = {x};
  n.i0 = offset;
  n.i1 = len;
  n.value = Tensor::zeros({len});
  std::copy(tx.data.begin() + offset, tx.data.begin() + offset + len, n.value.data.begin());
  return push(std::move(n));
}

Graph::Id Graph::sigmoid(Id x) {
  const Tensor& tx = val(x);
  Node n;
  n.op = Op::kSigmoid;
  n.inputs = {x};
  n.value = Tensor::zeros(tx.shape);
  for (int i = 0; i < tx.size(); ++i) n.value[i] = Real(1) / (Real(1) + std::exp(-tx[i]));
  return push(std::move(n));
}

Graph::Id Graph::tanh(Id x) {
  const Tensor& tx = val(x);
  Node n;
  n.op = Op::kTanh;
  n.inputs = {x};
  n.value = Tensor::zeros(tx.shape);
  for (int i = 0; i < tx.size(); ++i) n.value[i] = std::tanh(tx[i]);
  return push(std::move(n));
}

Graph::Id Graph::softmax(Id x) {
  const Tensor& tx = val(x);
  if (tx.rank() < 1 || tx.size() == 0)
    throw std::runtime_error("softmax: needs a non-empty axis, got " + shape_str(tx.shape));
  int cols = tx.dim(tx.rank() - 1);
  int rows = tx.size() / cols;
  Node n;
  n.op = Op::kSoftmax;
  n.inputs = {x};
  n.value = Tensor::zeros(tx.shape);
  for (int r = 0; r < rows; ++r) {
    const Real* in = tx.data.data() + static_cast<size_t>(r) * cols;
    Real* out = n.value.data.data() + static_cast<size_t>(r) * cols;
    Real mx = in[0];
    for (int c = 1; c < cols; ++c) mx = std::max(mx, in[c]);
    Real sum = 0;
    for (int c = 0; c < cols; ++c) {
      out[c] = std::exp(in[c] - mx);
      sum += out[c];
    }
    for (int c = 0; c < cols; ++c) out[c] /= sum;
  }
  return push(std::move(n));
}

Graph::Id Graph::lookup(Id table, int row) {
  const Tensor& tt = val(table);
  if (tt.rank() != 2 || row < 0 || row >= tt.dim(0))
    throw std::runtime_error("lookup: row " + std::to_string(row) + " out of bounds for " +
                             shape_str(tt.shape));
  Node n;
  n.op = Op::kLookup;
  n.inputs = {table};
  n.i0 = row;
  int d = tt.dim(1);
  n.value = Tensor::zeros({d});
  std::copy(tt.data.begin() + static_cast<size_t>(row) * d,
            tt.data.begin() + static_cast<size_t>(row + 1) * d, n.value.data.begin());
  return push(std::move(n));
}

Graph::Id Graph::dropout(Id x, Real rate) {
  if (rate < Real(0) || rate >= Real(1))
    throw std::runtime_error("dropout: rate must be in [0,1)");
  if (!training_ || rate == Real(0)) return x;  // identity in inference mode
  if (rng_ == nullptr) throw std::runtime_error("dropout: graph has no generator");
  const Tensor& tx = val(x);
  Node n;
  n.op = Op::kDropout;
  n.inputs = {x};
  n.value = Tensor::zeros(tx.shape);
  n.mask.resize(static_cast<size_t>(tx.size()));
  const Real keep_scale = Real(1) / (Real(1) - rate);
  for (int i = 0; i < tx.size(); ++i) {
    n.mask[static_cast<size_t>(i)] = rng_->uniform() < rate ? Real(0) : keep_scale;
    n.value[i] = tx[i] * n.mask[static_cast<size_t>(i)];
  }
  return push(std::move(n));
}

Graph::Id Graph::cross_entropy(Id probs, int target) {
  const Tensor& tp = val(probs);
  if (tp.rank() != 1)
    throw std::runtime_error("cross_entropy: expected 1-D probabilities, got " + shape_str(tp.shape));
  if (target < 0 || target >= tp.size())
    throw std::runtime_error("cross_entropy: target " + std::to_string(target) +
                             " out of range for " + shape_str(tp.shape));
  Node n;
  n.op = Op::kCrossEntropy;
  n.inputs = {probs};
  n.i0 = target;
  Real p = std::max(tp[target], kProbFloor);
  n.value = Tensor::scalar(-std::log(p));
  return push(std::move(n));
}

Graph::Id Graph::add_n(const std::vector<Id>& xs) {
  if (xs.empty()) throw std::runtime_error("add_n: no inputs");
  const Tensor& t0 = val(xs[0]);
  Node n;
  n.op = Op::kAddN;
  n.inputs = xs;
  n.value = Tensor(t0.shape, t0.data);
  for (size_t i = 1; i < xs.size(); ++i) {
    const Tensor& t = val(xs[i]);
    if (!t.same_shape(t0)) shape_error("add_n", t0, t);
    vec(n.value) += vec(t);
  }
  return push(std::move(n));
}

Graph::Id Graph::apply(Id x, Real (*fn)(Real), Real (*dfn)(Real, Real)) {
  const Tensor& tx = val(x);
  Node n;
  n.op = Op::kApply;
  n.inputs = {x};
  n.fn = fn;
  n.dfn = dfn;
  n.value = Tensor::zeros(tx.shape);
  for (int i = 0; i < tx.size(); ++i) n.value[i] = fn(tx[i]);
  return push(std::move(n));
}

const Tensor& Graph::value(Id id) const {
  return val(id);
}

Real Graph::scalar_value(Id id) const {
  const Tensor& t = val(id);
  if (t.size() != 1) throw std::runtime_error("scalar_value: tensor has " + shape_str(t.shape));
  return t.data[0];
}

Tensor& Graph::grad_of(Id id) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (!n.grad_set) {
    n.grad = Tensor::zeros(val(id).shape);
    n.grad_set = true;
  }
  return n.grad;
}

void Graph::add_into(Id id, const Real* src, int count, int offset) {
  Tensor& g = grad_of(id);
  Real* dst = g.data.data() + offset;
  for (int i = 0; i < count; ++i) dst[i] += src[i];
}

void Graph::backward(Id loss) {
  const Tensor& lt = val(loss);
  if (lt.size() != 1)
    throw std::runtime_error("backward: loss must be scalar, got " + shape_str(lt.shape));
  Tensor& lg = grad_of(loss);
  lg.data[0] = Real(1);

  for (Id id = loss; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad_set) backward_node(id);
    // release intermediates; parameter storage is external
    n.grad = Tensor();
    n.grad_set = false;
    if (!n.ext) n.value = Tensor();
  }
}

void Graph::backward_node(Id id) {
  Node& n = nodes_[static_cast<size_t>(id)];
  const Tensor& g = n.grad;
  switch (n.op) {
    case Op::kConstant:
      break;
    case Op::kParam:
      vec(n.parameter->grad) += vec(g);
      break;
    case Op::kMatmul: {
      const Tensor& ta = val(n.inputs[0]);
      const Tensor& tb = val(n.inputs[1]);
      Tensor& ga = grad_of(n.inputs[0]);
      Tensor& gb = grad_of(n.inputs[1]);
      if (tb.rank() == 2) {
        mat(ga) += Eigen::Map<const EMat>(g.data.data(), ta.dim(0), tb.dim(1)) * mat(tb).transpose();
        mat(gb) += mat(ta).transpose() * Eigen::Map<const EMat>(g.data.data(), ta.dim(0), tb.dim(1));
      } else {
        mat(ga) += vec(g) * vec(tb).transpose();
        vec(gb) += mat(ta).transpose() * vec(g);
      }
      break;
    }
    case Op::kAdd:
      add_into(n.inputs[0], g.data.data(), g.size());
      add_into(n.inputs[1], g.data.data(), g.size());
      break;
    case Op::kMul: {
      const Tensor& ta = val(n.inputs[0]);
      const Tensor& tb = val(n.inputs[1]);
      Tensor& ga = grad_of(n.inputs[0]);
      Tensor& gb = grad_of(n.inputs[1]);
      for (int i = 0; i < g.size(); ++i) {
        ga[i] += g[i] * tb[i];
        gb[i] += g[i] * ta[i];
      }
      break;
    }
    case Op::kAffine: {
      Tensor& gx = grad_of(n.inputs[0]);
      for (int i = 0; i < g.size(); ++i) gx[i] += n.r0 * g[i];
      break;
    }
    case Op::kConcat: {
      int off = 0;
      for (Id x : n.inputs) {
        int len = val(x).size();
        add_into(x, g.data.data() + off, len);
        off += len;
      }
      break;
    }
    case Op::kSlice:
      add_into(n.inputs[0], g.data.data(), n.i1, n.i0);
      break;
    case Op::kSigmoid: {
      Tensor& gx = grad_of(n.inputs[0]);
      const Tensor& y = n.value;
      for (int i = 0; i < g.size(); ++i) gx[i] += g[i] * y[i] * (Real(1) - y[i]);
      break;
    }
    case Op::kTanh: {
      Tensor& gx = grad_of(n.inputs[0]);
      const Tensor& y = n.value;
      for (int i = 0; i < g.size(); ++i) gx[i] += g[i] * (Real(1) - y[i] * y[i]);
      break;
    }
    case Op::kSoftmax: {
      Tensor& gx = grad_of(n.inputs[0]);
      const Tensor& y = n.value;
      int cols = y.shape.back();
      int rows = y.size() / cols;
      for (int r = 0; r < rows; ++r) {
        const Real* yr = y.data.data() + static_cast<size_t>(r) * cols;
        const Real* gr = g.data.data() + static_cast<size_t>(r) * cols;
        Real* gxr = gx.data.data() + static_cast<size_t>(r) * cols;
        Real dot = 0;
        for (int c = 0; c < cols; ++c) dot += gr[c] * yr[c];
        for (int c = 0; c < cols; ++c) gxr[c] += yr[c] * (gr[c] - dot);
      }
      break;
    }
    case Op::kLookup: {
      const Tensor& tt = val(n.inputs[0]);
      add_into(n.inputs[0], g.data.data(), g.size(), n.i0 * tt.dim(1));
      break;
    }
    case Op::kDropout: {
      Tensor& gx = grad_of(n.inputs[0]);
      for (int i = 0; i < g.size(); ++i) gx[i] += g[i] * n.mask[static_cast<size_t>(i)];
      break;
    }
    case Op::kCrossEntropy: {
      const Tensor& tp = val(n.inputs[0]);
      Real p = tp[n.i0];
      if (p > kProbFloor) {
        Tensor& gp = grad_of(n.inputs[0]);
        gp[n.i0] += g.data[0] * (Real(-1) / p);
      }
      break;
    }
    case Op::kAddN:
      for (Id x : n.inputs) add_into(x, g.data.data(), g.size());
      break;
    case Op::kApply: {
      const Tensor& tx = val(n.inputs[0]);
      Tensor& gx = grad_of(n.inputs[0]);
      for (int i = 0; i < g.size(); ++i) gx[i] += g[i] * n.dfn(tx[i], n.value[i]);
      break;
    }
  }
}

GradCheckReport finite_diff_check(std::span<Parameter* const> params,
                                  const std::function<double()>& loss,
                                  const std::function<void()>& compute_grads,
                                  double step, double tolerance,
                                  int max_elems_per_param) {
  for (Parameter* p : params) p->zero_grad();
  compute_grads();

  GradCheckReport report;
  for (Parameter* p : params) {
    GradCheckEntry entry;
    entry.name = p->name;
    int n = p->value.size();
    int stride = 1;
    if (n > max_elems_per_param) stride = (n + max_elems_per_param - 1) / max_elems_per_param;
    for (int i = 0; i < n; i += stride) {
      Real saved = p->value[i];
      p->value[i] = saved + static_cast<Real>(step);
      double up = loss();
      p->value[i] = saved - static_cast<Real>(step);
      double down = loss();
      p->value[i] = saved;
      double fd = (up - down) / (2.0 * step);
      double ad = static_cast<double>(p->grad[i]);
      double rel = std::abs(ad - fd) / std::max({std::abs(ad), std::abs(fd), 1e-8});
      entry.max_rel_err = std::max(entry.max_rel_err, rel);
      ++entry.checked;
    }
    entry.pass = entry.max_rel_err <= tolerance;
    report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
    report.pass = report.pass && entry.pass;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace morphtag
