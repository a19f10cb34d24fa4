#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "morphtag/rng.hpp"
#include "morphtag/tensor.hpp"

namespace morphtag {

// Reverse-mode autodiff tape. Operations record nodes in execution order;
// backward() walks the tape in exact reverse order and accumulates gradients
// additively across fan-out. A graph lives for one forward/backward pass and
// is confined to a single thread.
class Graph {
 public:
  using Id = int32_t;

  explicit Graph(bool training = false, Rng* rng = nullptr)
      : training_(training), rng_(rng) {}

  bool training() const { return training_; }

  // Leaf holding a constant value; receives no gradient.
  Id constant(Tensor t);
  Id constant_ref(const Tensor* t);  // aliases external storage, not copied

  // Leaf bound to a trainable parameter. Repeated calls with the same
  // parameter return the same node, so gradients from every use accumulate.
  Id param(Parameter* p);

  // (m,k)x(k,n) -> (m,n); (m,k)x(k,) -> (m,)
  Id matmul(Id a, Id b);
  Id add(Id a, Id b);       // same shape
  Id mul(Id a, Id b);       // elementwise, same shape
  Id affine(Id x, Real scale, Real shift);
  Id concat(const std::vector<Id>& xs);  // 1-D vectors, last axis
  Id slice(Id x, int offset, int len);   // 1-D contiguous range
  Id sigmoid(Id x);
  Id tanh(Id x);
  Id softmax(Id x);  // last axis, numerically stabilized
  Id lookup(Id table, int row);  // embedding lookup: row of a (V,d) table
  // Inverted dropout: in training mode zeroes entries with probability
  // `rate` and scales survivors by 1/(1-rate); identity in inference mode.
  // The mask is sampled per call from the graph's generator.
  Id dropout(Id x, Real rate);
  // -log(max(probs[target], kProbFloor)) as a scalar node.
  Id cross_entropy(Id probs, int target);
  Id add_n(const std::vector<Id>& xs);  // sum of same-shaped tensors
  // Elementwise custom function; dfn(x, y) is dy/dx given input x, output y.
  Id apply(Id x, Real (*fn)(Real), Real (*dfn)(Real, Real));

  const Tensor& value(Id id) const;
  Real scalar_value(Id id) const;

  // Computes d(loss)/d(p) into every touched Parameter's grad (additively).
  // Intermediate values and node gradients are released as the tape unwinds.
  void backward(Id loss);

  size_t node_count() const { return nodes_.size(); }

  static constexpr Real kProbFloor = Real(1e-12);

 private:
  enum class Op : uint8_t {
    kConstant,
    kParam,
    kMatmul,
    kAdd,
    kMul,
    kAffine,
    kConcat,
    kSlice,
    kSigmoid,
    kTanh,
    kSoftmax,
    kLookup,
    kDropout,
    kCrossEntropy,
    kAddN,
    kApply,
  };

  struct Node {
    Op op;
    std::vector<Id> inputs;
    Tensor value;
    const Tensor* ext = nullptr;  // set for aliased leaves
    Tensor grad;
    bool grad_set = false;
    Parameter* parameter = nullptr;
    int i0 = 0, i1 = 0;           // slice offset/len, lookup row, ce target
    Real r0 = 0, r1 = 0;          // affine scale/shift
    std::vector<Real> mask;       // dropout multipliers
    Real (*fn)(Real) = nullptr;
    Real (*dfn)(Real, Real) = nullptr;
  };

  const Tensor& val(Id id) const {
    const Node& n = nodes_[static_cast<size_t>(id)];
    return n.ext ? *n.ext : n.value;
  }
  Tensor& grad_of(Id id);
  Id push(Node n);
  void add_into(Id id, const Real* src, int count, int offset = 0);
  void backward_node(Id id);

  bool training_;
  Rng* rng_;
  std::deque<Node> nodes_;  // deque: value()/grad references stay valid as nodes are added
  std::unordered_map<Parameter*, Id> param_nodes_;
};

// Relative-error report of reverse-mode gradients against central finite
// differences. `loss` must rebuild the forward pass deterministically from
// the current parameter values; `compute_grads` must leave d(loss)/d(p) in
// each parameter's grad field. Every element is checked when a parameter has
// at most `max_elems_per_param` entries, otherwise a deterministic sample.
struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
  int checked = 0;
  bool pass = true;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_err = 0.0;
  bool pass = true;
};

GradCheckReport finite_diff_check(std::span<Parameter* const> params,
                                  const std::function<double()>& loss,
                                  const std::function<void()>& compute_grads,
                                  double step, double tolerance,
                                  int max_elems_per_param = 1 << 30);

}  // namespace morphtag
