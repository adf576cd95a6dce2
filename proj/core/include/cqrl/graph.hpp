#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cqrl/array.hpp"
#include "cqrl/common.hpp"

namespace cqrl {

enum class ParamInit { kZeros, kGlorotUniform };

// Ordered, named trainable parameters. Declaration order is the serialization
// order. A store may back several graphs (e.g. batch and single-observation
// instantiations of the same network).
class ParameterStore {
 public:
  explicit ParameterStore(uint64_t init_seed) : rng_(init_seed) {}

  // Returns the index of the named parameter, creating and initializing it on
  // first use. Shape must match on reuse.
  int declare(const std::string& name, const std::vector<int>& shape, ParamInit init);

  int index_of(const std::string& name) const;
  bool has(const std::string& name) const { return by_name_.count(name) > 0; }

  int size() const { return static_cast<int>(values_.size()); }
  const std::string& name(int i) const { return names_[i]; }
  Array& value(int i) { return values_[i]; }
  const Array& value(int i) const { return values_[i]; }
  Array& grad(int i) { return grads_[i]; }
  const Array& grad(int i) const { return grads_[i]; }

  void zero_grads();

  // Copy parameter values from another store (shapes/names must match).
  void copy_from(const ParameterStore& other);
  // this += rate * (other - this), the soft target update.
  void blend_from(const ParameterStore& other, float rate);

  long total_elements() const;

  // Frozen stores still receive activation gradients flowing through them but
  // skip weight-gradient accumulation (used when the actor loss runs through
  // critic layers).
  bool frozen = false;

 private:
  Rng rng_;
  std::vector<std::string> names_;
  std::vector<Array> values_;
  std::vector<Array> grads_;
  std::map<std::string, int> by_name_;
};

using ParameterStorePtr = std::shared_ptr<ParameterStore>;

enum class Op {
  kInput,
  kConst,
  kParam,
  kDense,
  kRelu,
  kTanh,
  kExp,
  kLog,
  kAdd,
  kMul,
  kScalarMul,
  kReduceSum,
  kReduceMean,
  kAvgPool2d,
  kConcat
};

const char* op_name(Op op);

struct Node {
  Op op;
  std::vector<int> in;
  Array val;   // not used for kParam (lives in the store)
  Array grad;  // same shape as val
  float scalar = 0.0f;
  int pool_k = 0;
  std::string name;
  ParameterStorePtr store;
  int param_idx = -1;
};

// Static computation DAG over Arrays. Nodes are appended in topological order
// by construction; forward() populates values, backward() accumulates
// gradients in reverse order into node slots and parameter stores.
class Graph {
 public:
  int input(const std::string& name, std::vector<int> shape);
  int constant(Array value, const std::string& name = "const");
  int param(const ParameterStorePtr& store, const std::string& name, std::vector<int> shape,
            ParamInit init);

  // y = x * W + b with x:[B,in], W:[in,out], b:[out]. Declares prefix + "/W",
  // prefix + "/b" in the store.
  int dense(int x, const ParameterStorePtr& store, const std::string& prefix, int out_features);

  int relu(int x);
  int tanh_(int x);
  int exp_(int x);
  int log_(int x);
  int add(int a, int b);
  int mul(int a, int b);
  int scalar_mul(int x, float c);
  int reduce_sum(int x);
  int reduce_mean(int x);
  int avg_pool2d(int x, int k);  // x:[C,H,W], kernel=stride=k
  int concat(int a, int b);      // along last axis of 2-D arrays

  // Convenience composites built from the primitive ops above.
  int sub(int a, int b) { return add(a, scalar_mul(b, -1.0f)); }
  int min_(int a, int b) { return sub(b, relu(sub(b, a))); }  // elementwise min
  int abs_(int x) { return add(relu(x), relu(scalar_mul(x, -1.0f))); }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int id) const { return nodes_[id]; }

  // Fast path: write directly into an input leaf before run().
  void set_input(int id, const float* data, long n);
  void set_input(int id, const Array& a) { set_input(id, a.data.data(), a.numel()); }

  // Assign named inputs and compute all node values.
  void forward(const std::map<std::string, Array>& inputs);
  // Compute all node values from whatever the input leaves currently hold.
  void run();

  const Array& value(int id) const;

  // Seed the output node with `seed` and accumulate gradients in reverse
  // topological order. Parameter gradients land in their stores (adding to
  // whatever is there; call zero_grads() on the stores first).
  void backward(int out_id, const Array& seed);

  // Gradient of a non-parameter node from the last backward pass.
  const Array& node_grad(int id) const { return nodes_[id].grad; }

  // Recompute the (scalar-output) graph in double precision with one
  // parameter element optionally overridden; used by the gradient checker.
  double eval_f64(int out_id, const ParameterStore* store, int pidx, long elem,
                  double override_value) const;

  bool forward_done() const { return forward_done_; }

 private:
  int add_node(Node n);
  int unary(Op op, int x);
  int binary(Op op, int a, int b);
  const Array& in_val(const Node& n, int k) const;
  void compute(int id);
  void check_finite(int id) const;

  std::vector<Node> nodes_;
  std::map<std::string, int> input_ids_;
  bool forward_done_ = false;
};

}  // namespace cqrl
