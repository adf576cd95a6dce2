#include "cqrl/graph.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstring>

namespace cqrl {

using MatF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapF = Eigen::Map<MatF>;
using CMapF = Eigen::Map<const MatF>;

// ---------------------------------------------------------------------------
// ParameterStore

int ParameterStore::declare(const std::string& name, const std::vector<int>& shape,
                            ParamInit init) {
  auto it = by_name_.find(name);
  if (it != by_name_.end()) {
    if (values_[it->second].shape != shape)
      throw Error("parameter '" + name + "' redeclared with different shape");
    return it->second;
  }
  Array v(shape);
  if (init == ParamInit::kGlorotUniform) {
    if (shape.size() != 2) throw Error("glorot init expects a 2-D parameter");
    const double limit = std::sqrt(6.0 / (shape[0] + shape[1]));
    for (auto& x : v.data) x = static_cast<float>(rng_.uniform(-limit, limit));
  }
  int idx = static_cast<int>(values_.size());
  names_.push_back(name);
  values_.push_back(std::move(v));
  grads_.emplace_back(shape);
  by_name_[name] = idx;
  return idx;
}

int ParameterStore::index_of(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw Error("unknown parameter '" + name + "'");
  return it->second;
}

void ParameterStore::zero_grads() {
  for (auto& g : grads_) g.fill(0.0f);
}

void ParameterStore::copy_from(const ParameterStore& other) {
  if (other.size() != size()) throw Error("copy_from: store layouts differ");
  for (int i = 0; i < size(); ++i) {
    if (other.names_[i] != names_[i] || !other.values_[i].same_shape(values_[i]))
      throw Error("copy_from: parameter mismatch at '" + names_[i] + "'");
    values_[i].data = other.values_[i].data;
  }
}

void ParameterStore::blend_from(const ParameterStore& other, float rate) {
  if (other.size() != size()) throw Error("blend_from: store layouts differ");
  for (int i = 0; i < size(); ++i) {
    auto& dst = values_[i].data;
    const auto& src = other.values_[i].data;
    for (size_t k = 0; k < dst.size(); ++k) dst[k] += rate * (src[k] - dst[k]);
  }
}

long ParameterStore::total_elements() const {
  long n = 0;
  for (const auto& v : values_) n += v.numel();
  return n;
}

// ---------------------------------------------------------------------------
// Graph construction

const char* op_name(Op op) {
  switch (op) {
    case Op::kInput: return "input";
    case Op::kConst: return "const";
    case Op::kParam: return "param";
    case Op::kDense: return "dense";
    case Op::kRelu: return "relu";
    case Op::kTanh: return "tanh";
    case Op::kExp: return "exp";
    case Op::kLog: return "log";
    case Op::kAdd: return "add";
    case Op::kMul: return "mul";
    case Op::kScalarMul: return "scalar_mul";
    case Op::kReduceSum: return "reduce_sum";
    case Op::kReduceMean: return "reduce_mean";
    case Op::kAvgPool2d: return "avg_pool2d";
    case Op::kConcat: return "concat";
  }
  return "?";
}

int Graph::add_node(Node n) {
  n.grad = Array(n.op == Op::kParam ? n.store->value(n.param_idx).shape : n.val.shape);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Graph::input(const std::string& name, std::vector<int> shape) {
  Node n;
  n.op = Op::kInput;
  n.name = name;
  n.val = Array(shape);
  int id = add_node(std::move(n));
  if (!input_ids_.emplace(name, id).second) throw Error("duplicate input '" + name + "'");
  return id;
}

int Graph::constant(Array value, const std::string& name) {
  Node n;
  n.op = Op::kConst;
  n.name = name;
  n.val = std::move(value);
  return add_node(std::move(n));
}

int Graph::param(const ParameterStorePtr& store, const std::string& name,
                 std::vector<int> shape, ParamInit init) {
  Node n;
  n.op = Op::kParam;
  n.name = name;
  n.store = store;
  n.param_idx = store->declare(name, shape, init);
  return add_node(std::move(n));
}

static void require_2d(const Array& a, const char* what) {
  if (a.shape.size() != 2) throw Error(std::string(what) + ": expected a 2-D array");
}

int Graph::dense(int x, const ParameterStorePtr& store, const std::string& prefix,
                 int out_features) {
  // copy the shape: the param() calls below may reallocate the node vector
  const std::vector<int> xshape = value(x).shape;
  if (xshape.size() != 2) throw Error("dense: expected a 2-D input");
  const int in_features = xshape[1];
  int w = param(store, prefix + "/W", {in_features, out_features}, ParamInit::kGlorotUniform);
  int b = param(store, prefix + "/b", {1, out_features}, ParamInit::kZeros);
  Node n;
  n.op = Op::kDense;
  n.in = {x, w, b};
  n.name = prefix;
  n.val = Array({xshape[0], out_features});
  return add_node(std::move(n));
}

int Graph::relu(int x) { return unary(Op::kRelu, x); }
int Graph::tanh_(int x) { return unary(Op::kTanh, x); }
int Graph::exp_(int x) { return unary(Op::kExp, x); }
int Graph::log_(int x) { return unary(Op::kLog, x); }

int Graph::unary(Op op, int x) {
  Node n;
  n.op = op;
  n.in = {x};
  n.val = Array(value(x).shape);
  return add_node(std::move(n));
}

int Graph::add(int a, int b) { return binary(Op::kAdd, a, b); }
int Graph::mul(int a, int b) { return binary(Op::kMul, a, b); }

int Graph::binary(Op op, int a, int b) {
  if (value(a).shape != value(b).shape)
    throw Error(std::string(op_name(op)) + ": shape mismatch " + value(a).shape_str() + " vs " +
                value(b).shape_str());
  Node n;
  n.op = op;
  n.in = {a, b};
  n.val = Array(value(a).shape);
  return add_node(std::move(n));
}

int Graph::scalar_mul(int x, float c) {
  Node n;
  n.op = Op::kScalarMul;
  n.in = {x};
  n.scalar = c;
  n.val = Array(value(x).shape);
  return add_node(std::move(n));
}

int Graph::reduce_sum(int x) {
  Node n;
  n.op = Op::kReduceSum;
  n.in = {x};
  n.val = Array({1});
  return add_node(std::move(n));
}

int Graph::reduce_mean(int x) {
  Node n;
  n.op = Op::kReduceMean;
  n.in = {x};
  n.val = Array({1});
  return add_node(std::move(n));
}

int Graph::avg_pool2d(int x, int k) {
  const Array& xv = value(x);
  if (xv.shape.size() != 3) throw Error("avg_pool2d: expected [C,H,W]");
  if (k <= 0 || xv.shape[1] % k != 0 || xv.shape[2] % k != 0)
    throw Error("avg_pool2d: kernel must divide H and W");
  Node n;
  n.op = Op::kAvgPool2d;
  n.in = {x};
  n.pool_k = k;
  n.val = Array({xv.shape[0], xv.shape[1] / k, xv.shape[2] / k});
  return add_node(std::move(n));
}

int Graph::concat(int a, int b) {
  const Array& av = value(a);
  const Array& bv = value(b);
  require_2d(av, "concat");
  require_2d(bv, "concat");
  if (av.shape[0] != bv.shape[0]) throw Error("concat: row count mismatch");
  Node n;
  n.op = Op::kConcat;
  n.in = {a, b};
  n.val = Array({av.shape[0], av.shape[1] + bv.shape[1]});
  return add_node(std::move(n));
}

// ---------------------------------------------------------------------------
// Forward

const Array& Graph::in_val(const Node& n, int k) const {
  const Node& src = nodes_[n.in[k]];
  return src.op == Op::kParam ? src.store->value(src.param_idx) : src.val;
}

const Array& Graph::value(int id) const {
  const Node& n = nodes_[id];
  return n.op == Op::kParam ? n.store->value(n.param_idx) : n.val;
}

void Graph::set_input(int id, const float* data, long n) {
  Node& node = nodes_[id];
  if (node.op != Op::kInput) throw Error("set_input: node is not an input");
  if (n != node.val.numel())
    throw Error("set_input: '" + node.name + "' expects " + std::to_string(node.val.numel()) +
                " values, got " + std::to_string(n));
  std::memcpy(node.val.data.data(), data, sizeof(float) * n);
}

void Graph::forward(const std::map<std::string, Array>& inputs) {
  for (const auto& [name, arr] : inputs) {
    auto it = input_ids_.find(name);
    if (it == input_ids_.end()) throw Error("forward: unknown input '" + name + "'");
    if (arr.shape != nodes_[it->second].val.shape)
      throw Error("forward: input '" + name + "' shape " + arr.shape_str() + " != declared " +
                  nodes_[it->second].val.shape_str());
    set_input(it->second, arr);
  }
  run();
}

void Graph::check_finite(int id) const {
  const Node& n = nodes_[id];
  for (float v : n.val.data)
    if (!std::isfinite(v))
      throw Error("node " + std::to_string(id) + " (" + op_name(n.op) + (n.name.empty() ? "" : " '" + n.name + "'") +
                  "): non-finite output");
}

void Graph::compute(int id) {
  Node& n = nodes_[id];
  switch (n.op) {
    case Op::kInput:
    case Op::kConst:
    case Op::kParam:
      return;
    case Op::kDense: {
      const Array& x = in_val(n, 0);
      const Array& w = in_val(n, 1);
      const Array& b = in_val(n, 2);
      CMapF X(x.data.data(), x.shape[0], x.shape[1]);
      CMapF W(w.data.data(), w.shape[0], w.shape[1]);
      MapF Y(n.val.data.data(), n.val.shape[0], n.val.shape[1]);
      Y.noalias() = X * W;
      CMapF B(b.data.data(), 1, b.shape[1]);
      Y.rowwise() += B.row(0);
      break;
    }
    case Op::kRelu: {
      const auto& x = in_val(n, 0).data;
      for (size_t i = 0; i < x.size(); ++i) n.val.data[i] = x[i] > 0.0f ? x[i] : 0.0f;
      break;
    }
    case Op::kTanh: {
      const auto& x = in_val(n, 0).data;
      for (size_t i = 0; i < x.size(); ++i) n.val.data[i] = std::tanh(x[i]);
      break;
    }
    case Op::kExp: {
      const auto& x = in_val(n, 0).data;
      for (size_t i = 0; i < x.size(); ++i) n.val.data[i] = std::exp(x[i]);
      break;
    }
    case Op::kLog: {
      const auto& x = in_val(n, 0).data;
      for (size_t i = 0; i < x.size(); ++i) n.val.data[i] = std::log(x[i]);
      break;
    }
    case Op::kAdd: {
      const auto& a = in_val(n, 0).data;
      const auto& b = in_val(n, 1).data;
      for (size_t i = 0; i < a.size(); ++i) n.val.data[i] = a[i] + b[i];
      break;
    }
    case Op::kMul: {
      const auto& a = in_val(n, 0).data;
      const auto& b = in_val(n, 1).data;
      for (size_t i = 0; i < a.size(); ++i) n.val.data[i] = a[i] * b[i];
      break;
    }
    case Op::kScalarMul: {
      const auto& x = in_val(n, 0).data;
      for (size_t i = 0; i < x.size(); ++i) n.val.data[i] = n.scalar * x[i];
      break;
    }
    case Op::kReduceSum:
    case Op::kReduceMean: {
      const auto& x = in_val(n, 0).data;
      double acc = 0.0;
      for (float v : x) acc += v;
      if (n.op == Op::kReduceMean) acc /= static_cast<double>(x.size());
      n.val.data[0] = static_cast<float>(acc);
      break;
    }
    case Op::kAvgPool2d: {
      const Array& x = in_val(n, 0);
      const int C = x.shape[0], H = x.shape[1], W = x.shape[2];
      const int k = n.pool_k, Ho = H / k, Wo = W / k;
      const float inv = 1.0f / static_cast<float>(k * k);
      for (int c = 0; c < C; ++c)
        for (int i = 0; i < Ho; ++i)
          for (int j = 0; j < Wo; ++j) {
            float acc = 0.0f;
            for (int di = 0; di < k; ++di)
              for (int dj = 0; dj < k; ++dj)
                acc += x.data[(c * H + i * k + di) * W + j * k + dj];
            n.val.data[(c * Ho + i) * Wo + j] = acc * inv;
          }
      break;
    }
    case Op::kConcat: {
      const Array& a = in_val(n, 0);
      const Array& b = in_val(n, 1);
      const int rows = a.shape[0], ca = a.shape[1], cb = b.shape[1];
      for (int r = 0; r < rows; ++r) {
        std::memcpy(&n.val.data[r * (ca + cb)], &a.data[r * ca], sizeof(float) * ca);
        std::memcpy(&n.val.data[r * (ca + cb) + ca], &b.data[r * cb], sizeof(float) * cb);
      }
      break;
    }
  }
  check_finite(id);
}

void Graph::run() {
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) compute(i);
  forward_done_ = true;
}

// ---------------------------------------------------------------------------
// Backward

void Graph::backward(int out_id, const Array& seed) {
  if (!forward_done_) throw Error("backward called before forward");
  const Array& out_val = value(out_id);
  if (seed.shape != out_val.shape)
    throw Error("backward: seed shape " + seed.shape_str() + " != output shape " +
                out_val.shape_str());
  for (auto& n : nodes_) n.grad.fill(0.0f);
  nodes_[out_id].grad.data = seed.data;

  for (int id = out_id; id >= 0; --id) {
    Node& n = nodes_[id];
    bool any = false;
    for (float g : n.grad.data)
      if (g != 0.0f) {
        any = true;
        break;
      }
    if (!any && id != out_id) continue;
    const auto& g = n.grad.data;
    switch (n.op) {
      case Op::kInput:
      case Op::kConst:
        break;
      case Op::kParam:
        if (!n.store->frozen) {
          auto& pg = n.store->grad(n.param_idx).data;
          for (size_t i = 0; i < pg.size(); ++i) pg[i] += g[i];
        }
        break;
      case Op::kDense: {
        Node& xn = nodes_[n.in[0]];
        Node& wn = nodes_[n.in[1]];
        Node& bn = nodes_[n.in[2]];
        const Array& x = in_val(n, 0);
        const Array& w = in_val(n, 1);
        CMapF X(x.data.data(), x.shape[0], x.shape[1]);
        CMapF W(w.data.data(), w.shape[0], w.shape[1]);
        CMapF G(g.data(), n.val.shape[0], n.val.shape[1]);
        const bool skip_weights = wn.store->frozen;
        // dX only if something upstream needs it
        // skip dX for leaves; for the observation layer this is the largest
        // GEMM of the step and nothing consumes it
        if (xn.op != Op::kInput && xn.op != Op::kConst) {
          MapF GX(xn.grad.data.data(), x.shape[0], x.shape[1]);
          GX.noalias() += G * W.transpose();
        }
        if (!skip_weights) {
          MapF GW(wn.grad.data.data(), w.shape[0], w.shape[1]);
          GW.noalias() += X.transpose() * G;
          MapF GB(bn.grad.data.data(), 1, n.val.shape[1]);
          GB.row(0) += G.colwise().sum();
        }
        break;
      }
      case Op::kRelu: {
        const auto& x = in_val(n, 0).data;
        auto& gx = nodes_[n.in[0]].grad.data;
        for (size_t i = 0; i < x.size(); ++i)
          if (x[i] > 0.0f) gx[i] += g[i];
        break;
      }
      case Op::kTanh: {
        const auto& y = n.val.data;
        auto& gx = nodes_[n.in[0]].grad.data;
        for (size_t i = 0; i < y.size(); ++i) gx[i] += g[i] * (1.0f - y[i] * y[i]);
        break;
      }
      case Op::kExp: {
        const auto& y = n.val.data;
        auto& gx = nodes_[n.in[0]].grad.data;
        for (size_t i = 0; i < y.size(); ++i) gx[i] += g[i] * y[i];
        break;
      }
      case Op::kLog: {
        const auto& x = in_val(n, 0).data;
        auto& gx = nodes_[n.in[0]].grad.data;
        for (size_t i = 0; i < x.size(); ++i) gx[i] += g[i] / x[i];
        break;
      }
      case Op::kAdd: {
        auto& ga = nodes_[n.in[0]].grad.data;
        auto& gb = nodes_[n.in[1]].grad.data;
        for (size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i];
          gb[i] += g[i];
        }
        break;
      }
      case Op::kMul: {
        const auto& a = in_val(n, 0).data;
        const auto& b = in_val(n, 1).data;
        auto& ga = nodes_[n.in[0]].grad.data;
        auto& gb = nodes_[n.in[1]].grad.data;
        for (size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i] * b[i];
          gb[i] += g[i] * a[i];
        }
        break;
      }
      case Op::kScalarMul: {
        auto& gx = nodes_[n.in[0]].grad.data;
        for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * n.scalar;
        break;
      }
      case Op::kReduceSum: {
        auto& gx = nodes_[n.in[0]].grad.data;
        const float s = g[0];
        for (auto& v : gx) v += s;
        break;
      }
      case Op::kReduceMean: {
        auto& gx = nodes_[n.in[0]].grad.data;
        const float s = g[0] / static_cast<float>(gx.size());
        for (auto& v : gx) v += s;
        break;
      }
      case Op::kAvgPool2d: {
        const Array& x = in_val(n, 0);
        auto& gx = nodes_[n.in[0]].grad.data;
        const int C = x.shape[0], H = x.shape[1], W = x.shape[2];
        const int k = n.pool_k, Ho = H / k, Wo = W / k;
        const float inv = 1.0f / static_cast<float>(k * k);
        for (int c = 0; c < C; ++c)
          for (int i = 0; i < Ho; ++i)
            for (int j = 0; j < Wo; ++j) {
              const float go = g[(c * Ho + i) * Wo + j] * inv;
              for (int di = 0; di < k; ++di)
                for (int dj = 0; dj < k; ++dj)
                  gx[(c * H + i * k + di) * W + j * k + dj] += go;
            }
        break;
      }
      case Op::kConcat: {
        Node& an = nodes_[n.in[0]];
        Node& bn = nodes_[n.in[1]];
        const int rows = in_val(n, 0).shape[0];
        const int ca = in_val(n, 0).shape[1], cb = in_val(n, 1).shape[1];
        for (int r = 0; r < rows; ++r) {
          for (int c = 0; c < ca; ++c) an.grad.data[r * ca + c] += g[r * (ca + cb) + c];
          for (int c = 0; c < cb; ++c) bn.grad.data[r * cb + c] += g[r * (ca + cb) + ca + c];
        }
        break;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Double-precision re-evaluation (gradient checker)

double Graph::eval_f64(int out_id, const ParameterStore* store, int pidx, long elem,
                       double override_value) const {
  std::vector<std::vector<double>> vals(nodes_.size());
  for (int id = 0; id <= out_id; ++id) {
    const Node& n = nodes_[id];
    const Array* src = nullptr;
    switch (n.op) {
      case Op::kInput:
      case Op::kConst:
        src = &n.val;
        break;
      case Op::kParam:
        src = &n.store->value(n.param_idx);
        break;
      default:
        break;
    }
    if (src) {
      vals[id].assign(src->data.begin(), src->data.end());
      if (n.op == Op::kParam && n.store.get() == store && n.param_idx == pidx)
        vals[id][elem] = override_value;
      continue;
    }
    const auto& a = vals[n.in[0]];
    vals[id].resize(n.val.numel());
    auto& out = vals[id];
    switch (n.op) {
      case Op::kDense: {
        const auto& w = vals[n.in[1]];
        const auto& b = vals[n.in[2]];
        const int B = n.val.shape[0], O = n.val.shape[1];
        const int I = static_cast<int>(a.size()) / B;
        for (int r = 0; r < B; ++r)
          for (int c = 0; c < O; ++c) {
            double acc = b[c];
            for (int k = 0; k < I; ++k) acc += a[r * I + k] * w[k * O + c];
            out[r * O + c] = acc;
          }
        break;
      }
      case Op::kRelu:
        for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] > 0.0 ? a[i] : 0.0;
        break;
      case Op::kTanh:
        for (size_t i = 0; i < a.size(); ++i) out[i] = std::tanh(a[i]);
        break;
      case Op::kExp:
        for (size_t i = 0; i < a.size(); ++i) out[i] = std::exp(a[i]);
        break;
      case Op::kLog:
        for (size_t i = 0; i < a.size(); ++i) out[i] = std::log(a[i]);
        break;
      case Op::kAdd: {
        const auto& b = vals[n.in[1]];
        for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
        break;
      }
      case Op::kMul: {
        const auto& b = vals[n.in[1]];
        for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
        break;
      }
      case Op::kScalarMul:
        for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] * n.scalar;
        break;
      case Op::kReduceSum:
      case Op::kReduceMean: {
        double acc = 0.0;
        for (double v : a) acc += v;
        if (n.op == Op::kReduceMean) acc /= static_cast<double>(a.size());
        out[0] = acc;
        break;
      }
      case Op::kAvgPool2d: {
        const Array& xs = value(n.in[0]);
        const int C = xs.shape[0], H = xs.shape[1], W = xs.shape[2];
        const int k = n.pool_k, Ho = H / k, Wo = W / k;
        const double inv = 1.0 / (k * k);
        for (int c = 0; c < C; ++c)
          for (int i = 0; i < Ho; ++i)
            for (int j = 0; j < Wo; ++j) {
              double acc = 0.0;
              for (int di = 0; di < k; ++di)
                for (int dj = 0; dj < k; ++dj) acc += a[(c * H + i * k + di) * W + j * k + dj];
              out[(c * Ho + i) * Wo + j] = acc * inv;
            }
        break;
      }
      case Op::kConcat: {
        const auto& b = vals[n.in[1]];
        const int rows = n.val.shape[0];
        const int ca = value(n.in[0]).shape[1], cb = value(n.in[1]).shape[1];
        for (int r = 0; r < rows; ++r) {
          for (int c = 0; c < ca; ++c) out[r * (ca + cb) + c] = a[r * ca + c];
          for (int c = 0; c < cb; ++c) out[r * (ca + cb) + ca + c] = b[r * cb + c];
        }
        break;
      }
      default:
        throw Error("eval_f64: unexpected op");
    }
  }
  if (vals[out_id].size() != 1) throw Error("eval_f64: output is not scalar");
  return vals[out_id][0];
}

}  // namespace cqrl
