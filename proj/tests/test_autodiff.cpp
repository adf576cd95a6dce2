#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cqrl/adam.hpp"
#include "cqrl/grad_check.hpp"

using namespace cqrl;

namespace {

ParameterStorePtr store_with(uint64_t seed) { return std::make_shared<ParameterStore>(seed); }

void set_param(const ParameterStorePtr& s, const std::string& name,
               const std::vector<float>& values) {
  auto& arr = s->value(s->index_of(name));
  REQUIRE(arr.data.size() == values.size());
  arr.data.assign(values.begin(), values.end());
}

}  // namespace

TEST_CASE("dense identity maps input through") {
  Graph g;
  auto store = store_with(1);
  int x = g.input("x", {1, 2});
  int y = g.dense(x, store, "lin", 2);
  set_param(store, "lin/W", {1, 0, 0, 1});
  set_param(store, "lin/b", {0, 0});
  g.forward({{"x", Array({1, 2}, {1.0f, 2.0f})}});
  CHECK(g.value(y).data[0] == doctest::Approx(1.0));
  CHECK(g.value(y).data[1] == doctest::Approx(2.0));
}

TEST_CASE("relu and tanh evaluate their definitions") {
  Graph g;
  int x = g.input("x", {1, 3});
  int r = g.relu(x);
  int t = g.tanh_(x);
  g.forward({{"x", Array({1, 3}, {-1.0f, 0.0f, 2.0f})}});
  CHECK(g.value(r).data[0] == 0.0f);
  CHECK(g.value(r).data[1] == 0.0f);
  CHECK(g.value(r).data[2] == 2.0f);
  CHECK(g.value(t).data[1] == 0.0f);  // odd function at the origin
}

TEST_CASE("backward of x^2 via mul") {
  Graph g;
  auto store = store_with(1);
  int x = g.param(store, "x", {1, 1}, ParamInit::kZeros);
  store->value(0).data[0] = 3.0f;
  int y = g.reduce_sum(g.mul(x, x));
  g.run();
  store->zero_grads();
  Array seed({1});
  seed.data[0] = 1.0f;
  g.backward(y, seed);
  CHECK(store->grad(0).data[0] == doctest::Approx(6.0));
}

TEST_CASE("relu has zero gradient in the inactive region") {
  Graph g;
  auto store = store_with(1);
  int x = g.param(store, "x", {1, 1}, ParamInit::kZeros);
  store->value(0).data[0] = -1.0f;
  int y = g.reduce_sum(g.relu(x));
  g.run();
  store->zero_grads();
  Array seed({1});
  seed.data[0] = 1.0f;
  g.backward(y, seed);
  CHECK(store->grad(0).data[0] == 0.0f);
}

TEST_CASE("backward before forward is an error") {
  Graph g;
  int x = g.input("x", {1, 1});
  int y = g.reduce_sum(x);
  Array seed({1});
  CHECK_THROWS_AS(g.backward(y, seed), Error);
}

TEST_CASE("shape mismatch and non-finite outputs raise structured errors") {
  Graph g;
  int a = g.input("a", {1, 2});
  int b = g.input("b", {1, 3});
  CHECK_THROWS_WITH_AS(g.add(a, b), doctest::Contains("shape mismatch"), Error);

  Graph g2;
  int x = g2.input("x", {1, 1});
  g2.log_(x);
  CHECK_THROWS_WITH_AS(g2.forward({{"x", Array({1, 1}, {-1.0f})}}),
                       doctest::Contains("non-finite"), Error);
}

TEST_CASE("forward is deterministic: identical bits in, identical bits out") {
  auto store = store_with(7);
  Graph g;
  int x = g.input("x", {2, 4});
  int y = g.dense(g.relu(g.dense(x, store, "a", 8)), store, "b", 3);
  Array in({2, 4});
  Rng rng(3);
  for (auto& v : in.data) v = static_cast<float>(rng.uniform(-1, 1));
  g.forward({{"x", in}});
  const FloatVec first = g.value(y).data;
  g.forward({{"x", in}});
  CHECK(g.value(y).data == first);
}

TEST_CASE("per-op backward matches central finite differences (>=100 randomized cases)") {
  Rng rng(42);
  int cases = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 9; ++rep) {
    // dense + relu + tanh + exp + add + mul + scalar_mul + reduce_mean
    {
      Graph g;
      auto s = store_with(rng.next_u64());
      int x = g.param(s, "x", {2, 3}, ParamInit::kZeros);
      for (auto& v : s->value(s->index_of("x")).data) v = static_cast<float>(rng.uniform(-2, 2));
      int h = g.dense(x, s, "fc", 4);
      int path = g.add(g.tanh_(h), g.scalar_mul(g.relu(h), 0.5f));
      int y = g.reduce_mean(g.mul(path, path));
      auto res = gradient_check(g, y, {s});
      worst = std::max(worst, res.max_rel_error);
      ++cases;
    }
    // exp + log chain (positive domain)
    {
      Graph g;
      auto s = store_with(rng.next_u64());
      int x = g.param(s, "x", {1, 5}, ParamInit::kZeros);
      for (auto& v : s->value(s->index_of("x")).data) v = static_cast<float>(rng.uniform(0.5, 2.0));
      int y = g.reduce_sum(g.log_(g.add(g.exp_(x), x)));
      auto res = gradient_check(g, y, {s});
      worst = std::max(worst, res.max_rel_error);
      ++cases;
    }
    // avg_pool2d
    {
      Graph g;
      auto s = store_with(rng.next_u64());
      int x = g.param(s, "x", {2, 4, 4}, ParamInit::kZeros);
      for (auto& v : s->value(s->index_of("x")).data) v = static_cast<float>(rng.uniform(-1, 1));
      int y = g.reduce_sum(g.avg_pool2d(x, 2));
      auto res = gradient_check(g, y, {s});
      worst = std::max(worst, res.max_rel_error);
      ++cases;
    }
    // concat of two parameter blocks
    {
      Graph g;
      auto s = store_with(rng.next_u64());
      int a = g.param(s, "a", {2, 2}, ParamInit::kZeros);
      int b = g.param(s, "b", {2, 3}, ParamInit::kZeros);
      for (int i = 0; i < s->size(); ++i)
        for (auto& v : s->value(i).data) v = static_cast<float>(rng.uniform(-1, 1));
      int y = g.reduce_sum(g.tanh_(g.concat(a, b)));
      auto res = gradient_check(g, y, {s});
      worst = std::max(worst, res.max_rel_error);
      ++cases;
    }
  }
  // every parameter element above is its own finite-difference case
  CHECK(cases * 11 >= 100);
  CHECK(worst < 1e-4);
}

TEST_CASE("gradient_check: linear model is exact to 1e-7") {
  Graph g;
  auto s = store_with(5);
  int x = g.input("x", {1, 4});
  int y = g.reduce_sum(g.dense(x, s, "lin", 2));
  Array in({1, 4});
  Rng rng(9);
  for (auto& v : in.data) v = static_cast<float>(rng.uniform(-1, 1));
  g.forward({{"x", in}});
  auto res = gradient_check(g, y, {s});
  CHECK(res.max_rel_error < 1e-7);
}

TEST_CASE("gradient_check: two-layer tanh net under 1e-4") {
  Graph g;
  auto s = store_with(11);
  int x = g.input("x", {3, 4});
  int h = g.tanh_(g.dense(x, s, "a", 6));
  int y = g.reduce_sum(g.tanh_(g.dense(h, s, "b", 1)));
  Array in({3, 4});
  Rng rng(13);
  for (auto& v : in.data) v = static_cast<float>(rng.uniform(-1, 1));
  g.forward({{"x", in}});
  auto res = gradient_check(g, y, {s});
  CHECK(res.max_rel_error < 1e-4);
}

TEST_CASE("gradient_check flags a corrupted gradient") {
  Graph g;
  auto s = store_with(17);
  int x = g.input("x", {1, 3});
  int y = g.reduce_sum(g.tanh_(g.dense(x, s, "lin", 2)));
  Array in({1, 3}, {0.3f, -0.2f, 0.8f});
  g.forward({{"x", in}});

  g.run();
  s->zero_grads();
  Array seed({1});
  seed.data[0] = 1.0f;
  g.backward(y, seed);
  // corrupt: doubled analytic gradient
  double worst = 0.0;
  const int wi = s->index_of("lin/W");
  const Array& val = s->value(wi);
  for (long e = 0; e < val.numel(); ++e) {
    const double analytic = 2.0 * s->grad(wi).data[e];
    const double fp = g.eval_f64(y, s.get(), wi, e, val.data[e] + 1e-3);
    const double fm = g.eval_f64(y, s.get(), wi, e, val.data[e] - 1e-3);
    const double numeric = (fp - fm) / 2e-3;
    const double rel =
        std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-2});
    worst = std::max(worst, rel);
  }
  CHECK(worst > 0.1);
}

TEST_CASE("adam: zero gradients from a fresh state leave parameters unchanged") {
  auto s = store_with(3);
  Graph g;
  g.param(s, "w", {2, 2}, ParamInit::kGlorotUniform);
  const auto before = s->value(0).data;
  AdamState opt(*s, {});
  s->zero_grads();
  opt.step(*s);
  opt.step(*s);
  CHECK(s->value(0).data == before);
  CHECK(opt.step_count() == 2);
}

TEST_CASE("adam: first step on a unit gradient moves by about lr") {
  auto s = store_with(3);
  Graph g;
  g.param(s, "w", {1, 1}, ParamInit::kZeros);
  s->value(0).data[0] = 1.0f;
  AdamConfig cfg;
  cfg.lr = 0.1f;
  AdamState opt(*s, cfg);
  s->grad(0).data[0] = 1.0f;
  opt.step(*s);
  // bias-corrected first step is lr * g / (|g| + eps) = lr
  CHECK(s->value(0).data[0] == doctest::Approx(1.0f - 0.1f).epsilon(1e-4));
}

TEST_CASE("adam: identical calls from identical state produce identical results") {
  auto make = [] {
    auto s = store_with(21);
    Graph g;
    g.param(s, "w", {4, 4}, ParamInit::kGlorotUniform);
    for (auto& v : s->grad(0).data) v = 0.25f;
    return s;
  };
  auto s1 = make();
  auto s2 = make();
  AdamState o1(*s1, {}), o2(*s2, {});
  o1.step(*s1);
  o2.step(*s2);
  CHECK(s1->value(0).data == s2->value(0).data);
}

TEST_CASE("adam: non-finite gradient raises and leaves parameters untouched") {
  auto s = store_with(3);
  Graph g;
  g.param(s, "w", {1, 2}, ParamInit::kGlorotUniform);
  const auto before = s->value(0).data;
  AdamState opt(*s, {});
  s->grad(0).data[0] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(opt.step(*s), Error);
  CHECK(s->value(0).data == before);
  CHECK(opt.step_count() == 0);
}

TEST_CASE("parameter serialization order follows declaration order") {
  auto s = store_with(1);
  Graph g;
  int x = g.input("x", {1, 3});
  g.dense(g.dense(x, s, "first", 2), s, "second", 1);
  REQUIRE(s->size() == 4);
  CHECK(s->name(0) == "first/W");
  CHECK(s->name(1) == "first/b");
  CHECK(s->name(2) == "second/W");
  CHECK(s->name(3) == "second/b");
}
