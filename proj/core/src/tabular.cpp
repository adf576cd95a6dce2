#include "cqrl/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cqrl {

void MdpSpec::validate() const {
  if (num_states <= 0 || num_actions <= 0) throw Error("MdpSpec: empty state/action space");
  if (gamma < 0.0 || gamma > 1.0) throw Error("MdpSpec: gamma outside [0,1]");
  if (outcomes.size() != static_cast<size_t>(num_states) * num_actions)
    throw Error("MdpSpec: outcome table size mismatch");
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) {
      const auto& outs = at(s, a);
      if (outs.empty()) continue;
      double total = 0.0;
      for (const auto& o : outs) {
        if (o.next_state < 0 || o.next_state >= num_states)
          throw Error("MdpSpec: next state out of range");
        if (!(o.prob > 0.0) || !std::isfinite(o.reward))
          throw Error("MdpSpec: bad outcome probability or reward");
        total += o.prob;
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw Error("MdpSpec: probabilities do not sum to 1 at (s=" + std::to_string(s) +
                    ",a=" + std::to_string(a) + ")");
    }
}

ExpectedViResult expected_value_iteration(const MdpSpec& mdp, int max_sweeps, double tol) {
  mdp.validate();
  const int S = mdp.num_states, A = mdp.num_actions;
  ExpectedViResult res;
  res.q.assign(static_cast<size_t>(S) * A, 0.0);
  std::vector<double> next(res.q.size(), 0.0);
  std::vector<double> vmax(S, 0.0);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      bool any = false;
      for (int a = 0; a < A; ++a)
        if (!mdp.at(s, a).empty()) {
          any = true;
          best = std::max(best, res.q[s * A + a]);
        }
      vmax[s] = any ? best : 0.0;
    }
    double delta = 0.0;
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const auto& outs = mdp.at(s, a);
        if (outs.empty()) {
          next[s * A + a] = 0.0;
          continue;
        }
        double v = 0.0;
        for (const auto& o : outs)
          v += o.prob * (o.reward + (o.terminal ? 0.0 : mdp.gamma * vmax[o.next_state]));
        delta = std::max(delta, std::abs(v - res.q[s * A + a]));
        next[s * A + a] = v;
      }
    res.q.swap(next);
    res.sweeps = sweep + 1;
    if (delta < tol) {
      res.converged = true;
      break;
    }
  }
  res.greedy.assign(S, 0);
  for (int s = 0; s < S; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A; ++a)
      if (!mdp.at(s, a).empty() && res.q[s * A + a] > best) {
        best = res.q[s * A + a];
        res.greedy[s] = a;
      }
  }
  return res;
}

namespace {

struct WeightedAtom {
  double value;
  double weight;
  bool operator<(const WeightedAtom& o) const { return value < o.value; }
};

// Project weighted atoms onto n equal-mass atoms, each holding the
// conditional mean of its probability slice [(i-1)/n, i/n). Mass-faithful
// (tail probabilities below 1/(2n) still shift q_1) and mean-exact (the atom
// average equals the pooled mean), unlike strict quantile reads which drop
// sub-1/(2n) tail mass on every sweep.
void project(std::vector<WeightedAtom>& pool, std::span<double> out) {
  std::sort(pool.begin(), pool.end());
  const int n = static_cast<int>(out.size());
  double total = 0.0;
  for (const auto& a : pool) total += a.weight;
  const double slice = total / n;
  size_t k = 0;
  double remaining = pool.empty() ? 0.0 : pool[0].weight;
  for (int i = 0; i < n; ++i) {
    double need = slice;
    double acc = 0.0;
    while (need > slice * 1e-12) {
      while (remaining <= 0.0 && k + 1 < pool.size()) remaining = pool[++k].weight;
      const double take = std::min(need, remaining);
      if (take <= 0.0) break;
      acc += take * pool[k].value;
      remaining -= take;
      need -= take;
    }
    out[i] = acc / slice;
  }
}

}  // namespace

QrViResult tabular_qr_value_iteration(const MdpSpec& mdp, int n, AggregationMode mode,
                                      int max_sweeps, double tol) {
  mdp.validate();
  if (n < 1) throw Error("tabular_qr_value_iteration: N must be >= 1");
  const int S = mdp.num_states, A = mdp.num_actions;
  const int NI = n;

  std::vector<double> z(static_cast<size_t>(S) * A * NI, 0.0);
  auto dist = [&](std::vector<double>& buf, int s, int a) {
    return std::span<double>(&buf[(static_cast<size_t>(s) * A + a) * NI], NI);
  };
  auto agg_internal = [&](std::span<const double> d) { return aggregate(d, mode); };

  QrViResult res;
  res.n = n;
  std::vector<int> greedy(S, 0);
  std::vector<WeightedAtom> pool;
  std::vector<double> prev(NI);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    // Gauss-Seidel sweeps: updates land in place and later states see them
    // within the same sweep, which suppresses the period-2 value cycles a
    // synchronous update sustains under near-tied greedy aggregates.
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      greedy[s] = 0;
      for (int a = 0; a < A; ++a) {
        if (mdp.at(s, a).empty()) continue;
        const double v = agg_internal(dist(z, s, a));
        if (v > best) {
          best = v;
          greedy[s] = a;
        }
      }
    }
    double delta = 0.0;
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const auto& outs = mdp.at(s, a);
        auto out = dist(z, s, a);
        if (outs.empty()) continue;
        std::copy(out.begin(), out.end(), prev.begin());
        pool.clear();
        for (const auto& o : outs) {
          if (o.terminal) {
            pool.push_back({o.reward, o.prob});
          } else {
            const auto zs = dist(z, o.next_state, greedy[o.next_state]);
            const double w = o.prob / NI;
            for (double v : zs) pool.push_back({o.reward + mdp.gamma * v, w});
          }
        }
        project(pool, out);
        for (int i = 0; i < NI; ++i) delta = std::max(delta, std::abs(out[i] - prev[i]));
      }
    res.sweeps = sweep + 1;
    if (delta < tol) {
      res.converged = true;
      break;
    }
  }

  // Export atoms and final greedy policy.
  res.z = z;
  res.greedy.assign(S, 0);
  for (int s = 0; s < S; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A; ++a) {
      if (mdp.at(s, a).empty()) continue;
      const double v = agg_internal(dist(z, s, a));
      if (v > best) {
        best = v;
        res.greedy[s] = a;
      }
    }
  }
  return res;
}

QlearningResult tabular_quantile_qlearning(const MdpSpec& mdp, int start_state,
                                           const QlearningConfig& cfg, Rng& rng) {
  mdp.validate();
  const int S = mdp.num_states, A = mdp.num_actions, N = cfg.n;
  const auto taus = quantile_midpoints(N);
  std::vector<double> z(static_cast<size_t>(S) * A * N, 0.0);
  auto dist = [&](int s, int a) {
    return std::span<double>(&z[(static_cast<size_t>(s) * A + a) * N], N);
  };
  auto agg = [&](int s, int a) {
    return aggregate(std::span<const double>(dist(s, a)), cfg.mode);
  };
  auto greedy_at = [&](int s) {
    int best_a = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A; ++a) {
      if (mdp.at(s, a).empty()) continue;
      const double v = agg(s, a);
      if (v > best) {
        best = v;
        best_a = a;
      }
    }
    return best_a;
  };

  int s = start_state;
  int ep_len = 0;
  std::vector<double> targets(N);
  for (long step = 0; step < cfg.steps; ++step) {
    const double frac = static_cast<double>(step) / static_cast<double>(cfg.steps);
    const double eps = cfg.epsilon + (cfg.epsilon_final - cfg.epsilon) * frac;
    const double lr = cfg.lr + (cfg.lr_final - cfg.lr) * frac;
    int a;
    if (rng.uniform() < eps) {
      a = rng.uniform_int(A);
      while (mdp.at(s, a).empty()) a = rng.uniform_int(A);
    } else {
      a = greedy_at(s);
    }
    // sample an outcome
    const auto& outs = mdp.at(s, a);
    double u = rng.uniform();
    const Outcome* picked = &outs.back();
    for (const auto& o : outs) {
      if (u < o.prob) {
        picked = &o;
        break;
      }
      u -= o.prob;
    }
    if (picked->terminal) {
      std::fill(targets.begin(), targets.end(), picked->reward);
    } else {
      const int ap = greedy_at(picked->next_state);
      const auto zn = dist(picked->next_state, ap);
      for (int j = 0; j < N; ++j) targets[j] = picked->reward + mdp.gamma * zn[j];
    }
    auto zi = dist(s, a);
    for (int i = 0; i < N; ++i) {
      double g = 0.0;
      for (int j = 0; j < N; ++j) {
        const double uij = targets[j] - zi[i];
        const double w = uij < 0.0 ? (1.0 - taus[i]) : taus[i];
        const double dh = std::abs(uij) <= cfg.kappa ? uij / cfg.kappa : (uij > 0.0 ? 1.0 : -1.0);
        g += w * dh;
      }
      zi[i] += lr * g / N;
    }
    ++ep_len;
    if (picked->terminal || ep_len >= cfg.episode_cap) {
      s = start_state;
      ep_len = 0;
    } else {
      s = picked->next_state;
    }
  }

  QlearningResult res;
  res.n = N;
  res.greedy.assign(S, 0);
  for (int st = 0; st < S; ++st) res.greedy[st] = greedy_at(st);
  res.z = std::move(z);
  return res;
}

std::string oracle_csv(const QrViResult& res, int num_states, int num_actions) {
  std::ostringstream os;
  os << "state,action";
  for (int j = 1; j <= res.n; ++j) os << ",q_" << j;
  os << ",greedy\n";
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) {
      os << s << "," << a;
      const auto d = res.dist(s, a, num_actions);
      char buf[32];
      for (int j = 0; j < res.n; ++j) {
        std::snprintf(buf, sizeof(buf), "%.9g", d[j]);
        os << "," << buf;
      }
      os << "," << (res.greedy[s] == a ? 1 : 0) << "\n";
    }
  return os.str();
}

}  // namespace cqrl
