#include "ffgrad/random_cluster.hpp"

#include <cmath>

#include "ffgrad/rng.hpp"

namespace ffgrad {

namespace {

struct Scratch {
  std::vector<uint32_t> mark;
  uint32_t stamp = 0;
  std::vector<int> qa, qb;
};

thread_local Scratch scratch;

int spin_at(const PottsConfig& s, int node) { return node == s.window->ghost() ? 0 : s.spin[node]; }

}  // namespace

bool connected_off(const PercolationConfig& cfg, int e) {
  const Window& w = *cfg.window;
  const int a = w.edge(e).u, b = w.edge(e).v;
  if (a == b) return true;
  Scratch& s = scratch;
  if (s.mark.size() < size_t(w.num_nodes())) s.mark.assign(w.num_nodes(), 0);
  if (s.stamp > 0xFFFFFFF0u) {
    std::fill(s.mark.begin(), s.mark.end(), 0);
    s.stamp = 0;
  }
  // Two searches grown alternately; marks stamp..stamp+1 record the side.
  const uint32_t sa = ++s.stamp, sb = ++s.stamp;
  s.qa.clear();
  s.qb.clear();
  s.qa.push_back(a);
  s.qb.push_back(b);
  s.mark[a] = sa;
  s.mark[b] = sb;
  size_t ia = 0, ib = 0;
  auto expand = [&](std::vector<int>& queue, size_t& head, uint32_t mine, uint32_t theirs) {
    int x = queue[head++];
    for (const int* it = w.incident_begin(x); it != w.incident_end(x); ++it) {
      int f = *it;
      if (f == e || !cfg.open[f]) continue;
      int y = w.other(f, x);
      if (s.mark[y] == theirs) return true;
      if (s.mark[y] != mine) {
        s.mark[y] = mine;
        queue.push_back(y);
      }
    }
    return false;
  };
  while (ia < s.qa.size() && ib < s.qb.size()) {
    if (expand(s.qa, ia, sa, sb)) return true;
    if (expand(s.qb, ib, sb, sa)) return true;
  }
  return false;
}

double fk_conditional(const PercolationConfig& cfg, int e, const FkParams& params) {
  if (params.q == 1.0) return params.p;
  return fk_open_probability(connected_off(cfg, e), params.p, params.q);
}

void fk_heat_bath_step(PercolationConfig& cfg, int e, double u, const FkParams& params) {
  // Skip the search when the outcome does not depend on it.
  const double lo = fk_open_probability(false, params.p, params.q);
  const double hi = params.p;
  if (u < std::min(lo, hi)) {
    cfg.open[e] = 1;
  } else if (u >= std::max(lo, hi)) {
    cfg.open[e] = 0;
  } else {
    cfg.open[e] = u < fk_conditional(cfg, e, params);
  }
}

PercolationConfig fk_cftp(WindowPtr window, const FkParams& params, uint64_t seed, CftpStats* stats,
                          int64_t max_sweeps) {
  if (params.q < 1.0) throw std::invalid_argument("fk_cftp: monotone coupling needs q >= 1");
  if (params.p < 0.0 || params.p > 1.0) throw std::invalid_argument("fk_cftp: p out of range");
  const int m = window->num_edges();
  TimeStream stream{seed};
  CftpStats local;
  if (m == 0) {
    if (stats) *stats = local;
    return PercolationConfig(window, false);
  }
  for (int64_t T = m;; T *= 2) {
    if (T > max_sweeps * int64_t(m)) throw CftpError("fk_cftp: no coalescence within the horizon cap");
    PercolationConfig upper(window, true), lower(window, false);
    for (int64_t t = -T; t < 0; ++t) {
      auto d = stream.at(t);
      int e = static_cast<int>(bounded_from_bits(d.index_bits, m));
      fk_heat_bath_step(upper, e, d.u, params);
      fk_heat_bath_step(lower, e, d.u, params);
      if (lower.open[e] > upper.open[e]) throw std::logic_error("fk_cftp: sandwich violated");
    }
    local.total_steps += 2 * T;
    if (upper.open == lower.open) {
      local.horizon = T;
      if (stats) *stats = local;
      return upper;
    }
  }
}

PercolationConfig fk_heat_bath(WindowPtr window, const FkParams& params, int64_t sweeps, uint64_t seed) {
  PercolationConfig cfg(window, false);
  const int m = window->num_edges();
  Rng rng(seed);
  for (int64_t t = 0; t < sweeps * m; ++t) {
    int e = static_cast<int>(rng.below(m));
    fk_heat_bath_step(cfg, e, rng.uniform(), params);
  }
  return cfg;
}

double p_from_beta(double beta) { return -std::expm1(-beta); }
double beta_from_p(double p) { return -std::log1p(-p); }

PottsConfig potts_from_fk(const ClusterLabeling& lab, int q, uint64_t seed) {
  Rng rng(seed);
  const int root = lab.ghost_cluster();
  std::vector<int> colour(lab.num_clusters(), 0);
  for (int c = 0; c < lab.num_clusters(); ++c)
    if (c != root) colour[c] = static_cast<int>(rng.below(q));
  PottsConfig s;
  s.window = lab.config.window;
  s.q = q;
  s.spin.resize(s.window->num_vertices());
  for (int v = 0; v < s.window->num_vertices(); ++v) s.spin[v] = colour[lab.cluster_of(v)];
  return s;
}

PercolationConfig fk_from_potts(const PottsConfig& sigma, double p, uint64_t seed) {
  const Window& w = *sigma.window;
  PercolationConfig cfg(sigma.window, false);
  Rng rng(seed);
  for (int e = 0; e < w.num_edges(); ++e) {
    double u = rng.uniform();
    if (spin_at(sigma, w.edge(e).u) == spin_at(sigma, w.edge(e).v)) cfg.open[e] = u < p;
  }
  return cfg;
}

std::vector<OrientedValue> gradient_of_potts(const PottsConfig& sigma) {
  const Window& w = *sigma.window;
  std::vector<OrientedValue> out;
  for (int e = 0; e < w.num_edges(); ++e) {
    if (w.is_shell_edge(e)) continue;
    const Edge& ed = w.edge(e);
    out.push_back({ed.u, ed.v, ((sigma.spin[ed.v] - sigma.spin[ed.u]) % sigma.q + sigma.q) % sigma.q});
  }
  return out;
}

double energy_stat(const PottsConfig& sigma) {
  const Window& w = *sigma.window;
  long agree = 0, total = 0;
  for (int e = 0; e < w.num_edges(); ++e) {
    if (w.is_shell_edge(e)) continue;
    ++total;
    agree += sigma.spin[w.edge(e).u] == sigma.spin[w.edge(e).v];
  }
  return total == 0 ? 1.0 : double(agree) / double(total);
}

Rational fk_weight(const PercolationConfig& cfg, const Rational& p, const Rational& q) {
  const int open = cfg.num_open();
  const int closed = cfg.window->num_edges() - open;
  ClusterLabeling lab = components(cfg);
  int k = lab.num_clusters();
  return rpow(p, open) * rpow(Rational(1) - p, closed) * rpow(q, k);
}

Rational potts_weight(const PottsConfig& sigma, const Rational& p) {
  const Window& w = *sigma.window;
  long disagree = 0;
  for (const Edge& e : w.edges()) disagree += spin_at(sigma, e.u) != spin_at(sigma, e.v);
  return rpow(Rational(1) - p, disagree);
}

Rational es_weight(const PercolationConfig& omega, const PottsConfig& sigma, const Rational& p) {
  const Window& w = *sigma.window;
  long open = 0;
  for (int e = 0; e < w.num_edges(); ++e) {
    if (!omega.open[e]) continue;
    if (spin_at(sigma, w.edge(e).u) != spin_at(sigma, w.edge(e).v)) return Rational(0);
    ++open;
  }
  return rpow(p, open) * rpow(Rational(1) - p, w.num_edges() - open);
}

}  // namespace ffgrad
