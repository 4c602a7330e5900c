#include "ffgrad/gradient_coding.hpp"

#include <stdexcept>

#include "ffgrad/replicas.hpp"
#include "ffgrad/rng.hpp"

namespace ffgrad {

namespace {

int mod(long x, int q) {
  long r = x % q;
  return static_cast<int>(r < 0 ? r + q : r);
}

int path_sum(const std::vector<int>& path, const ClusterLabeling& lab, const SpinSource& src) {
  long s = 0;
  for (int c : path) s += cluster_spin(lab, c, src);
  return mod(s, src.q);
}

}  // namespace

SpinSource SpinSource::random(const Window& w, int q, uint64_t seed) {
  if (q < 2) throw std::invalid_argument("SpinSource: q must be at least 2");
  SpinSource s;
  s.q = q;
  Rng rng(seed);
  const int n = w.num_vertices();
  s.U.resize(n);
  s.Y.resize(n);
  for (int v = 0; v < n; ++v) {
    s.U[v] = rng.bits();
    s.Y[v] = static_cast<int>(rng.below(q));
  }
  return s;
}

int argmin_u(const Window& w, const SpinSource& src, const std::vector<int>& vertices) {
  if (vertices.empty()) throw std::invalid_argument("argmin_u: empty vertex set");
  int best = vertices[0];
  for (int v : vertices) {
    if (src.U[v] < src.U[best] || (src.U[v] == src.U[best] && w.coord(v) < w.coord(best))) best = v;
  }
  return best;
}

int cluster_spin(const ClusterLabeling& lab, int C, const SpinSource& src) {
  if (C < 0 || C >= lab.num_clusters()) throw std::invalid_argument("cluster_spin: invalid cluster id");
  const ClusterRecord& rec = lab.clusters[C];
  if (rec.frontier_touching || rec.contains_ghost)
    throw std::invalid_argument("cluster_spin: cluster is not certifiably finite");
  return src.Y[argmin_u(lab.window(), src, rec.vertices)];
}

std::vector<int> sigma_offline(const ClusterLabeling& lab, const ClusterTree& tree, const SpinSource& src) {
  const int n = lab.num_clusters();
  // The offline tree treats the window as the whole graph, so non-root
  // border clusters of free windows still carry a spin.
  std::vector<int> spin(n, 0);
  for (int c = 0; c < n; ++c)
    if (c != tree.root) spin[c] = src.Y[argmin_u(lab.window(), src, lab.clusters[c].vertices)];
  std::vector<int> sum(n, -1);
  sum[tree.root] = 0;
  for (int c = 0; c < n; ++c) {
    std::vector<int> stack;
    int x = c;
    while (sum[x] < 0) {
      stack.push_back(x);
      x = tree.parent[x];
    }
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) sum[*it] = mod(sum[tree.parent[*it]] + spin[*it], src.q);
  }
  const Window& w = lab.window();
  std::vector<int> sigma(w.num_vertices());
  for (int v = 0; v < w.num_vertices(); ++v) sigma[v] = sum[lab.cluster_of(v)];
  return sigma;
}

Determination<int> grad_edge(const ClusterLabeling& lab, int u, int v, const SpinSource& src) {
  Determination<LcaResult> l = lca_paths(lab, u, v);
  Determination<int> out;
  out.witness_radius = l.witness_radius;
  if (!l.determined()) return out;
  out.status = Status::Determined;
  out.value = mod(path_sum(l.value.path_v, lab, src) - path_sum(l.value.path_u, lab, src), src.q);
  return out;
}

std::vector<GradEntry> gradient_field(const ClusterLabeling& lab, const SpinSource& src) {
  const Window& w = lab.window();
  std::vector<GradEntry> out;
  for (int e = 0; e < w.num_edges(); ++e) {
    if (w.is_shell_edge(e)) continue;
    const Edge& ed = w.edge(e);
    out.push_back({ed.u, ed.v, grad_edge(lab, ed.u, ed.v, src)});
  }
  return out;
}

std::vector<int> direct_es_assignment(const ClusterLabeling& lab, int root, int q, uint64_t seed) {
  Rng rng(seed);
  std::vector<int> spin(lab.num_clusters(), 0);
  for (int c = 0; c < lab.num_clusters(); ++c)
    if (c != root) spin[c] = static_cast<int>(rng.below(q));
  const Window& w = lab.window();
  std::vector<int> sigma(w.num_vertices());
  for (int v = 0; v < w.num_vertices(); ++v) sigma[v] = spin[lab.cluster_of(v)];
  return sigma;
}

RadiusHistogram witness_radius_survey(const std::function<PercolationConfig(uint64_t)>& generator, int u, int v,
                                      int q, long trials, uint64_t seed, bool parallel) {
  auto radii = run_replicas(
      trials,
      [&](long i) {
        uint64_t s = derive_seed(seed, static_cast<uint64_t>(i));
        PercolationConfig cfg = generator(s);
        ClusterLabeling lab = components(cfg);
        SpinSource src = SpinSource::random(lab.window(), q, mix64(s));
        Determination<int> d = grad_edge(lab, u, v, src);
        return d.determined() ? d.witness_radius : -1;
      },
      parallel);
  RadiusHistogram h;
  h.trials = trials;
  for (int r : radii) {
    if (r < 0)
      ++h.undetermined;
    else
      ++h.counts[r];
  }
  return h;
}

}  // namespace ffgrad
