#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "ffgrad/cluster_tree.hpp"

namespace ffgrad {

// Per-vertex i.i.d. labels (U_v, Y_v). U is compared as an integer, ties
// broken by vertex coordinate.
struct SpinSource {
  int q = 2;
  std::vector<uint64_t> U;
  std::vector<int> Y;

  static SpinSource random(const Window& w, int q, uint64_t seed);
};

int argmin_u(const Window& w, const SpinSource& src, const std::vector<int>& vertices);
// Y of the minimal-U vertex; throws for frontier-touching or ghost clusters.
int cluster_spin(const ClusterLabeling& lab, int C, const SpinSource& src);

// sigma_v = sum of cluster spins from C_v up to (excluding) the root, mod q.
std::vector<int> sigma_offline(const ClusterLabeling& lab, const ClusterTree& tree, const SpinSource& src);

Determination<int> grad_edge(const ClusterLabeling& lab, int u, int v, const SpinSource& src);

struct GradEntry {
  int u = 0;
  int v = 0;
  Determination<int> value;
};
// Oriented u -> v along every window edge that joins two real vertices.
std::vector<GradEntry> gradient_field(const ClusterLabeling& lab, const SpinSource& src);

// Reference sampler: uniform spin per non-root cluster, 0 on the root.
std::vector<int> direct_es_assignment(const ClusterLabeling& lab, int root, int q, uint64_t seed);

struct RadiusHistogram {
  std::map<int, long> counts;
  long undetermined = 0;
  long trials = 0;
};

// Witness radii of grad_edge(u, v) over independently generated configs.
RadiusHistogram witness_radius_survey(const std::function<PercolationConfig(uint64_t)>& generator, int u, int v,
                                      int q, long trials, uint64_t seed, bool parallel = true);

}  // namespace ffgrad
