#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ffgrad/percolation.hpp"

namespace ffgrad {

enum class Status { Determined, Undetermined };

template <class T>
struct Determination {
  Status status = Status::Undetermined;
  T value{};
  int witness_radius = -1;  // radius of the certified ball around the query centres
  bool determined() const { return status == Status::Determined; }
};

// A cluster as seen by a query. rep is the least vertex of the observed piece
// (stable under changes outside the witness); cluster is its id in the full
// labeling. Root pieces have rep = -1.
struct ClusterRef {
  int cluster = -1;
  int rep = -1;
  bool root = false;
  bool operator==(const ClusterRef&) const = default;
};

struct Candidate {
  enum Kind { Found, Tie, Unknown } kind = Unknown;
  ClusterRef ref;
};

struct ParentInfo {
  ClusterRef parent;
  int k = 0;
};

struct LcaResult {
  int n_uv = 0;
  int n_vu = 0;
  std::vector<int> path_u;  // cluster ids, C_u first, ancestor excluded
  std::vector<int> path_v;
  ClusterRef ancestor;
};

struct ClusterTree {
  int root = -1;
  std::vector<int> parent;  // -1 for the root
  std::vector<int> level;   // k(C) at which the parent was selected
  std::vector<int> depth;
};

constexpr int kWholeWindow = -1;

// V_i(C) with knowledge restricted to the ball of the given radius around C.
Candidate candidate(const ClusterLabeling& lab, int C, int i, int radius = kWholeWindow);
Determination<ParentInfo> parent(const ClusterLabeling& lab, int C);
// Offline tree over the whole window. root = -1 selects the ghost cluster
// when wired, else the unique frontier cluster.
ClusterTree build_tree(const ClusterLabeling& lab, int root = -1);
Determination<LcaResult> lca_paths(const ClusterLabeling& lab, int u, int v);

// Ball of radius r around the centres, and the edges with both endpoints in it.
std::vector<uint8_t> known_vertices(const Window& w, const std::vector<int>& centres, int r);
std::vector<uint8_t> known_edges(const Window& w, const std::vector<uint8_t>& known_vertex);
// Smallest radius whose ball covers the whole window.
int covering_radius(const Window& w, const std::vector<int>& centres);

enum class PerturbRegion { Outside, Inside };

struct PerturbReport {
  int trials = 0;
  int mismatches = 0;
  bool pass() const { return mismatches == 0; }
};

// Re-randomizes edges outside (or, as a negative control, inside) the witness
// ball and compares eval against its value on the original configuration.
PerturbReport witness_perturb_test(const PercolationConfig& cfg, const std::vector<int>& centres, int radius,
                                   const std::function<std::string(const PercolationConfig&)>& eval, int trials,
                                   uint64_t seed, PerturbRegion region = PerturbRegion::Outside);

std::string lca_key(const ClusterLabeling& lab, const LcaResult& r);

}  // namespace ffgrad
