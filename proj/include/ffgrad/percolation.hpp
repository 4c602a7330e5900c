#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ffgrad/lattice.hpp"

namespace ffgrad {

enum class Metric { L1, Chebyshev };
// Wired windows contract everything outside into one ghost vertex joined to
// the border by shell edges; free windows have no shell edges.
enum class Shell { Free, Wired };

const char* shell_name(Shell s);
Shell parse_shell(const std::string& s);

struct Edge {
  int u = 0;
  int v = 0;  // equals Window::ghost() for shell edges
};

class Window {
 public:
  // Axis-aligned box [0, L_1) x ... x [0, L_d) of Z^d.
  static std::shared_ptr<const Window> box(const std::vector<int>& extents, Shell shell);
  // One sublattice of the face lattice restricted to a diamond: even faces of
  // Lambda, or odd faces up to the outer boundary. Always wired.
  static std::shared_ptr<const Window> sublattice(const DiamondDomain& dom, Parity which);
  static std::shared_ptr<const Window> from_vertices(std::vector<Coord> coords, std::vector<Coord> offsets,
                                                     Metric metric, Shell shell);

  int num_vertices() const { return static_cast<int>(coords_.size()); }
  int num_nodes() const { return num_vertices() + (wired() ? 1 : 0); }
  int ghost() const { return wired() ? num_vertices() : -1; }
  bool wired() const { return shell_ == Shell::Wired; }
  Shell shell() const { return shell_; }
  Metric metric() const { return metric_; }
  int dim() const { return dim_; }

  const Coord& coord(int v) const { return coords_[v]; }
  int index_of(const Coord& x) const;
  int distance(int a, int b) const;
  int distance(const Coord& a, const Coord& b) const;

  int num_edges() const { return static_cast<int>(edges_.size()); }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  int other(int e, int v) const { return edges_[e].u == v ? edges_[e].v : edges_[e].u; }
  bool is_shell_edge(int e) const { return wired() && edges_[e].v == ghost(); }
  int edge_between(int a, int b) const;  // first edge joining a and b, or -1

  // Incident edge ids for a vertex or the ghost.
  const int* incident_begin(int v) const { return inc_idx_.data() + inc_off_[v]; }
  const int* incident_end(int v) const { return inc_idx_.data() + inc_off_[v + 1]; }
  // In-window ambient neighbours (geometry only, ignores edge states).
  const int* nbr_begin(int v) const { return nbr_idx_.data() + nbr_off_[v]; }
  const int* nbr_end(int v) const { return nbr_idx_.data() + nbr_off_[v + 1]; }
  // Number of ambient neighbours lying outside the window.
  int outside_degree(int v) const { return outside_deg_[v]; }
  bool on_border(int v) const { return outside_deg_[v] > 0; }

  const std::vector<Coord>& offsets() const { return offsets_; }
  const std::string& descriptor() const { return descriptor_; }

  int diameter(const std::vector<int>& vertices) const;

 private:
  std::vector<Coord> coords_;
  std::vector<Coord> offsets_;
  Metric metric_ = Metric::L1;
  Shell shell_ = Shell::Free;
  int dim_ = 2;
  Coord lo_, hi_;
  std::vector<int> lookup_;
  std::vector<Edge> edges_;
  std::vector<int> inc_off_, inc_idx_;
  std::vector<int> nbr_off_, nbr_idx_;
  std::vector<int> outside_deg_;
  std::string descriptor_;
};

using WindowPtr = std::shared_ptr<const Window>;

struct PercolationConfig {
  WindowPtr window;
  std::vector<uint8_t> open;

  PercolationConfig() = default;
  PercolationConfig(WindowPtr w, bool all_open);
  int num_open() const;
};

struct ClusterRecord {
  std::vector<int> vertices;  // real vertices only, ascending
  int diameter = 0;
  bool frontier_touching = false;
  bool contains_ghost = false;
};

struct ClusterLabeling {
  PercolationConfig config;
  std::vector<int> label;  // indexed by node (vertices, then ghost)
  std::vector<ClusterRecord> clusters;

  const Window& window() const { return *config.window; }
  int cluster_of(int v) const { return label[v]; }
  int num_clusters() const { return static_cast<int>(clusters.size()); }
  int ghost_cluster() const;
  std::vector<int> frontier_clusters() const;
};

ClusterLabeling components(const PercolationConfig& cfg);
PercolationConfig bernoulli(WindowPtr window, double p, uint64_t seed);
int cluster_distance(int a, int b, const ClusterLabeling& labeling);

// Text grid: a header line naming the window, then one 0/1 character per
// edge in edge order, one line per row of lower endpoints, shell edges last.
std::string to_text(const PercolationConfig& cfg);
PercolationConfig from_text(const std::string& text);
WindowPtr window_from_descriptor(const std::string& descriptor);

}  // namespace ffgrad
