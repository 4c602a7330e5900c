#include "ffgrad/percolation.hpp"

#include <algorithm>
#include <climits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ffgrad/rng.hpp"

namespace ffgrad {

const char* shell_name(Shell s) { return s == Shell::Wired ? "wired" : "free"; }

Shell parse_shell(const std::string& s) {
  if (s == "wired") return Shell::Wired;
  if (s == "free") return Shell::Free;
  throw std::invalid_argument("unknown boundary '" + s + "' (expected wired or free)");
}

namespace {

bool positive_offset(const Coord& o) {
  for (int i = 0; i < o.d; ++i) {
    if (o[i] > 0) return true;
    if (o[i] < 0) return false;
  }
  return false;
}

}  // namespace

std::shared_ptr<const Window> Window::from_vertices(std::vector<Coord> coords, std::vector<Coord> offsets,
                                                    Metric metric, Shell shell) {
  if (coords.empty()) throw std::invalid_argument("window needs at least one vertex");
  auto w = std::make_shared<Window>();
  w->dim_ = coords[0].dim();
  w->coords_ = std::move(coords);
  w->offsets_ = std::move(offsets);
  w->metric_ = metric;
  w->shell_ = shell;
  w->descriptor_ = "custom";

  w->lo_ = w->coords_[0];
  w->hi_ = w->coords_[0];
  for (const auto& x : w->coords_) {
    if (x.dim() != w->dim_) throw std::invalid_argument("mixed coordinate dimensions");
    for (int i = 0; i < w->dim_; ++i) {
      w->lo_[i] = std::min(w->lo_[i], x[i]);
      w->hi_[i] = std::max(w->hi_[i], x[i]);
    }
  }
  size_t cells = 1;
  for (int i = 0; i < w->dim_; ++i) cells *= static_cast<size_t>(w->hi_[i] - w->lo_[i] + 1);
  w->lookup_.assign(cells, -1);
  for (int v = 0; v < w->num_vertices(); ++v) {
    size_t idx = 0;
    for (int i = w->dim_ - 1; i >= 0; --i)
      idx = idx * static_cast<size_t>(w->hi_[i] - w->lo_[i] + 1) + static_cast<size_t>(w->coords_[v][i] - w->lo_[i]);
    if (w->lookup_[idx] != -1) throw std::invalid_argument("duplicate window vertex " + w->coords_[v].str());
    w->lookup_[idx] = v;
  }

  const int n = w->num_vertices();
  w->outside_deg_.assign(n, 0);
  w->nbr_off_.assign(n + 1, 0);
  std::vector<std::vector<int>> nbrs(n);
  for (int v = 0; v < n; ++v) {
    for (const auto& o : w->offsets_) {
      int u = w->index_of(w->coords_[v] + o);
      if (u < 0)
        ++w->outside_deg_[v];
      else
        nbrs[v].push_back(u);
    }
  }
  for (int v = 0; v < n; ++v) {
    w->nbr_off_[v + 1] = w->nbr_off_[v] + static_cast<int>(nbrs[v].size());
    w->nbr_idx_.insert(w->nbr_idx_.end(), nbrs[v].begin(), nbrs[v].end());
  }

  for (int v = 0; v < n; ++v)
    for (const auto& o : w->offsets_) {
      if (!positive_offset(o)) continue;
      int u = w->index_of(w->coords_[v] + o);
      if (u >= 0) w->edges_.push_back({v, u});
    }
  if (shell == Shell::Wired)
    for (int v = 0; v < n; ++v)
      for (int k = 0; k < w->outside_deg_[v]; ++k) w->edges_.push_back({v, n});

  const int nodes = w->num_nodes();
  std::vector<int> deg(nodes, 0);
  for (const auto& e : w->edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  w->inc_off_.assign(nodes + 1, 0);
  for (int v = 0; v < nodes; ++v) w->inc_off_[v + 1] = w->inc_off_[v] + deg[v];
  w->inc_idx_.assign(w->inc_off_[nodes], 0);
  std::vector<int> fill(w->inc_off_.begin(), w->inc_off_.end() - 1);
  for (int e = 0; e < w->num_edges(); ++e) {
    w->inc_idx_[fill[w->edges_[e].u]++] = e;
    w->inc_idx_[fill[w->edges_[e].v]++] = e;
  }
  return w;
}

std::shared_ptr<const Window> Window::box(const std::vector<int>& extents, Shell shell) {
  const int d = static_cast<int>(extents.size());
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("box dimension out of range");
  size_t total = 1;
  for (int L : extents) {
    if (L < 1) throw std::invalid_argument("box extents must be positive");
    total *= static_cast<size_t>(L);
  }
  std::vector<Coord> coords;
  coords.reserve(total);
  Coord x = Coord::zeros(d);
  for (size_t k = 0; k < total; ++k) {
    coords.push_back(x);
    for (int i = 0; i < d; ++i) {
      if (++x[i] < extents[i]) break;
      x[i] = 0;
    }
  }
  std::vector<Coord> offsets;
  for (int i = 0; i < d; ++i) {
    Coord o = Coord::zeros(d);
    o[i] = 1;
    offsets.push_back(o);
    o[i] = -1;
    offsets.push_back(o);
  }
  auto w = from_vertices(std::move(coords), std::move(offsets), Metric::L1, shell);
  std::ostringstream os;
  os << "box " << shell_name(shell);
  for (int L : extents) os << ' ' << L;
  std::const_pointer_cast<Window>(w)->descriptor_ = os.str();
  return w;
}

std::shared_ptr<const Window> Window::sublattice(const DiamondDomain& dom, Parity which) {
  std::vector<Coord> coords;
  const int reach = which == Parity::Even ? dom.n : dom.n + 1;
  for (const auto& f : faces_within(dom.center, reach))
    if (parity(f) == which) coords.push_back(f);
  std::vector<Coord> offsets = {Coord{1, 1}, Coord{1, -1}, Coord{-1, 1}, Coord{-1, -1}};
  auto w = from_vertices(std::move(coords), std::move(offsets), Metric::Chebyshev, Shell::Wired);
  std::ostringstream os;
  os << "diamond " << (which == Parity::Even ? "even" : "odd") << ' ' << dom.center[0] << ' ' << dom.center[1] << ' '
     << dom.n;
  std::const_pointer_cast<Window>(w)->descriptor_ = os.str();
  return w;
}

int Window::index_of(const Coord& x) const {
  if (x.dim() != dim_) return -1;
  size_t idx = 0;
  for (int i = dim_ - 1; i >= 0; --i) {
    if (x[i] < lo_[i] || x[i] > hi_[i]) return -1;
    idx = idx * static_cast<size_t>(hi_[i] - lo_[i] + 1) + static_cast<size_t>(x[i] - lo_[i]);
  }
  return lookup_[idx];
}

int Window::distance(const Coord& a, const Coord& b) const {
  return metric_ == Metric::L1 ? l1_distance(a, b) : chebyshev_distance(a, b);
}

int Window::distance(int a, int b) const { return distance(coords_[a], coords_[b]); }

int Window::edge_between(int a, int b) const {
  for (const int* it = incident_begin(a); it != incident_end(a); ++it)
    if (other(*it, a) == b) return *it;
  return -1;
}

int Window::diameter(const std::vector<int>& vertices) const {
  if (vertices.size() <= 1) return 0;
  int best = 0;
  if (metric_ == Metric::Chebyshev) {
    for (int i = 0; i < dim_; ++i) {
      int mn = INT_MAX, mx = INT_MIN;
      for (int v : vertices) {
        mn = std::min(mn, coords_[v][i]);
        mx = std::max(mx, coords_[v][i]);
      }
      best = std::max(best, mx - mn);
    }
    return best;
  }
  // L1 diameter is the largest spread of s.x over sign vectors s with s_0 = +1.
  for (int mask = 0; mask < (1 << (dim_ - 1)); ++mask) {
    int mn = INT_MAX, mx = INT_MIN;
    for (int v : vertices) {
      int s = coords_[v][0];
      for (int i = 1; i < dim_; ++i) s += ((mask >> (i - 1)) & 1) ? -coords_[v][i] : coords_[v][i];
      mn = std::min(mn, s);
      mx = std::max(mx, s);
    }
    best = std::max(best, mx - mn);
  }
  return best;
}

PercolationConfig::PercolationConfig(WindowPtr w, bool all_open)
    : window(std::move(w)), open(window->num_edges(), all_open ? 1 : 0) {}

int PercolationConfig::num_open() const { return static_cast<int>(std::count(open.begin(), open.end(), 1)); }

int ClusterLabeling::ghost_cluster() const {
  int g = window().ghost();
  return g < 0 ? -1 : label[g];
}

std::vector<int> ClusterLabeling::frontier_clusters() const {
  std::vector<int> out;
  for (int c = 0; c < num_clusters(); ++c)
    if (clusters[c].frontier_touching) out.push_back(c);
  return out;
}

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

ClusterLabeling components(const PercolationConfig& cfg) {
  const Window& w = *cfg.window;
  const int nodes = w.num_nodes();
  DisjointSets ds(nodes);
  for (int e = 0; e < w.num_edges(); ++e)
    if (cfg.open[e]) ds.unite(w.edge(e).u, w.edge(e).v);

  ClusterLabeling out;
  out.config = cfg;
  out.label.assign(nodes, -1);
  std::vector<int> id_of_root(nodes, -1);
  for (int v = 0; v < nodes; ++v) {
    int r = ds.find(v);
    if (id_of_root[r] < 0) {
      id_of_root[r] = out.num_clusters();
      out.clusters.emplace_back();
    }
    int c = id_of_root[r];
    out.label[v] = c;
    if (v == w.ghost()) {
      out.clusters[c].contains_ghost = true;
    } else {
      out.clusters[c].vertices.push_back(v);
    }
  }
  for (auto& rec : out.clusters) {
    rec.diameter = w.diameter(rec.vertices);
    if (w.wired()) {
      rec.frontier_touching = rec.contains_ghost;
    } else {
      for (int v : rec.vertices)
        if (w.on_border(v)) {
          rec.frontier_touching = true;
          break;
        }
    }
  }
  return out;
}

PercolationConfig bernoulli(WindowPtr window, double p, uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli: p must lie in [0,1]");
  PercolationConfig cfg(std::move(window), false);
  Rng rng(seed);
  for (auto& s : cfg.open) s = rng.uniform() < p ? 1 : 0;
  return cfg;
}

int cluster_distance(int a, int b, const ClusterLabeling& labeling) {
  if (a < 0 || b < 0 || a >= labeling.num_clusters() || b >= labeling.num_clusters())
    throw std::invalid_argument("cluster_distance: invalid cluster id");
  if (a == b) return 0;
  const Window& w = labeling.window();
  const auto& src = labeling.clusters[a].vertices;
  if (src.empty() || labeling.clusters[b].vertices.empty())
    throw std::invalid_argument("cluster_distance: cluster without window vertices");
  std::vector<int> dist(w.num_vertices(), -1);
  std::vector<int> queue(src.begin(), src.end());
  for (int v : src) dist[v] = 0;
  for (size_t head = 0; head < queue.size(); ++head) {
    int v = queue[head];
    if (labeling.label[v] == b) return dist[v];
    for (const int* it = w.nbr_begin(v); it != w.nbr_end(v); ++it)
      if (dist[*it] < 0) {
        dist[*it] = dist[v] + 1;
        queue.push_back(*it);
      }
  }
  throw std::logic_error("cluster_distance: clusters are not connected in the window geometry");
}

std::string to_text(const PercolationConfig& cfg) {
  const Window& w = *cfg.window;
  std::ostringstream os;
  os << "percolation " << w.descriptor() << ' ' << w.num_edges() << '\n';
  int row = INT_MIN;
  bool shell_started = false;
  for (int e = 0; e < w.num_edges(); ++e) {
    if (w.is_shell_edge(e)) {
      if (!shell_started) {
        os << "\nshell ";
        shell_started = true;
      }
    } else {
      int r = w.coord(w.edge(e).u)[w.dim() - 1];
      if (r != row) {
        if (row != INT_MIN) os << '\n';
        row = r;
      }
    }
    os << (cfg.open[e] ? '1' : '0');
  }
  os << '\n';
  return os.str();
}

WindowPtr window_from_descriptor(const std::string& descriptor) {
  std::istringstream is(descriptor);
  std::string kind;
  is >> kind;
  if (kind == "box") {
    std::string shell;
    is >> shell;
    std::vector<int> ext;
    int L;
    while (is >> L) ext.push_back(L);
    return Window::box(ext, parse_shell(shell));
  }
  if (kind == "diamond") {
    std::string par;
    int cx, cy, n;
    is >> par >> cx >> cy >> n;
    return Window::sublattice(diamond(Coord{cx, cy}, n), par == "even" ? Parity::Even : Parity::Odd);
  }
  throw std::invalid_argument("unknown window descriptor: " + descriptor);
}

PercolationConfig from_text(const std::string& text) {
  std::istringstream is(text);
  std::string header;
  std::getline(is, header);
  const std::string tag = "percolation ";
  if (header.rfind(tag, 0) != 0) throw std::invalid_argument("missing percolation header");
  std::string rest = header.substr(tag.size());
  auto cut = rest.find_last_of(' ');
  int expected = std::stoi(rest.substr(cut + 1));
  WindowPtr w = window_from_descriptor(rest.substr(0, cut));
  if (w->num_edges() != expected) throw std::invalid_argument("edge count does not match the window");
  PercolationConfig cfg(w, false);
  int e = 0;
  std::string token;
  while (is >> token) {
    if (token == "shell") continue;
    for (char ch : token) {
      if (ch != '0' && ch != '1') throw std::invalid_argument("bad edge character");
      if (e >= expected) throw std::invalid_argument("too many edge characters");
      cfg.open[e++] = ch == '1';
    }
  }
  if (e != expected) throw std::invalid_argument("too few edge characters");
  return cfg;
}

}  // namespace ffgrad
