#include <cmath>
#include <map>
#include <queue>

#include "doctest.h"
#include "ffgrad/percolation.hpp"
#include "ffgrad/rng.hpp"

using namespace ffgrad;

namespace {

// Independent flood fill over an explicit adjacency list.
std::vector<int> flood_labels(const PercolationConfig& cfg) {
  const Window& w = *cfg.window;
  std::vector<std::vector<int>> adj(w.num_nodes());
  for (int e = 0; e < w.num_edges(); ++e)
    if (cfg.open[e]) {
      adj[w.edge(e).u].push_back(w.edge(e).v);
      adj[w.edge(e).v].push_back(w.edge(e).u);
    }
  std::vector<int> lab(w.num_nodes(), -1);
  int next = 0;
  for (int s = 0; s < w.num_nodes(); ++s) {
    if (lab[s] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    lab[s] = next;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int u : adj[v])
        if (lab[u] < 0) {
          lab[u] = next;
          q.push(u);
        }
    }
    ++next;
  }
  return lab;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (size_t i = 0; i < a.size(); ++i) {
    auto [it1, new1] = ab.emplace(a[i], b[i]);
    auto [it2, new2] = ba.emplace(b[i], a[i]);
    if (it1->second != b[i] || it2->second != a[i]) return false;
  }
  return true;
}

int brute_diameter(const Window& w, const std::vector<int>& vs) {
  int d = 0;
  for (int a : vs)
    for (int b : vs) d = std::max(d, w.distance(a, b));
  return d;
}

}  // namespace

TEST_CASE("box window geometry") {
  auto w = Window::box({3, 2}, Shell::Wired);
  CHECK(w->num_vertices() == 6);
  CHECK(w->ghost() == 6);
  // 7 internal edges plus one shell edge per missing neighbour: 4*6 - 2*7 = 10.
  CHECK(w->num_edges() == 17);
  int shell = 0;
  for (int e = 0; e < w->num_edges(); ++e) shell += w->is_shell_edge(e);
  CHECK(shell == 10);
  auto f = Window::box({2, 2}, Shell::Free);
  CHECK(f->num_edges() == 4);
  CHECK(Window::box({2, 2}, Shell::Wired)->num_edges() == 12);
  auto cube = Window::box({3, 3, 3}, Shell::Free);
  CHECK(cube->num_edges() == 54);
}

TEST_CASE("components on empty and full configurations") {
  auto w = Window::box({5, 4}, Shell::Free);
  PercolationConfig closed(w, false);
  auto lab = components(closed);
  CHECK(lab.num_clusters() == 20);
  for (const auto& c : lab.clusters) CHECK(c.diameter == 0);
  PercolationConfig open(w, true);
  auto full = components(open);
  CHECK(full.num_clusters() == 1);
  CHECK(full.clusters[0].diameter == 7);
  CHECK(full.clusters[0].frontier_touching);
}

TEST_CASE("hand-built config with components of size 3 and 5") {
  auto w = Window::box({4, 4}, Shell::Free);
  PercolationConfig cfg(w, false);
  auto open_between = [&](Coord a, Coord b) { cfg.open[w->edge_between(w->index_of(a), w->index_of(b))] = 1; };
  open_between({0, 0}, {1, 0});
  open_between({1, 0}, {1, 1});
  open_between({3, 0}, {3, 1});
  open_between({3, 1}, {3, 2});
  open_between({3, 2}, {2, 2});
  open_between({2, 2}, {2, 3});
  auto lab = components(cfg);
  CHECK(same_partition(lab.label, flood_labels(cfg)));
  auto size_of = [&](Coord x) { return lab.clusters[lab.cluster_of(w->index_of(x))].vertices.size(); };
  CHECK(size_of({0, 0}) == 3);
  CHECK(size_of({2, 3}) == 5);
  CHECK(lab.num_clusters() == 16 - 2 - 4);
}

TEST_CASE("labeling matches flood fill on random 30x30 configurations") {
  for (Shell s : {Shell::Free, Shell::Wired}) {
    auto w = Window::box({30, 30}, s);
    for (int t = 0; t < 500; ++t) {
      auto cfg = bernoulli(w, 0.3 + 0.4 * (t % 5) / 4.0, derive_seed(99, t));
      auto lab = components(cfg);
      REQUIRE(same_partition(lab.label, flood_labels(cfg)));
      if (t % 50 == 0)
        for (const auto& c : lab.clusters) CHECK(c.diameter == brute_diameter(*w, c.vertices));
    }
  }
}

TEST_CASE("closed-form diameter equals the pairwise maximum in 3d and on sublattices") {
  auto w = Window::box({5, 4, 3}, Shell::Free);
  for (int t = 0; t < 50; ++t) {
    auto lab = components(bernoulli(w, 0.35, derive_seed(5, t)));
    for (const auto& c : lab.clusters) REQUIRE(c.diameter == brute_diameter(*w, c.vertices));
  }
  auto sub = Window::sublattice(diamond(Coord{0, 0}, 6), Parity::Odd);
  for (int t = 0; t < 50; ++t) {
    auto lab = components(bernoulli(sub, 0.5, derive_seed(6, t)));
    for (const auto& c : lab.clusters) REQUIRE(c.diameter == brute_diameter(*sub, c.vertices));
  }
}

TEST_CASE("frontier flags") {
  auto w = Window::box({4, 4}, Shell::Free);
  PercolationConfig cfg(w, false);
  auto lab = components(cfg);
  CHECK(lab.clusters[lab.cluster_of(w->index_of(Coord{0, 2}))].frontier_touching);
  CHECK_FALSE(lab.clusters[lab.cluster_of(w->index_of(Coord{1, 1}))].frontier_touching);
  auto ww = Window::box({4, 4}, Shell::Wired);
  auto wl = components(PercolationConfig(ww, false));
  CHECK(wl.frontier_clusters() == std::vector<int>{wl.ghost_cluster()});
  CHECK_FALSE(wl.clusters[wl.cluster_of(ww->index_of(Coord{0, 0}))].frontier_touching);
}

TEST_CASE("bernoulli extremes, determinism and concentration") {
  auto w = Window::box({8, 8}, Shell::Wired);
  CHECK(bernoulli(w, 0.0, 1).num_open() == 0);
  CHECK(bernoulli(w, 1.0, 1).num_open() == w->num_edges());
  CHECK(bernoulli(w, 0.4, 17).open == bernoulli(w, 0.4, 17).open);
  CHECK(bernoulli(w, 0.4, 17).open != bernoulli(w, 0.4, 18).open);
  CHECK_THROWS(bernoulli(w, 1.5, 1));

  auto big = Window::box({250, 250}, Shell::Free);
  auto cfg = bernoulli(big, 0.5, 3);
  double frac = double(cfg.num_open()) / big->num_edges();
  CHECK(big->num_edges() >= 100000);
  CHECK(std::abs(frac - 0.5) <= 3 * std::sqrt(0.25 / big->num_edges()));
}

TEST_CASE("opening an edge is monotone") {
  auto w = Window::box({10, 10}, Shell::Free);
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    auto cfg = bernoulli(w, 0.45, derive_seed(8, t));
    std::vector<int> closed;
    for (int e = 0; e < w->num_edges(); ++e)
      if (!cfg.open[e]) closed.push_back(e);
    if (closed.empty()) continue;
    auto before = components(cfg);
    cfg.open[closed[rng.below(closed.size())]] = 1;
    auto after = components(cfg);
    CHECK(after.num_clusters() <= before.num_clusters());
    for (int v = 0; v < w->num_vertices(); ++v)
      CHECK(after.clusters[after.cluster_of(v)].diameter >= before.clusters[before.cluster_of(v)].diameter);
  }
}

TEST_CASE("cluster_distance equals the pairwise minimum") {
  auto w = Window::box({4, 4}, Shell::Free);
  auto lab = components(PercolationConfig(w, false));
  int a = lab.cluster_of(w->index_of(Coord{1, 1}));
  int b = lab.cluster_of(w->index_of(Coord{1, 2}));
  CHECK(cluster_distance(a, a, lab) == 0);
  CHECK(cluster_distance(a, b, lab) == 1);

  auto big = Window::box({12, 12}, Shell::Free);
  for (int t = 0; t < 30; ++t) {
    auto l = components(bernoulli(big, 0.4, derive_seed(12, t)));
    for (int i = 0; i < l.num_clusters(); i += 7)
      for (int j = 0; j < l.num_clusters(); j += 5) {
        int want = 1 << 30;
        for (int u : l.clusters[i].vertices)
          for (int v : l.clusters[j].vertices) want = std::min(want, big->distance(u, v));
        REQUIRE(cluster_distance(i, j, l) == want);
      }
  }
}

TEST_CASE("text format round trip") {
  for (auto w : {Window::box({5, 3}, Shell::Wired), Window::box({4, 4}, Shell::Free),
                 Window::sublattice(diamond(Coord{0, 0}, 2), Parity::Odd)}) {
    auto cfg = bernoulli(w, 0.5, 21);
    auto back = from_text(to_text(cfg));
    CHECK(back.window->descriptor() == w->descriptor());
    CHECK(back.open == cfg.open);
  }
  CHECK_THROWS(from_text("percolation box free 2 2 4\n01\n"));
}
