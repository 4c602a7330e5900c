#include <algorithm>
#include <climits>

#include "doctest.h"
#include "ffgrad/cluster_tree.hpp"
#include "ffgrad/rng.hpp"

using namespace ffgrad;

namespace {

struct Builder {
  WindowPtr w;
  PercolationConfig cfg;
  explicit Builder(WindowPtr win, bool all_open = false) : w(win), cfg(win, all_open) {}
  int at(int x, int y) const { return w->index_of(Coord{x, y}); }
  void set(int x0, int y0, int x1, int y1, bool open) {
    int e = w->edge_between(at(x0, y0), at(x1, y1));
    REQUIRE(e >= 0);
    cfg.open[e] = open;
  }
  void path_x(int x0, int x1, int y) {
    for (int x = x0; x < x1; ++x) set(x, y, x + 1, y, true);
  }
  void isolate(int x, int y) {
    int v = at(x, y);
    for (const int* it = w->incident_begin(v); it != w->incident_end(v); ++it) cfg.open[*it] = 0;
  }
};

// V_i(C) straight from the definition on a wired box with full knowledge:
// the root is infinite and wins whenever the ball meets it or leaves the box.
Candidate brute_candidate(const ClusterLabeling& lab, const std::vector<int>& extents, int C, int i) {
  const Window& w = lab.window();
  const auto& cv = lab.clusters[C].vertices;
  Candidate out;
  int root = lab.ghost_cluster();
  bool root_hit = C == root;
  for (int c : cv)
    for (int j = 0; j < w.dim(); ++j) {
      int to_outside = std::min(w.coord(c)[j] + 1, extents[j] - w.coord(c)[j]);
      if (to_outside <= i) root_hit = true;
    }
  std::vector<int> hit;
  for (int x = 0; x < w.num_vertices(); ++x) {
    int d = INT_MAX;
    for (int c : cv) d = std::min(d, w.distance(x, c));
    if (d <= i) hit.push_back(lab.cluster_of(x));
  }
  for (int c : hit)
    if (c == root) root_hit = true;
  if (root_hit) {
    out.kind = Candidate::Found;
    out.ref.cluster = root;
    out.ref.root = true;
    return out;
  }
  std::sort(hit.begin(), hit.end());
  hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
  int best = -1, count = 0, arg = -1;
  for (int c : hit) {
    int d = lab.clusters[c].diameter;
    if (d > best) {
      best = d;
      count = 1;
      arg = c;
    } else if (d == best) {
      ++count;
    }
  }
  out.kind = count == 1 ? Candidate::Found : Candidate::Tie;
  if (count == 1) out.ref.cluster = arg;
  return out;
}

int brute_parent(const ClusterLabeling& lab, const std::vector<int>& extents, int C, int& k_out) {
  int dC = lab.clusters[C].diameter;
  for (int k = std::max(5 * dC, 1);; ++k) {
    Candidate c = brute_candidate(lab, extents, C, k);
    if (c.kind != Candidate::Found) continue;
    if (c.ref.root || lab.clusters[c.ref.cluster].diameter >= k) {
      k_out = k;
      return c.ref.cluster;
    }
  }
}

std::pair<int, int> textbook_lca(const ClusterTree& t, int a, int b) {
  int na = 0, nb = 0;
  while (t.depth[a] > t.depth[b]) a = t.parent[a], ++na;
  while (t.depth[b] > t.depth[a]) b = t.parent[b], ++nb;
  while (a != b) a = t.parent[a], b = t.parent[b], ++na, ++nb;
  return {na, nb};
}

}  // namespace

TEST_CASE("candidate examples") {
  SUBCASE("C is its own candidate when nothing larger is near") {
    Builder b(Window::box({9, 9}, Shell::Wired));
    for (int y = 3; y <= 5; ++y) b.path_x(3, 5, y);
    for (int x = 3; x <= 5; ++x) {
      b.set(x, 3, x, 4, true);
      b.set(x, 4, x, 5, true);
    }
    auto lab = components(b.cfg);
    int C = lab.cluster_of(b.at(4, 4));
    CHECK(lab.clusters[C].diameter == 4);
    for (int i : {0, 1, 2}) {
      auto c = candidate(lab, C, i);
      CHECK(c.kind == Candidate::Found);
      CHECK(c.ref.cluster == C);
    }
  }
  SUBCASE("two enclosed clusters of diameter 4 tie") {
    Builder b(Window::box({21, 21}, Shell::Wired));
    b.path_x(6, 10, 10);
    b.path_x(6, 10, 12);
    auto lab = components(b.cfg);
    int C = lab.cluster_of(b.at(8, 11));
    auto c = candidate(lab, C, 1);
    CHECK(c.kind == Candidate::Tie);
  }
  SUBCASE("singleton next to a path of diameter 5") {
    Builder b(Window::box({21, 21}, Shell::Wired));
    b.path_x(6, 11, 11);
    auto lab = components(b.cfg);
    int C = lab.cluster_of(b.at(8, 10));
    auto c = candidate(lab, C, 1);
    REQUIRE(c.kind == Candidate::Found);
    CHECK(c.ref.cluster == lab.cluster_of(b.at(6, 11)));
    CHECK(lab.clusters[c.ref.cluster].diameter == 5);
  }
  CHECK_THROWS(candidate(components(PercolationConfig(Window::box({3, 3}, Shell::Free), false)), 99, 0));
}

TEST_CASE("parent examples") {
  SUBCASE("singleton with a diameter-10 path at distance 2") {
    Builder b(Window::box({31, 31}, Shell::Wired));
    b.path_x(10, 20, 17);
    auto lab = components(b.cfg);
    int C = lab.cluster_of(b.at(15, 15));
    auto p = parent(lab, C);
    REQUIRE(p.determined());
    CHECK(p.value.k == 2);
    CHECK(p.value.parent.cluster == lab.cluster_of(b.at(10, 17)));
  }
  SUBCASE("diameter-1 cluster with a diameter-10 cluster at distance 3") {
    Builder b(Window::box({41, 41}, Shell::Wired));
    b.set(20, 20, 21, 20, true);
    b.path_x(15, 25, 23);
    auto lab = components(b.cfg);
    int C = lab.cluster_of(b.at(20, 20));
    auto p = parent(lab, C);
    REQUIRE(p.determined());
    CHECK(p.value.k == 5);
    CHECK(p.value.parent.cluster == lab.cluster_of(b.at(15, 23)));
  }
  SUBCASE("surrounded by the frontier cluster") {
    Builder b(Window::box({41, 41}, Shell::Wired), true);
    b.isolate(20, 20);
    auto lab = components(b.cfg);
    auto p = parent(lab, lab.cluster_of(b.at(20, 20)));
    REQUIRE(p.determined());
    CHECK(p.value.k == 1);
    CHECK(p.value.parent.cluster == lab.ghost_cluster());
    CHECK(p.witness_radius <= 4);
  }
  SUBCASE("root and free frontier clusters have no certified parent") {
    Builder b(Window::box({5, 5}, Shell::Free));
    auto lab = components(b.cfg);
    CHECK_FALSE(parent(lab, lab.cluster_of(b.at(0, 0))).determined());
    auto wl = components(PercolationConfig(Window::box({5, 5}, Shell::Wired), true));
    CHECK_FALSE(parent(wl, wl.ghost_cluster()).determined());
  }
}

TEST_CASE("candidate and parent agree with the brute-force rule") {
  std::vector<int> ext = {14, 14};
  auto w = Window::box(ext, Shell::Wired);
  for (int t = 0; t < 60; ++t) {
    auto lab = components(bernoulli(w, 0.3 + 0.05 * (t % 8), derive_seed(41, t)));
    auto tree = build_tree(lab);
    for (int C = 0; C < lab.num_clusters(); ++C) {
      if (C == lab.ghost_cluster()) continue;
      for (int i : {0, 1, 2, 3, 5, 8}) {
        Candidate got = candidate(lab, C, i);
        Candidate want = brute_candidate(lab, ext, C, i);
        REQUIRE(got.kind == want.kind);
        if (want.kind == Candidate::Found) REQUIRE(got.ref.cluster == want.ref.cluster);
      }
      int k = 0;
      int want = brute_parent(lab, ext, C, k);
      REQUIRE(tree.parent[C] == want);
      REQUIRE(tree.level[C] == k);
      auto p = parent(lab, C);
      REQUIRE(p.determined());
      CHECK(p.value.parent.cluster == want);
      CHECK(p.value.k == k);
    }
  }
}

TEST_CASE("build_tree examples") {
  SUBCASE("one finite cluster") {
    Builder b(Window::box({5, 5}, Shell::Wired), true);
    b.isolate(2, 2);
    auto lab = components(b.cfg);
    REQUIRE(lab.num_clusters() == 2);
    auto t = build_tree(lab);
    int c = lab.cluster_of(b.at(2, 2));
    CHECK(t.parent[c] == t.root);
    CHECK(t.parent[t.root] == -1);
    CHECK(t.depth[c] == 1);
  }
  SUBCASE("chain A -> B -> root") {
    Builder b(Window::box({41, 41}, Shell::Wired));
    b.path_x(15, 20, 22);
    auto lab = components(b.cfg);
    int A = lab.cluster_of(b.at(17, 20));
    int B = lab.cluster_of(b.at(15, 22));
    auto t = build_tree(lab);
    CHECK(t.parent[A] == B);
    CHECK(t.level[A] == 2);
    CHECK(t.parent[B] == lab.ghost_cluster());
    CHECK(t.level[B] == 25);
  }
  SUBCASE("free windows need a unique frontier cluster or a designation") {
    Builder b(Window::box({6, 6}, Shell::Free));
    auto lab = components(b.cfg);
    CHECK_THROWS(build_tree(lab));
    int r = lab.cluster_of(b.at(0, 0));
    auto t = build_tree(lab, r);
    CHECK(t.root == r);
    for (int c = 0; c < lab.num_clusters(); ++c)
      if (c != r) CHECK(t.depth[c] >= 1);
  }
}

TEST_CASE("tree invariants on random configurations") {
  for (Shell s : {Shell::Wired, Shell::Free}) {
    auto w = Window::box({20, 20}, s);
    for (int t = 0; t < 40; ++t) {
      auto cfg = bernoulli(w, 0.4 + 0.1 * (t % 4), derive_seed(77, t));
      if (s == Shell::Free)
        for (int e = 0; e < w->num_edges(); ++e)
          if (w->on_border(w->edge(e).u) && w->on_border(w->edge(e).v)) cfg.open[e] = 1;
      auto lab = components(cfg);
      auto tree = build_tree(lab);
      for (int c = 0; c < lab.num_clusters(); ++c) {
        if (c == tree.root) continue;
        CHECK(tree.depth[c] >= 1);
        int p = tree.parent[c];
        if (p != tree.root) CHECK(lab.clusters[p].diameter > lab.clusters[c].diameter);
      }
    }
  }
}

TEST_CASE("lca_paths examples") {
  Builder b(Window::box({41, 41}, Shell::Wired));
  b.path_x(15, 20, 22);
  auto lab = components(b.cfg);
  SUBCASE("same cluster") {
    auto r = lca_paths(lab, b.at(15, 22), b.at(18, 22));
    REQUIRE(r.determined());
    CHECK(r.value.n_uv == 0);
    CHECK(r.value.n_vu == 0);
    CHECK(r.value.path_u.empty());
    CHECK(r.witness_radius == 1);
    auto adj = lca_paths(lab, b.at(15, 22), b.at(16, 22));
    REQUIRE(adj.determined());
    CHECK(adj.witness_radius == 0);
  }
  SUBCASE("v in the parent of C_u") {
    auto r = lca_paths(lab, b.at(17, 20), b.at(17, 22));
    REQUIRE(r.determined());
    CHECK(r.value.n_uv == 1);
    CHECK(r.value.n_vu == 0);
    CHECK(r.value.path_u == std::vector<int>{lab.cluster_of(b.at(17, 20))});
    CHECK(r.value.ancestor.cluster == lab.cluster_of(b.at(15, 22)));
  }
  SUBCASE("siblings meet at B") {
    auto r = lca_paths(lab, b.at(17, 20), b.at(16, 21));
    REQUIRE(r.determined());
    CHECK(r.value.n_uv == 1);
    CHECK(r.value.n_vu == 1);
  }
}

TEST_CASE("lca_paths agrees with the offline tree") {
  auto w = Window::box({24, 24}, Shell::Wired);
  Rng rng(5);
  int determined = 0, total = 0;
  for (int t = 0; t < 80; ++t) {
    auto lab = components(bernoulli(w, 0.45 + 0.05 * (t % 6), derive_seed(90, t)));
    auto tree = build_tree(lab);
    for (int q = 0; q < 20; ++q) {
      int u = int(rng.below(w->num_vertices()));
      const int* nb = w->nbr_begin(u);
      int v = nb[rng.below(w->nbr_end(u) - nb)];
      if (q % 4 == 0) v = int(rng.below(w->num_vertices()));
      auto r = lca_paths(lab, u, v);
      ++total;
      REQUIRE(r.determined());
      ++determined;
      auto [na, nb2] = textbook_lca(tree, lab.cluster_of(u), lab.cluster_of(v));
      CHECK(r.value.n_uv == na);
      CHECK(r.value.n_vu == nb2);
      int x = lab.cluster_of(u);
      for (int i = 0; i < na; ++i) {
        CHECK(r.value.path_u[i] == x);
        x = tree.parent[x];
      }
    }
  }
  CHECK(determined == total);
}

TEST_CASE("determined results survive perturbation outside the witness") {
  auto w = Window::box({30, 30}, Shell::Wired);
  Rng rng(8);
  int fired = 0, checked = 0;
  for (int t = 0; t < 40; ++t) {
    auto cfg = bernoulli(w, 0.55 + 0.05 * (t % 4), derive_seed(123, t));
    auto lab = components(cfg);
    for (int q = 0; q < 5; ++q) {
      int u = int(rng.below(w->num_vertices()));
      int v = *(w->nbr_begin(u));
      auto r = lca_paths(lab, u, v);
      if (!r.determined()) continue;
      auto eval = [&](const PercolationConfig& c) {
        auto l = components(c);
        auto rr = lca_paths(l, u, v);
        return rr.determined() ? lca_key(l, rr.value) : std::string("undetermined");
      };
      auto rep = witness_perturb_test(cfg, {u, v}, r.witness_radius, eval, 25, derive_seed(t, q));
      CHECK(rep.pass());
      ++checked;
      if (r.witness_radius >= 1) {
        auto neg = witness_perturb_test(cfg, {u, v}, r.witness_radius, eval, 10, derive_seed(q, t),
                                        PerturbRegion::Inside);
        fired += neg.mismatches;
      }
    }
  }
  CHECK(checked > 100);
  CHECK(fired > 0);

  Builder b(Window::box({6, 6}, Shell::Wired));
  auto lab = components(b.cfg);
  auto eval = [&](const PercolationConfig& c) { return lca_key(components(c), lca_paths(components(c), 0, 1).value); };
  CHECK(witness_perturb_test(b.cfg, {0, 1}, kWholeWindow, eval, 5, 1).pass());
}

TEST_CASE("translation equivariance") {
  auto a = Window::box({20, 20}, Shell::Wired);
  std::vector<Coord> coords;
  for (int v = 0; v < a->num_vertices(); ++v) coords.push_back(a->coord(v) + Coord{7, -3});
  auto b = Window::from_vertices(coords, a->offsets(), Metric::L1, Shell::Wired);
  REQUIRE(b->num_edges() == a->num_edges());
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    auto ca = bernoulli(a, 0.6, derive_seed(55, t));
    // Same vertex order and offsets give the same edge ids.
    PercolationConfig cb(b, false);
    for (int e = 0; e < a->num_edges(); ++e) {
      const Edge& ea = a->edge(e);
      const Edge& eb = b->edge(e);
      REQUIRE(b->coord(eb.u) == a->coord(ea.u) + Coord{7, -3});
      REQUIRE((ea.v == a->ghost()) == (eb.v == b->ghost()));
      cb.open[e] = ca.open[e];
    }
    auto la = components(ca), lb = components(cb);
    auto ta = build_tree(la), tb = build_tree(lb);
    for (int c = 0; c < la.num_clusters(); ++c) {
      if (c == ta.root) continue;
      int cb_id = lb.cluster_of(b->index_of(a->coord(la.clusters[c].vertices[0]) + Coord{7, -3}));
      int pa = ta.parent[c];
      int pb = tb.parent[cb_id];
      if (pa == ta.root) {
        CHECK(pb == tb.root);
      } else {
        CHECK(b->coord(lb.clusters[pb].vertices[0]) == a->coord(la.clusters[pa].vertices[0]) + Coord{7, -3});
      }
    }
    for (int q = 0; q < 10; ++q) {
      int u = int(rng.below(a->num_vertices()));
      int v = *(a->nbr_begin(u));
      auto ra = lca_paths(la, u, v);
      auto rb = lca_paths(lb, b->index_of(a->coord(u) + Coord{7, -3}), b->index_of(a->coord(v) + Coord{7, -3}));
      REQUIRE(ra.determined() == rb.determined());
      CHECK(ra.witness_radius == rb.witness_radius);
      CHECK(ra.value.n_uv == rb.value.n_uv);
      CHECK(ra.value.n_vu == rb.value.n_vu);
    }
  }
}
