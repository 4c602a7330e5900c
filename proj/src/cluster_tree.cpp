#include "ffgrad/cluster_tree.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ffgrad/rng.hpp"

namespace ffgrad {

namespace {

enum class Mode { Certify, Offline };
enum class PieceStatus { Root, Open, Enclosed };

struct Piece {
  std::vector<int> vertices;
  int rep = -1;
  bool has_ghost = false;
  PieceStatus status = PieceStatus::Enclosed;
  int diam = -1;
};

struct ParentStep {
  bool known = false;
  int piece = -1;
  int k = 0;
};

class View;

// Geometric ball around a piece, grown one layer at a time. Vertices outside
// the known set are recorded but never expanded.
class Ball {
 public:
  Ball(const View& view, int piece);
  void extend_to(int k);
  Candidate::Kind evaluate(int k, int& found_piece);

 private:
  void absorb(int v);

  const View& view_;
  std::vector<int> dist_;
  std::vector<int> layer_;
  int radius_ = 0;
  bool saturated_ = false;
  int outside_at_ = INT_MAX;  // least d with a border vertex at distance d
  bool unknown_ = false;
  bool root_touch_ = false;
  std::vector<int> open_;
  int max_enc_ = -1;
  int max_enc_count_ = 0;
  int max_enc_piece_ = -1;
  std::vector<uint8_t> piece_seen_;
};

class View {
 public:
  View(const ClusterLabeling& lab, std::vector<uint8_t> in_s, Mode mode, int root_cluster)
      : lab_(lab), w_(lab.window()), in_s_(std::move(in_s)), mode_(mode), root_cluster_(root_cluster) {
    const int nv = w_.num_vertices();
    const int nodes = w_.num_nodes();
    std::vector<int> parent(nodes);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (int e = 0; e < w_.num_edges(); ++e) {
      const Edge& ed = w_.edge(e);
      if (!lab.config.open[e] || !known(ed.u) || !known(ed.v)) continue;
      int a = find(ed.u), b = find(ed.v);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    piece_of_.assign(nodes, -1);
    std::vector<int> id(nodes, -1);
    for (int v = 0; v < nodes; ++v) {
      if (!known(v)) continue;
      int r = find(v);
      if (id[r] < 0) {
        id[r] = static_cast<int>(pieces_.size());
        pieces_.emplace_back();
      }
      Piece& p = pieces_[id[r]];
      piece_of_[v] = id[r];
      if (v == w_.ghost()) {
        p.has_ghost = true;
      } else {
        if (p.rep < 0) p.rep = v;
        p.vertices.push_back(v);
      }
    }
    for (auto& p : pieces_) {
      if (p.has_ghost) {
        p.status = PieceStatus::Root;
      } else if (mode_ == Mode::Offline) {
        p.status = lab.label[p.rep] == root_cluster_ ? PieceStatus::Root : PieceStatus::Enclosed;
      } else {
        p.status = PieceStatus::Enclosed;
        for (int v : p.vertices) {
          bool frontier = !w_.wired() && w_.on_border(v);
          for (const int* it = w_.nbr_begin(v); !frontier && it != w_.nbr_end(v); ++it) frontier = !in_s_[*it];
          if (frontier) {
            p.status = PieceStatus::Open;
            break;
          }
        }
      }
      if (p.status == PieceStatus::Root) p.diam = INT_MAX;
    }
    (void)nv;
    parent_memo_.assign(pieces_.size(), ParentStep{});
    parent_done_.assign(pieces_.size(), 0);
  }

  bool known(int v) const { return v == w_.ghost() || in_s_[v]; }
  const Window& window() const { return w_; }
  Mode mode() const { return mode_; }
  int num_pieces() const { return static_cast<int>(pieces_.size()); }
  int piece_of(int v) const { return piece_of_[v]; }
  const Piece& piece(int p) const { return pieces_[p]; }
  PieceStatus status(int p) const { return pieces_[p].status; }

  int diam(int p) const {
    Piece& pc = const_cast<Piece&>(pieces_[p]);
    if (pc.diam < 0) pc.diam = w_.diameter(pc.vertices);
    return pc.diam;
  }

  ClusterRef ref(int p) const {
    const Piece& pc = pieces_[p];
    ClusterRef r;
    if (pc.status == PieceStatus::Root) {
      r.root = true;
      r.cluster = pc.has_ghost ? lab_.label[w_.ghost()] : root_cluster_;
    } else {
      r.rep = pc.rep;
      r.cluster = lab_.label[pc.rep];
    }
    return r;
  }

  // Scans k upward from max(5 diam, 1) as in the parent rule.
  ParentStep parent(int p) {
    if (parent_done_[p]) return parent_memo_[p];
    ParentStep out;
    Ball ball(*this, p);
    const int k0 = std::max(5 * diam(p), 1);
    int stalled = 0;
    for (int k = k0;; ++k) {
      ball.extend_to(k);
      int x = -1;
      Candidate::Kind kind = ball.evaluate(k, x);
      if (kind == Candidate::Unknown) break;
      if (kind == Candidate::Found) {
        if (status(x) != PieceStatus::Enclosed || diam(x) >= k) {
          out = {true, x, k};
          break;
        }
      }
      // Once the ball stops growing the outcome can no longer change.
      if (++stalled > w_.num_vertices() + 2 * k0 + 8) throw std::logic_error("parent scan did not terminate");
    }
    parent_done_[p] = 1;
    parent_memo_[p] = out;
    return out;
  }

 private:
  friend class Ball;
  const ClusterLabeling& lab_;
  const Window& w_;
  std::vector<uint8_t> in_s_;
  Mode mode_;
  int root_cluster_;
  std::vector<int> piece_of_;
  std::vector<Piece> pieces_;
  std::vector<ParentStep> parent_memo_;
  std::vector<uint8_t> parent_done_;
};

Ball::Ball(const View& view, int piece) : view_(view) {
  dist_.assign(view.window().num_vertices(), -1);
  piece_seen_.assign(view.num_pieces(), 0);
  for (int v : view.piece(piece).vertices) {
    dist_[v] = 0;
    layer_.push_back(v);
    absorb(v);
  }
  if (view.piece(piece).has_ghost) root_touch_ = true;
}

void Ball::absorb(int v) {
  const Window& w = view_.window();
  if (!view_.known(v)) {
    unknown_ = true;
    return;
  }
  if (w.on_border(v)) outside_at_ = std::min(outside_at_, dist_[v]);
  int p = view_.piece_of(v);
  if (piece_seen_[p]) return;
  piece_seen_[p] = 1;
  switch (view_.status(p)) {
    case PieceStatus::Root:
      root_touch_ = true;
      break;
    case PieceStatus::Open:
      open_.push_back(p);
      break;
    case PieceStatus::Enclosed: {
      int d = view_.diam(p);
      if (d > max_enc_) {
        max_enc_ = d;
        max_enc_count_ = 1;
        max_enc_piece_ = p;
      } else if (d == max_enc_) {
        ++max_enc_count_;
      }
      break;
    }
  }
}

void Ball::extend_to(int k) {
  const Window& w = view_.window();
  while (radius_ < k && !saturated_) {
    std::vector<int> next;
    for (int v : layer_) {
      if (!view_.known(v)) continue;
      for (const int* it = w.nbr_begin(v); it != w.nbr_end(v); ++it)
        if (dist_[*it] < 0) {
          dist_[*it] = radius_ + 1;
          next.push_back(*it);
        }
    }
    ++radius_;
    for (int v : next) absorb(v);
    if (next.empty()) saturated_ = true;
    layer_.swap(next);
  }
  if (radius_ < k) radius_ = k;
}

Candidate::Kind Ball::evaluate(int k, int& found_piece) {
  const Window& w = view_.window();
  const bool reaches_outside = outside_at_ != INT_MAX && outside_at_ + 1 <= k;
  // Only the root is infinite, so touching it decides the level outright.
  if (root_touch_ || (w.wired() && reaches_outside)) {
    for (int p = 0; p < view_.num_pieces(); ++p)
      if (view_.status(p) == PieceStatus::Root && (view_.piece(p).has_ghost || !w.wired())) {
        found_piece = p;
        return Candidate::Found;
      }
    if (root_touch_) throw std::logic_error("root piece vanished");
  }
  if (unknown_) return Candidate::Unknown;
  if (view_.mode() == Mode::Certify && reaches_outside) return Candidate::Unknown;
  if (open_.size() >= 2) return Candidate::Unknown;
  if (open_.size() == 1) {
    int od = view_.diam(open_[0]);
    if (od >= k && od > max_enc_) {
      found_piece = open_[0];
      return Candidate::Found;
    }
    return Candidate::Unknown;
  }
  if (max_enc_count_ == 1) {
    found_piece = max_enc_piece_;
    return Candidate::Found;
  }
  return Candidate::Tie;
}

std::vector<int> radii_until(int cover) {
  std::vector<int> out = {0};
  for (int r = 1; r < cover; r *= 2) out.push_back(r);
  if (out.back() < cover) out.push_back(cover);
  return out;
}

void check_cluster(const ClusterLabeling& lab, int C) {
  if (C < 0 || C >= lab.num_clusters()) throw std::invalid_argument("invalid cluster id");
}

int resolve_root(const ClusterLabeling& lab, int root) {
  if (lab.window().wired()) {
    if (root >= 0 && root != lab.ghost_cluster())
      throw std::invalid_argument("wired windows are rooted at the ghost cluster");
    return lab.ghost_cluster();
  }
  if (root >= 0) {
    check_cluster(lab, root);
    return root;
  }
  auto fr = lab.frontier_clusters();
  if (fr.size() != 1) throw std::invalid_argument("build_tree: root must be designated when the frontier cluster is not unique");
  return fr[0];
}

}  // namespace

std::vector<uint8_t> known_vertices(const Window& w, const std::vector<int>& centres, int r) {
  std::vector<uint8_t> in(w.num_vertices(), 0);
  if (r == kWholeWindow) {
    std::fill(in.begin(), in.end(), 1);
    return in;
  }
  std::vector<int> dist(w.num_vertices(), -1);
  std::vector<int> queue;
  for (int c : centres)
    if (c >= 0 && c < w.num_vertices() && dist[c] < 0) {
      dist[c] = 0;
      queue.push_back(c);
    }
  for (size_t h = 0; h < queue.size(); ++h) {
    int v = queue[h];
    in[v] = 1;
    if (dist[v] == r) continue;
    for (const int* it = w.nbr_begin(v); it != w.nbr_end(v); ++it)
      if (dist[*it] < 0) {
        dist[*it] = dist[v] + 1;
        queue.push_back(*it);
      }
  }
  return in;
}

std::vector<uint8_t> known_edges(const Window& w, const std::vector<uint8_t>& known_vertex) {
  std::vector<uint8_t> out(w.num_edges(), 0);
  for (int e = 0; e < w.num_edges(); ++e) {
    const Edge& ed = w.edge(e);
    out[e] = known_vertex[ed.u] && (ed.v == w.ghost() || known_vertex[ed.v]);
  }
  return out;
}

int covering_radius(const Window& w, const std::vector<int>& centres) {
  std::vector<int> dist(w.num_vertices(), -1);
  std::vector<int> queue;
  for (int c : centres)
    if (dist[c] < 0) {
      dist[c] = 0;
      queue.push_back(c);
    }
  int far = 0;
  for (size_t h = 0; h < queue.size(); ++h) {
    int v = queue[h];
    far = std::max(far, dist[v]);
    for (const int* it = w.nbr_begin(v); it != w.nbr_end(v); ++it)
      if (dist[*it] < 0) {
        dist[*it] = dist[v] + 1;
        queue.push_back(*it);
      }
  }
  return far;
}

Candidate candidate(const ClusterLabeling& lab, int C, int i, int radius) {
  check_cluster(lab, C);
  if (i < 0) throw std::invalid_argument("candidate level must be nonnegative");
  const Window& w = lab.window();
  const auto& verts = lab.clusters[C].vertices;
  Candidate out;
  if (verts.empty()) {
    out.kind = Candidate::Found;
    out.ref = {C, -1, true};
    return out;
  }
  View view(lab, known_vertices(w, verts, radius), Mode::Certify, -1);
  Ball ball(view, view.piece_of(verts[0]));
  ball.extend_to(i);
  int x = -1;
  out.kind = ball.evaluate(i, x);
  if (out.kind == Candidate::Found) out.ref = view.ref(x);
  return out;
}

Determination<ParentInfo> parent(const ClusterLabeling& lab, int C) {
  check_cluster(lab, C);
  Determination<ParentInfo> out;
  const auto& rec = lab.clusters[C];
  if (rec.contains_ghost || rec.frontier_touching) return out;
  const Window& w = lab.window();
  for (int r : radii_until(covering_radius(w, rec.vertices))) {
    View view(lab, known_vertices(w, rec.vertices, r), Mode::Certify, -1);
    int p = view.piece_of(rec.vertices[0]);
    if (view.status(p) != PieceStatus::Enclosed) continue;
    ParentStep step = view.parent(p);
    if (!step.known) continue;
    out.status = Status::Determined;
    out.value = {view.ref(step.piece), step.k};
    out.witness_radius = r;
    return out;
  }
  return out;
}

ClusterTree build_tree(const ClusterLabeling& lab, int root) {
  ClusterTree tree;
  tree.root = resolve_root(lab, root);
  const Window& w = lab.window();
  View view(lab, known_vertices(w, {}, kWholeWindow), Mode::Offline, tree.root);
  const int n = lab.num_clusters();
  tree.parent.assign(n, -1);
  tree.level.assign(n, 0);
  tree.depth.assign(n, -1);
  for (int c = 0; c < n; ++c) {
    if (c == tree.root) continue;
    ParentStep step = view.parent(view.piece_of(lab.clusters[c].vertices[0]));
    if (!step.known) throw std::logic_error("offline parent undetermined");
    tree.parent[c] = view.ref(step.piece).cluster;
    tree.level[c] = step.k;
  }
  tree.depth[tree.root] = 0;
  for (int c = 0; c < n; ++c) {
    std::vector<int> stack;
    int x = c;
    while (tree.depth[x] < 0) {
      stack.push_back(x);
      x = tree.parent[x];
      if (stack.size() > static_cast<size_t>(n)) throw std::logic_error("cluster tree has a cycle");
    }
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) tree.depth[*it] = tree.depth[tree.parent[*it]] + 1;
  }
  return tree;
}

Determination<LcaResult> lca_paths(const ClusterLabeling& lab, int u, int v) {
  const Window& w = lab.window();
  if (u < 0 || v < 0 || u >= w.num_vertices() || v >= w.num_vertices())
    throw std::invalid_argument("lca_paths: invalid vertex");
  Determination<LcaResult> out;
  const std::vector<int> centres = {u, v};
  for (int r : radii_until(covering_radius(w, centres))) {
    View view(lab, known_vertices(w, centres, r), Mode::Certify, -1);
    int pu = view.piece_of(u), pv = view.piece_of(v);
    LcaResult res;
    if (pu == pv) {
      res.ancestor = view.ref(pu);
    } else {
      auto chain = [&](int p) {
        std::vector<int> c = {p};
        while (view.status(c.back()) == PieceStatus::Enclosed) {
          ParentStep s = view.parent(c.back());
          if (!s.known) break;
          c.push_back(s.piece);
        }
        return c;
      };
      auto cu = chain(pu), cv = chain(pv);
      int iu = -1, iv = -1;
      for (size_t i = 0; i < cu.size() && iu < 0; ++i) {
        auto it = std::find(cv.begin(), cv.end(), cu[i]);
        if (it != cv.end()) {
          iu = static_cast<int>(i);
          iv = static_cast<int>(it - cv.begin());
        }
      }
      if (iu < 0) continue;
      res.n_uv = iu;
      res.n_vu = iv;
      for (int i = 0; i < iu; ++i) res.path_u.push_back(view.ref(cu[i]).cluster);
      for (int i = 0; i < iv; ++i) res.path_v.push_back(view.ref(cv[i]).cluster);
      res.ancestor = view.ref(cu[iu]);
    }
    out.status = Status::Determined;
    out.value = std::move(res);
    out.witness_radius = r;
    return out;
  }
  return out;
}

PerturbReport witness_perturb_test(const PercolationConfig& cfg, const std::vector<int>& centres, int radius,
                                   const std::function<std::string(const PercolationConfig&)>& eval, int trials,
                                   uint64_t seed, PerturbRegion region) {
  const Window& w = *cfg.window;
  auto ke = known_edges(w, known_vertices(w, centres, radius));
  const std::string base = eval(cfg);
  PerturbReport rep;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    PercolationConfig alt = cfg;
    for (int e = 0; e < w.num_edges(); ++e) {
      bool inside = ke[e] != 0;
      if (inside == (region == PerturbRegion::Inside)) alt.open[e] = rng.bernoulli(0.5);
    }
    ++rep.trials;
    if (eval(alt) != base) ++rep.mismatches;
  }
  return rep;
}

std::string lca_key(const ClusterLabeling& lab, const LcaResult& r) {
  std::ostringstream os;
  os << r.n_uv << ' ' << r.n_vu << " |";
  for (int c : r.path_u) os << ' ' << lab.clusters[c].vertices.front();
  os << " |";
  for (int c : r.path_v) os << ' ' << lab.clusters[c].vertices.front();
  os << " | " << (r.ancestor.root ? std::string("root") : std::to_string(r.ancestor.rep));
  return os.str();
}

}  // namespace ffgrad
