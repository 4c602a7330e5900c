#include "ffgrad/sixvertex.hpp"

#include <algorithm>
#include <climits>
#include <deque>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ffgrad/gradient_coding.hpp"
#include "ffgrad/rng.hpp"

namespace ffgrad {

namespace {

int floor_mod(int x, int q) { return ((x % q) + q) % q; }

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// Edges incident to vertex x, as the two faces on either side: for W and E
// the (below, above) pair, for S and N the (left, right) pair.
std::array<std::pair<Coord, Coord>, 4> edge_sides(const Coord& x) {
  auto f = faces_around(x);  // SW, SE, NW, NE
  return {{{f[0], f[2]}, {f[1], f[3]}, {f[0], f[1]}, {f[2], f[3]}}};
}

}  // namespace

int boundary_height(int m, Parity p) {
  bool m_even = floor_mod(m, 2) == 0;
  bool face_even = p == Parity::Even;
  return m_even == face_even ? m : m + 1;
}

int HeightFunction::index(const Coord& f) const {
  auto it = std::lower_bound(faces.begin(), faces.end(), f);
  return it != faces.end() && *it == f ? static_cast<int>(it - faces.begin()) : -1;
}

std::optional<int> HeightFunction::at(const Coord& f) const {
  int i = index(f);
  if (i >= 0) return values[i];
  if (m) return boundary_height(*m, parity(f));
  return std::nullopt;
}

int HeightFunction::value(const Coord& f) const {
  auto v = at(f);
  if (!v) throw std::out_of_range("height undefined at " + f.str());
  return *v;
}

HeightFunction flat_height(const DiamondDomain& dom, int m) {
  HeightFunction h;
  h.faces = dom.faces;
  h.m = m;
  for (const auto& f : dom.faces) h.values.push_back(boundary_height(m, parity(f)));
  return h;
}

HeightFunction random_height(const DiamondDomain& dom, int m, int moves, uint64_t seed) {
  HeightFunction h = flat_height(dom, m);
  std::vector<int> free;
  for (int i = 0; i < static_cast<int>(dom.faces.size()); ++i)
    if (dom.dist(dom.faces[i]) < dom.n) free.push_back(i);
  Rng rng(seed);
  for (int t = 0; t < moves; ++t) {
    int i = free[rng.below(free.size())];
    int step = rng.bernoulli(0.5) ? 2 : -2;
    int mid = h.values[i] + step / 2;
    bool ok = true;
    for (const auto& g : face_neighbors(h.faces[i]))
      if (h.value(g) != mid) ok = false;
    if (ok) h.values[i] += step;
  }
  return h;
}

std::vector<std::string> validate_height(const HeightFunction& h) {
  std::vector<std::string> out;
  for (size_t i = 0; i < h.faces.size(); ++i) {
    const Coord& f = h.faces[i];
    bool even_value = floor_mod(h.values[i], 2) == 0;
    if (even_value != (parity(f) == Parity::Even)) out.push_back("parity at " + f.str());
    bool on_boundary = false;
    for (const auto& g : face_neighbors(f)) {
      if (h.index(g) < 0) on_boundary = true;
      auto hg = h.at(g);
      if (!hg) continue;
      if (h.index(g) >= 0 && !(f < g)) continue;
      if (std::abs(*hg - h.values[i]) != 1) out.push_back("step " + f.str() + "-" + g.str());
    }
    if (on_boundary && h.m && h.values[i] != boundary_height(*h.m, parity(f)))
      out.push_back("boundary at " + f.str());
  }
  return out;
}

int SixVertexConfig::index(const Coord& x) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), x);
  return it != vertices.end() && *it == x ? static_cast<int>(it - vertices.begin()) : -1;
}

int vertex_type(const std::array<int8_t, 4>& a) {
  static const std::array<std::array<int8_t, 4>, 6> table = {{{1, 1, 1, 1},
                                                             {-1, -1, -1, -1},
                                                             {1, 1, -1, -1},
                                                             {-1, -1, 1, 1},
                                                             {1, -1, -1, 1},
                                                             {-1, 1, 1, -1}}};
  for (int t = 0; t < 6; ++t)
    if (table[t] == a) return t + 1;
  return 0;
}

SixVertexConfig height_to_arrows(const HeightFunction& h) {
  std::vector<Coord> candidates;
  for (const auto& f : h.faces)
    for (const auto& x : {f, Coord{f[0] + 1, f[1]}, Coord{f[0], f[1] + 1}, Coord{f[0] + 1, f[1] + 1}})
      candidates.push_back(x);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  SixVertexConfig a;
  for (const auto& x : candidates) {
    auto sides = edge_sides(x);
    std::array<int8_t, 4> arr{};
    bool defined = true;
    for (int k = 0; k < 4 && defined; ++k) {
      auto p = h.at(sides[k].first), q = h.at(sides[k].second);
      if (!p || !q) {
        defined = false;
        break;
      }
      // W/E: +x iff below - above = 1. S/N: +y iff right - left = 1.
      int diff = *q - *p;
      arr[k] = static_cast<int8_t>(k < 2 ? -diff : diff);
    }
    if (!defined) continue;
    a.vertices.push_back(x);
    a.arrows.push_back(arr);
    a.type.push_back(vertex_type(arr));
  }
  return a;
}

HeightFunction arrows_to_height(const SixVertexConfig& a, const Coord& anchor, int value) {
  // Heights change across the edge separating two neighbouring faces.
  std::vector<Coord> faces;
  for (const auto& x : a.vertices)
    for (const auto& f : faces_around(x)) faces.push_back(f);
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  HeightFunction h;
  h.faces = faces;
  h.values.assign(faces.size(), INT_MIN);
  int start = h.index(anchor);
  if (start < 0) throw std::invalid_argument("arrows_to_height: anchor outside the configuration");
  h.values[start] = value;
  auto arrow = [&](const Coord& x, int k) -> std::optional<int> {
    int i = a.index(x);
    if (i < 0) return std::nullopt;
    return a.arrows[i][k];
  };
  // Step from f to g; returns h(g) - h(f) when the shared edge is known.
  auto step = [&](const Coord& f, const Coord& g) -> std::optional<int> {
    if (g[0] == f[0] + 1 || g[0] == f[0] - 1) {
      const Coord& left = g[0] > f[0] ? f : g;
      Coord lower{left[0] + 1, left[1]}, upper{left[0] + 1, left[1] + 1};
      auto r = arrow(lower, 3);
      if (!r) r = arrow(upper, 2);
      if (!r) return std::nullopt;
      return g[0] > f[0] ? *r : -*r;  // right - left = arrow
    }
    const Coord& below = g[1] > f[1] ? f : g;
    Coord lefty{below[0], below[1] + 1}, righty{below[0] + 1, below[1] + 1};
    auto r = arrow(lefty, 1);
    if (!r) r = arrow(righty, 0);
    if (!r) return std::nullopt;
    return g[1] > f[1] ? -*r : *r;  // below - above = arrow
  };
  std::deque<int> queue = {start};
  while (!queue.empty()) {
    int fi = queue.front();
    queue.pop_front();
    for (const auto& g : face_neighbors(faces[fi])) {
      int gi = h.index(g);
      if (gi < 0) continue;
      auto d = step(faces[fi], g);
      if (!d) continue;
      int v = h.values[fi] + *d;
      if (h.values[gi] == INT_MIN) {
        h.values[gi] = v;
        queue.push_back(gi);
      } else if (h.values[gi] != v) {
        throw std::invalid_argument("arrows_to_height: inconsistent arrow curl at " + g.str());
      }
    }
  }
  for (size_t i = 0; i < faces.size(); ++i)
    if (h.values[i] == INT_MIN) throw std::invalid_argument("arrows_to_height: face set is not connected");
  return h;
}

bool is_height_saddle(const HeightFunction& h, const Coord& x) {
  auto f = faces_around(x);
  return h.value(f[0]) == h.value(f[3]) && h.value(f[1]) == h.value(f[2]);
}

int height_saddles(const HeightFunction& h, const std::vector<Coord>& vertices) {
  int n = 0;
  for (const auto& x : vertices) n += is_height_saddle(h, x);
  return n;
}

int8_t SpinConfig::at(const Coord& f) const {
  int i_face = dom->face_index(f);
  if (i_face >= 0) return spin[i_face];
  return parity(f) == Parity::Even ? j : i;
}

std::pair<int8_t, int8_t> spin_boundary(int m) {
  int odd = floor_mod(m, 2) ? m : m + 1;
  int even = floor_mod(m, 2) ? m + 1 : m;
  return {spin_of_height(odd), spin_of_height(even)};
}

int8_t spin_of_height(int h) { return floor_mod(h, 4) <= 1 ? 1 : -1; }

SpinConfig height_to_spin(const HeightFunction& h, std::shared_ptr<const DiamondDomain> dom) {
  SpinConfig s;
  s.dom = dom;
  for (const auto& f : dom->faces) s.spin.push_back(spin_of_height(h.value(f)));
  if (h.m) {
    auto [i, j] = spin_boundary(*h.m);
    s.i = i;
    s.j = j;
  }
  return s;
}

HeightFunction spin_to_height(const SpinConfig& s, int shift) {
  const DiamondDomain& d = *s.dom;
  HeightFunction h;
  h.faces = d.faces;
  h.values.assign(d.faces.size(), INT_MIN);
  int c = d.face_index(d.center);
  h.values[c] = (s.spin[c] > 0 ? 0 : 2) + 4 * shift;
  std::deque<int> queue = {c};
  while (!queue.empty()) {
    int fi = queue.front();
    queue.pop_front();
    const Coord& f = d.faces[fi];
    for (const auto& g : face_neighbors(f)) {
      int gi = d.face_index(g);
      if (gi < 0) continue;
      // h(odd) - h(even) = +1 on equal spins, -1 otherwise.
      int sign = s.spin[fi] == s.spin[gi] ? 1 : -1;
      int v = parity(f) == Parity::Even ? h.values[fi] + sign : h.values[fi] - sign;
      if (h.values[gi] == INT_MIN) {
        h.values[gi] = v;
        queue.push_back(gi);
      } else if (h.values[gi] != v) {
        throw std::invalid_argument("spin_to_height: spin ice rule violated near " + g.str());
      }
    }
  }
  // Read m off an inner boundary face and its outer neighbour.
  const Coord& f = d.inner_boundary.front();
  int hf = h.values[d.face_index(f)];
  int hg = hf + (s.i == s.j ? 1 : -1);
  h.m = std::min(hf, hg);
  auto bad = validate_height(h);
  if (!bad.empty()) throw std::invalid_argument("spin_to_height: lift violates " + bad.front());
  return h;
}

std::vector<std::string> validate_spin(const SpinConfig& s) {
  std::vector<std::string> out;
  for (const auto& f : s.dom->inner_boundary)
    if (s.at(f) != s.j) out.push_back("inner boundary at " + f.str());
  for (const auto& x : s.dom->hat_vertices) {
    auto f = faces_around(x);
    if (s.at(f[0]) != s.at(f[3]) && s.at(f[1]) != s.at(f[2])) out.push_back("ice rule at " + x.str());
  }
  return out;
}

bool is_spin_saddle(const SpinConfig& s, const Coord& x) {
  auto f = faces_around(x);
  return s.at(f[0]) == s.at(f[3]) && s.at(f[1]) == s.at(f[2]);
}

int spin_saddles(const SpinConfig& s) {
  int n = 0;
  for (const auto& x : s.dom->internal_vertices) n += is_spin_saddle(s, x);
  return n;
}

HeightObservables observables(const HeightFunction& h) {
  HeightObservables o;
  for (size_t i = 0; i < h.faces.size(); ++i) {
    const Coord& u = h.faces[i];
    for (const auto& v : face_neighbors(u))
      if (u < v && h.index(v) >= 0) o.grad.push_back({u, v, h.values[i] - h.value(v)});
    for (const auto& v : diagonal_neighbors(u))
      if (u < v && h.index(v) >= 0) {
        int d = h.values[i] - h.value(v);
        o.diag_grad.push_back({u, v, d});
        o.abs_diag_grad.push_back({u, v, d == 0 ? 0 : 2});
      }
    int sum = 0;
    bool defined = true;
    for (const auto& v : face_neighbors(u)) {
      auto hv = h.at(v);
      if (!hv) {
        defined = false;
        break;
      }
      sum += *hv - h.values[i];
    }
    if (defined) {
      o.laplacian.push_back({u, sum / 4.0});
      o.abs_laplacian.push_back({u, std::abs(sum / 4.0)});
    }
  }
  return o;
}

std::vector<FacePair> delta_edges(const DiamondDomain& dom) {
  std::vector<FacePair> out;
  for (const auto& x : dom.delta_sites) {
    Cross c = cross_of(x);
    out.push_back(c.primal_edge);
    out.push_back(c.dual_edge);
  }
  return out;
}

std::vector<int> abs_diag_grad_on(const HeightFunction& h, const std::vector<FacePair>& edges) {
  std::vector<int> out;
  for (const auto& e : edges) out.push_back(h.value(e.a) == h.value(e.b) ? 0 : 2);
  return out;
}

std::vector<int> abs_diag_grad_on(const SpinConfig& s, const std::vector<FacePair>& edges) {
  std::vector<int> out;
  for (const auto& e : edges) out.push_back(s.at(e.a) == s.at(e.b) ? 0 : 2);
  return out;
}

SuperimposedConfig si_from_spin(const SpinConfig& s, SiDomainPtr dom, double alpha, uint64_t seed) {
  SuperimposedConfig eta(dom, kBoth);
  Rng rng(seed);
  const double p_side = 1.0 / (2.0 + alpha);
  for (int k = 0; k < dom->num_delta(); ++k) {
    Cross c = cross_of(dom->site(k));
    bool primal_eq = s.at(c.primal_edge.a) == s.at(c.primal_edge.b);
    bool dual_eq = s.at(c.dual_edge.a) == s.at(c.dual_edge.b);
    double u = rng.uniform();
    if (primal_eq && dual_eq)
      eta.state[k] = u < p_side ? kPrimalOnly : (u < 1.0 - p_side ? kBoth : kDualOnly);
    else if (primal_eq)
      eta.state[k] = kPrimalOnly;
    else if (dual_eq)
      eta.state[k] = kDualOnly;
    else
      throw std::invalid_argument("si_from_spin: spin ice rule violated at " + dom->site(k).str());
  }
  return eta;
}

SpinConfig spin_from_si(const SuperimposedConfig& eta, std::shared_ptr<const DiamondDomain> dom, int8_t i, int8_t j,
                        uint64_t seed, bool all_uniform) {
  const SiDomain& d = *eta.domain;
  if (!all_uniform && !(d.wired(0) && d.wired(1)))
    throw std::invalid_argument("spin_from_si: boundary clusters need a wired-wired domain");
  const int nf = d.num_faces();
  Dsu dsu(nf + 2);
  for (int s = 0; s < d.num_sites(); ++s)
    for (int sub = 0; sub < 2; ++sub)
      if (eta.edge_open(s, sub)) dsu.unite(d.edge_faces(s, sub)[0], d.edge_faces(s, sub)[1]);
  for (int sub = 0; sub < 2; ++sub)
    if (d.wired(sub))
      for (int f : d.frame_faces(sub)) dsu.unite(f, d.ghost(sub));
  Rng rng(seed);
  std::vector<int8_t> sign(nf + 2, 0);
  if (!all_uniform) {
    sign[dsu.find(d.ghost(0))] = j;
    sign[dsu.find(d.ghost(1))] = i;
  }
  SpinConfig out;
  out.dom = dom;
  out.i = i;
  out.j = j;
  auto sign_of = [&](int f) {
    int r = dsu.find(f);
    if (sign[r] == 0) sign[r] = rng.bernoulli(0.5) ? 1 : -1;
    return sign[r];
  };
  if (all_uniform) {
    out.j = sign_of(d.ghost(0));
    out.i = sign_of(d.ghost(1));
  }
  for (const auto& f : dom->faces) {
    int fi = d.face_index(f);
    if (fi < 0) throw std::invalid_argument("spin_from_si: face " + f.str() + " not covered by the domain");
    out.spin.push_back(sign_of(fi));
  }
  return out;
}

bool compatible(const SpinConfig& s, const SuperimposedConfig& eta) {
  const SiDomain& d = *eta.domain;
  for (int k = 0; k < d.num_sites(); ++k)
    for (int sub = 0; sub < 2; ++sub)
      if (eta.edge_open(k, sub) &&
          s.at(d.face(d.edge_faces(k, sub)[0])) != s.at(d.face(d.edge_faces(k, sub)[1])))
        return false;
  return true;
}

std::vector<DiagGradEntry> abs_diag_grad_pipeline(const DiamondDomain& dom, double alpha, uint64_t seed) {
  SiDomainPtr sd = SiDomain::diamond(dom, SiBoundary::WiredWired);
  SuperimposedConfig eta = si_cftp(sd, SiParams{alpha, 2.0}, derive_seed(seed, 0));
  std::vector<DiagGradEntry> out;
  std::array<ClusterLabeling, 2> lab;
  std::array<SpinSource, 2> src;
  for (int sub = 0; sub < 2; ++sub) {
    WindowPtr w = Window::sublattice(dom, sub == 0 ? Parity::Even : Parity::Odd);
    PercolationConfig cfg(w, true);
    for (int e = 0; e < w->num_edges(); ++e) {
      if (w->is_shell_edge(e)) continue;
      int k = sd->site_index(site_of(FacePair(w->coord(w->edge(e).u), w->coord(w->edge(e).v))));
      if (k >= 0 && k < sd->num_delta()) cfg.open[e] = eta.edge_open(k, sub);
    }
    lab[sub] = components(cfg);
    src[sub] = SpinSource::random(*w, 2, derive_seed(seed, 1 + sub));
  }
  for (const auto& e : delta_edges(dom)) {
    int sub = parity(e.a) == Parity::Even ? 0 : 1;
    const Window& w = lab[sub].window();
    Determination<int> g = grad_edge(lab[sub], w.index_of(e.a), w.index_of(e.b), src[sub]);
    if (g.determined()) g.value = g.value == 0 ? 0 : 2;
    out.push_back({e, g});
  }
  return out;
}

std::string to_text(const HeightFunction& h) {
  int x0 = INT_MAX, x1 = INT_MIN, y0 = INT_MAX, y1 = INT_MIN;
  for (const auto& f : h.faces) {
    x0 = std::min(x0, f[0]);
    x1 = std::max(x1, f[0]);
    y0 = std::min(y0, f[1]);
    y1 = std::max(y1, f[1]);
  }
  std::ostringstream os;
  for (int y = y1; y >= y0; --y) {
    for (int x = x0; x <= x1; ++x) {
      if (x > x0) os << ' ';
      int i = h.index(Coord{x, y});
      if (i < 0)
        os << '.';
      else
        os << h.values[i];
    }
    os << '\n';
  }
  return os.str();
}

std::string to_text(const SpinConfig& s) {
  int x0 = INT_MAX, x1 = INT_MIN, y0 = INT_MAX, y1 = INT_MIN;
  for (const auto& f : s.dom->faces) {
    x0 = std::min(x0, f[0]);
    x1 = std::max(x1, f[0]);
    y0 = std::min(y0, f[1]);
    y1 = std::max(y1, f[1]);
  }
  std::string out;
  for (int y = y1; y >= y0; --y) {
    for (int x = x0; x <= x1; ++x) {
      int i = s.dom->face_index(Coord{x, y});
      out += i < 0 ? '.' : (s.spin[i] > 0 ? '+' : '-');
    }
    out += '\n';
  }
  return out;
}

}  // namespace ffgrad
