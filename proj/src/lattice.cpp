#include "ffgrad/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ffgrad {

Coord::Coord(std::initializer_list<int> values) {
  if (values.size() == 0 || values.size() > kMaxDim) throw std::invalid_argument("Coord dimension out of range");
  d = static_cast<int>(values.size());
  int i = 0;
  for (int v : values) c[i++] = v;
}

Coord Coord::zeros(int dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Coord dimension out of range");
  Coord x;
  x.d = dim;
  return x;
}

Coord Coord::operator+(const Coord& o) const {
  Coord r = *this;
  for (int i = 0; i < d; ++i) r.c[i] += o.c[i];
  return r;
}

Coord Coord::operator-(const Coord& o) const {
  Coord r = *this;
  for (int i = 0; i < d; ++i) r.c[i] -= o.c[i];
  return r;
}

bool Coord::operator==(const Coord& o) const {
  if (d != o.d) return false;
  for (int i = 0; i < d; ++i)
    if (c[i] != o.c[i]) return false;
  return true;
}

std::strong_ordering Coord::operator<=>(const Coord& o) const {
  if (d != o.d) return d <=> o.d;
  for (int i = 0; i < d; ++i)
    if (c[i] != o.c[i]) return c[i] <=> o.c[i];
  return std::strong_ordering::equal;
}

std::string Coord::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < d; ++i) os << (i ? "," : "") << c[i];
  os << ')';
  return os.str();
}

size_t CoordHash::operator()(const Coord& x) const {
  uint64_t h = 0x84222325CBF29CE4ULL ^ static_cast<uint64_t>(x.d);
  for (int i = 0; i < x.d; ++i) {
    h ^= static_cast<uint64_t>(static_cast<uint32_t>(x.c[i]));
    h *= 0x100000001B3ULL;
    h ^= h >> 29;
  }
  return static_cast<size_t>(h);
}

Parity parity(const Coord& face) {
  int s = 0;
  for (int i = 0; i < face.d; ++i) s += face.c[i];
  return (s % 2 == 0) ? Parity::Even : Parity::Odd;
}

int l1_distance(const Coord& a, const Coord& b) {
  int s = 0;
  for (int i = 0; i < a.d; ++i) s += std::abs(a.c[i] - b.c[i]);
  return s;
}

int chebyshev_distance(const Coord& a, const Coord& b) {
  int s = 0;
  for (int i = 0; i < a.d; ++i) s = std::max(s, std::abs(a.c[i] - b.c[i]));
  return s;
}

std::array<Coord, 4> face_neighbors(const Coord& u) {
  return {Coord{u[0] + 1, u[1]}, Coord{u[0] - 1, u[1]}, Coord{u[0], u[1] + 1}, Coord{u[0], u[1] - 1}};
}

std::array<Coord, 4> diagonal_neighbors(const Coord& u) {
  return {Coord{u[0] + 1, u[1] + 1}, Coord{u[0] + 1, u[1] - 1}, Coord{u[0] - 1, u[1] + 1},
          Coord{u[0] - 1, u[1] - 1}};
}

FacePair::FacePair(const Coord& x, const Coord& y) {
  if (x < y) {
    a = x;
    b = y;
  } else {
    a = y;
    b = x;
  }
}

std::array<Coord, 4> faces_around(const Coord& x) {
  return {Coord{x[0] - 1, x[1] - 1}, Coord{x[0], x[1] - 1}, Coord{x[0] - 1, x[1]}, Coord{x[0], x[1]}};
}

Cross cross_of(const Coord& x) {
  auto f = faces_around(x);
  Cross out;
  out.site = x;
  FacePair sw_ne(f[0], f[3]);
  FacePair se_nw(f[1], f[2]);
  if (parity(x) == Parity::Even) {
    out.primal_edge = sw_ne;
    out.dual_edge = se_nw;
  } else {
    out.primal_edge = se_nw;
    out.dual_edge = sw_ne;
  }
  return out;
}

Coord site_of(const FacePair& e) {
  if (std::abs(e.a[0] - e.b[0]) != 1 || std::abs(e.a[1] - e.b[1]) != 1)
    throw std::invalid_argument("not a diagonal pair: " + e.a.str() + " " + e.b.str());
  return Coord{std::max(e.a[0], e.b[0]), std::max(e.a[1], e.b[1])};
}

FacePair dual_edge(const FacePair& e) {
  Cross c = cross_of(site_of(e));
  return c.primal_edge == e ? c.dual_edge : c.primal_edge;
}

std::vector<Coord> faces_within(const Coord& v, int r) {
  std::vector<Coord> out;
  for (int dx = -r; dx <= r; ++dx)
    for (int dy = -(r - std::abs(dx)); dy <= r - std::abs(dx); ++dy) out.push_back(Coord{v[0] + dx, v[1] + dy});
  std::sort(out.begin(), out.end());
  return out;
}

bool DiamondDomain::is_internal(const Coord& x) const {
  return std::binary_search(internal_vertices.begin(), internal_vertices.end(), x);
}

int DiamondDomain::face_index(const Coord& face) const {
  auto it = std::lower_bound(faces.begin(), faces.end(), face);
  if (it == faces.end() || !(*it == face)) return -1;
  return static_cast<int>(it - faces.begin());
}

DiamondDomain diamond(const Coord& center, int n) {
  if (center.dim() != 2) throw std::invalid_argument("diamond center must be a face coordinate");
  if (parity(center) != Parity::Even) throw std::invalid_argument("diamond center must lie in the even sublattice");
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("diamond radius must be a positive even integer");

  DiamondDomain dom;
  dom.center = center;
  dom.n = n;
  dom.faces = faces_within(center, n);
  for (const auto& f : dom.faces)
    if (dom.dist(f) == n) dom.inner_boundary.push_back(f);
  for (const auto& f : faces_within(center, n + 1))
    if (dom.dist(f) == n + 1) dom.outer_boundary.push_back(f);

  // Boundary segments of the union of the squares of Lambda.
  std::map<Coord, std::vector<Coord>> seg;
  auto add_seg = [&](Coord p, Coord q) {
    seg[p].push_back(q);
    seg[q].push_back(p);
  };
  for (const auto& f : dom.faces) {
    int a = f[0], b = f[1];
    if (!dom.contains(Coord{a, b - 1})) add_seg(Coord{a, b}, Coord{a + 1, b});
    if (!dom.contains(Coord{a, b + 1})) add_seg(Coord{a, b + 1}, Coord{a + 1, b + 1});
    if (!dom.contains(Coord{a - 1, b})) add_seg(Coord{a, b}, Coord{a, b + 1});
    if (!dom.contains(Coord{a + 1, b})) add_seg(Coord{a + 1, b}, Coord{a + 1, b + 1});
  }
  for (const auto& [v, nb] : seg)
    if (nb.size() != 2) throw std::logic_error("diamond boundary is not a simple circuit");
  Coord start = seg.begin()->first;
  Coord prev = start, cur = seg.begin()->second[0];
  dom.circuit.push_back(start);
  while (!(cur == start)) {
    dom.circuit.push_back(cur);
    const auto& nb = seg[cur];
    Coord next = (nb[0] == prev) ? nb[1] : nb[0];
    prev = cur;
    cur = next;
  }
  if (dom.circuit.size() != seg.size()) throw std::logic_error("diamond boundary has several components");

  std::set<Coord> hat;
  for (const auto& f : dom.faces) {
    hat.insert(Coord{f[0], f[1]});
    hat.insert(Coord{f[0] + 1, f[1]});
    hat.insert(Coord{f[0], f[1] + 1});
    hat.insert(Coord{f[0] + 1, f[1] + 1});
  }
  dom.hat_vertices.assign(hat.begin(), hat.end());
  for (const auto& x : dom.hat_vertices) {
    bool all = hat.count(Coord{x[0] + 1, x[1]}) && hat.count(Coord{x[0] - 1, x[1]}) &&
               hat.count(Coord{x[0], x[1] + 1}) && hat.count(Coord{x[0], x[1] - 1});
    if (all) dom.internal_vertices.push_back(x);
  }

  std::set<Coord> sites;
  for (const auto& f : dom.faces) {
    if (parity(f) != Parity::Even) continue;
    for (const auto& g : diagonal_neighbors(f))
      if (dom.contains(g)) sites.insert(site_of(FacePair(f, g)));
  }
  dom.delta_sites.assign(sites.begin(), sites.end());
  return dom;
}

}  // namespace ffgrad
