#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace ffgrad {

constexpr int kMaxDim = 4;

struct Coord {
  std::array<int, kMaxDim> c{};
  int d = 2;

  Coord() = default;
  Coord(std::initializer_list<int> values);
  static Coord zeros(int dim);

  int dim() const { return d; }
  int operator[](int i) const { return c[i]; }
  int& operator[](int i) { return c[i]; }

  Coord operator+(const Coord& o) const;
  Coord operator-(const Coord& o) const;
  bool operator==(const Coord& o) const;
  std::strong_ordering operator<=>(const Coord& o) const;

  std::string str() const;
};

struct CoordHash {
  size_t operator()(const Coord& x) const;
};

enum class Parity { Even, Odd };

Parity parity(const Coord& face);
int l1_distance(const Coord& a, const Coord& b);
int chebyshev_distance(const Coord& a, const Coord& b);

// Graph distance in (Z^2)*; faces are named by their lower-left corner.
inline int face_distance(const Coord& a, const Coord& b) { return l1_distance(a, b); }

std::array<Coord, 4> face_neighbors(const Coord& u);
// Neighbours of u inside its own sublattice (L or L*).
std::array<Coord, 4> diagonal_neighbors(const Coord& u);

// Unordered pair of faces stored with first < second.
struct FacePair {
  Coord a, b;
  FacePair() = default;
  FacePair(const Coord& x, const Coord& y);
  bool operator==(const FacePair& o) const { return a == o.a && b == o.b; }
};

struct Cross {
  Coord site;
  FacePair primal_edge;
  FacePair dual_edge;
};

Cross cross_of(const Coord& x);
// The square-lattice vertex shared by two diagonal faces.
Coord site_of(const FacePair& diagonal);
// The other edge of the cross containing the given diagonal edge.
FacePair dual_edge(const FacePair& diagonal);

// The four faces around a square-lattice vertex, in the order SW, SE, NW, NE.
std::array<Coord, 4> faces_around(const Coord& x);

struct DiamondDomain {
  Coord center;
  int n = 0;
  std::vector<Coord> faces;           // Lambda, sorted
  std::vector<Coord> inner_boundary;  // distance n, even
  std::vector<Coord> outer_boundary;  // distance n + 1, odd
  std::vector<Coord> circuit;         // the circuit around Lambda, in cyclic order
  std::vector<Coord> hat_vertices;    // circuit and enclosed vertices
  std::vector<Coord> internal_vertices;
  std::vector<Coord> delta_sites;     // crosses of Delta(Lambda), sorted

  int dist(const Coord& face) const { return face_distance(face, center); }
  bool contains(const Coord& face) const { return dist(face) <= n; }
  bool is_internal(const Coord& x) const;
  int face_index(const Coord& face) const;  // -1 when outside Lambda
};

DiamondDomain diamond(const Coord& center, int n);

// All faces within distance r of v; used by tests as an enumeration oracle.
std::vector<Coord> faces_within(const Coord& v, int r);

}  // namespace ffgrad
