#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ffgrad/cluster_tree.hpp"
#include "ffgrad/lattice.hpp"
#include "ffgrad/rational.hpp"
#include "ffgrad/superimposed.hpp"

namespace ffgrad {

// Outside the face set the m boundary condition applies: faces whose parity
// matches m take m, the others m + 1.
int boundary_height(int m, Parity p);

struct HeightFunction {
  std::vector<Coord> faces;  // sorted
  std::vector<int> values;
  std::optional<int> m;

  int index(const Coord& f) const;  // -1 when absent
  std::optional<int> at(const Coord& f) const;
  int value(const Coord& f) const;  // throws when undefined
};

HeightFunction flat_height(const DiamondDomain& dom, int m);
// Valid heights built from the flat pattern by accepted single-face +-2
// moves on faces strictly inside the inner boundary.
HeightFunction random_height(const DiamondDomain& dom, int m, int moves, uint64_t seed);

// Empty when h is valid.
std::vector<std::string> validate_height(const HeightFunction& h);

// Arrows per vertex in the order W, E, S, N; +1 points towards +x or +y.
// Crossing an arrow from its left to its right raises the height by one.
struct SixVertexConfig {
  std::vector<Coord> vertices;  // sorted
  std::vector<std::array<int8_t, 4>> arrows;
  std::vector<int> type;  // 1..6, 0 when the ice rule fails

  int index(const Coord& x) const;
};

// Types 1-4 are the frozen configurations, 5 and 6 the saddles.
int vertex_type(const std::array<int8_t, 4>& a);

// Vertices all of whose faces carry a height (including m-pattern faces).
SixVertexConfig height_to_arrows(const HeightFunction& h);
// Integrates the arrows over the faces around the vertices; h(anchor) = value.
HeightFunction arrows_to_height(const SixVertexConfig& a, const Coord& anchor, int value);

bool is_height_saddle(const HeightFunction& h, const Coord& x);
int height_saddles(const HeightFunction& h, const std::vector<Coord>& vertices);

struct SpinConfig {
  std::shared_ptr<const DiamondDomain> dom;
  std::vector<int8_t> spin;  // +1 / -1 on dom->faces
  int8_t i = 1;              // outer boundary and odd faces outside
  int8_t j = 1;              // inner boundary and even faces outside

  int8_t at(const Coord& f) const;
};

// (i, j) induced by the m boundary condition.
std::pair<int8_t, int8_t> spin_boundary(int m);
int8_t spin_of_height(int h);

SpinConfig height_to_spin(const HeightFunction& h, std::shared_ptr<const DiamondDomain> dom);
// Lift with h(dom->center) in {0, 2} + 4 * shift. Throws on an ice-rule violation.
HeightFunction spin_to_height(const SpinConfig& s, int shift = 0);
// Empty when the boundary holds and every hat vertex has a monochromatic diagonal.
std::vector<std::string> validate_spin(const SpinConfig& s);

bool is_spin_saddle(const SpinConfig& s, const Coord& x);
int spin_saddles(const SpinConfig& s);  // over internal vertices

struct OrientedEntry {
  Coord u, v;
  int value = 0;
};
struct FaceEntry {
  Coord face;
  double value = 0.0;
};
struct HeightObservables {
  std::vector<OrientedEntry> grad;           // h(u) - h(v), u < v neighbours in the face set
  std::vector<OrientedEntry> diag_grad;      // h(u) - h(v), u < v diagonal neighbours
  std::vector<OrientedEntry> abs_diag_grad;  // 2 * 1{h(u) != h(v)}
  std::vector<FaceEntry> laplacian;          // faces whose four neighbours carry heights
  std::vector<FaceEntry> abs_laplacian;
};
HeightObservables observables(const HeightFunction& h);

// The diagonal edges of Delta: primal then dual pair of each Delta site.
std::vector<FacePair> delta_edges(const DiamondDomain& dom);
std::vector<int> abs_diag_grad_on(const HeightFunction& h, const std::vector<FacePair>& edges);
std::vector<int> abs_diag_grad_on(const SpinConfig& s, const std::vector<FacePair>& edges);

// Coupling, spin to crosses: forced states off saddles; saddles
// draw PrimalOnly, Both, DualOnly with weights 1, alpha, 1.
SuperimposedConfig si_from_spin(const SpinConfig& s, SiDomainPtr dom, double alpha, uint64_t seed);
// Crosses to spins: uniform sign per cluster of faces, except that the dual
// and primal boundary clusters take i and j; all_uniform draws those too.
SpinConfig spin_from_si(const SuperimposedConfig& eta, std::shared_ptr<const DiamondDomain> dom, int8_t i, int8_t j,
                        uint64_t seed, bool all_uniform = false);
// Whether every open edge of eta joins equal spins.
bool compatible(const SpinConfig& s, const SuperimposedConfig& eta);

struct DiagGradEntry {
  FacePair edge;
  Determination<int> value;  // 0 or 2 when determined
};
// Exact superimposed sample (q = 2, wired-wired) followed by gradient coding
// on each sublattice; the ghost cluster is the root.
std::vector<DiagGradEntry> abs_diag_grad_pipeline(const DiamondDomain& dom, double alpha, uint64_t seed);

std::string to_text(const HeightFunction& h);
std::string to_text(const SpinConfig& s);

}  // namespace ffgrad
