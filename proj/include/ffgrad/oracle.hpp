#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffgrad/lattice.hpp"
#include "ffgrad/percolation.hpp"
#include "ffgrad/rational.hpp"

namespace ffgrad {

class SiDomain;

using State = std::vector<int8_t>;

// States are stored in lexicographic order, so lookups are binary searches.
struct ExactTable {
  std::string model;
  std::vector<State> states;
  std::vector<Rational> weight;
  Rational Z;

  size_t size() const { return states.size(); }
  Rational probability(size_t i) const { return weight[i] / Z; }
  long index_of(const State& s) const;  // -1 when absent
};

class OracleSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kMaxBinaryStates = 16777216.0;    // 2^24
constexpr double kMaxTernaryStates = 43046721.0;   // 3^16

// Edge states in window edge order.
ExactTable enumerate_fk(WindowPtr w, const Rational& p, const Rational& q, bool parallel = true);
// Colours of the real vertices; a wired window holds the ghost at colour 0.
ExactTable enumerate_potts(WindowPtr w, const Rational& p, int q, bool parallel = true);
// Delta states in site order.
ExactTable enumerate_superimposed(std::shared_ptr<const SiDomain> dom, const Rational& alpha, const Rational& q,
                                  bool parallel = true);
// Heights on the faces of Lambda under the m boundary condition, weight
// c^{#saddles over the hat vertices}.
ExactTable enumerate_height(const DiamondDomain& dom, int m, const Rational& c);
// Spins (+1 / -1) on the faces of Lambda with boundary (i, j), weight
// c^{#saddles over the internal vertices}. DFS with ice-rule pruning; the
// cap applies to admissible states.
ExactTable enumerate_spin(const DiamondDomain& dom, int8_t i, int8_t j, const Rational& c, bool parallel = true);

// Z^{SI} by a transfer over Delta sites in order, carrying the connectivity
// partition of the faces still touched by later sites. Does not enumerate.
Rational si_partition_function(std::shared_ptr<const SiDomain> dom, const Rational& alpha, const Rational& q);

Rational marginal(const ExactTable& t, const std::function<bool(const State&)>& event);
// Pushforward to keys; the result is normalized.
std::map<State, Rational> pushforward(const ExactTable& t, const std::function<State(const State&)>& key);
double tv_distance(const ExactTable& t, const std::map<State, long>& empirical);

// Rationals are written as {"num": "...", "den": "..."} strings.
std::string to_json(const ExactTable& t);

}  // namespace ffgrad
