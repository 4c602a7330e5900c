#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ffgrad/lattice.hpp"
#include "ffgrad/random_cluster.hpp"
#include "ffgrad/rational.hpp"

namespace ffgrad {

// Ordinal cross states; primal edge open iff s >= 0, dual edge open iff s <= 0.
constexpr int8_t kPrimalOnly = 1;
constexpr int8_t kBoth = 0;
constexpr int8_t kDualOnly = -1;

char cross_char(int8_t s);
int8_t cross_from_char(char c);

enum class SiBoundary { WiredWired, WiredFree, FreeWired, Explicit };
const char* si_boundary_name(SiBoundary bc);
SiBoundary parse_si_boundary(const std::string& s);

constexpr double kSitePercolationPc = 0.592746;

struct SiParams {
  double alpha = 1.0;
  double q = 2.0;
  double p_edge() const { return alpha / (1.0 + alpha); }
  bool uniqueness_regime() const { return alpha > 3.0 * kSitePercolationPc / (1.0 - kSitePercolationPc); }
};

// The free crosses Delta plus a frozen pad of boundary crosses, with the
// faces incident to any of them. Faces touching a site outside the domain
// form the frame; each sublattice's frame is joined to its own ghost when
// that sublattice is wired.
class SiDomain {
 public:
  // Uniform boundary: pad = sites within Chebyshev distance `depth` of Delta.
  static std::shared_ptr<const SiDomain> uniform(std::vector<Coord> delta, SiBoundary bc, int depth = 1);
  static std::shared_ptr<const SiDomain> explicit_tau(std::vector<Coord> delta,
                                                      std::vector<std::pair<Coord, int8_t>> pad,
                                                      bool primal_wired, bool dual_wired);
  static std::shared_ptr<const SiDomain> diamond(const DiamondDomain& dom, SiBoundary bc);

  int num_delta() const { return num_delta_; }
  int num_sites() const { return static_cast<int>(sites_.size()); }
  const Coord& site(int i) const { return sites_[i]; }
  int site_index(const Coord& x) const;  // -1 when absent
  int8_t pad_state(int i) const { return pad_state_[i]; }
  SiBoundary boundary() const { return bc_; }
  bool wired(int sub) const { return wired_[sub]; }

  int num_faces() const { return static_cast<int>(faces_.size()); }
  const Coord& face(int f) const { return faces_[f]; }
  int face_index(const Coord& f) const;
  bool frame(int f) const { return frame_[f]; }
  bool delta_face(int f) const { return delta_face_[f]; }
  int ghost(int sub) const { return num_faces() + sub; }
  // Face pair of the site's primal (sub = 0) or dual (sub = 1) edge.
  const std::array<int, 2>& edge_faces(int site, int sub) const { return edge_faces_[site][sub]; }
  // (site, other face) along the same-sublattice edges of a face.
  const std::vector<std::pair<int, int>>& face_adjacency(int f) const { return adj_[f]; }
  const std::vector<int>& frame_faces(int sub) const { return frame_faces_[sub]; }

 private:
  void build(std::vector<Coord> delta, std::vector<std::pair<Coord, int8_t>> pad);

  int num_delta_ = 0;
  std::vector<Coord> sites_;
  std::vector<int8_t> pad_state_;
  SiBoundary bc_ = SiBoundary::Explicit;
  std::array<bool, 2> wired_{};
  std::vector<Coord> faces_;
  std::vector<uint8_t> frame_, delta_face_;
  std::vector<std::array<std::array<int, 2>, 2>> edge_faces_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  std::array<std::vector<int>, 2> frame_faces_;
};

using SiDomainPtr = std::shared_ptr<const SiDomain>;

struct SuperimposedConfig {
  SiDomainPtr domain;
  std::vector<int8_t> state;  // every site; pad entries fixed

  SuperimposedConfig() = default;
  // Delta filled with `fill`, pad from the domain.
  SuperimposedConfig(SiDomainPtr dom, int8_t fill);
  bool primal_open(int site) const { return state[site] >= 0; }
  bool dual_open(int site) const { return state[site] <= 0; }
  bool edge_open(int site, int sub) const { return sub == 0 ? primal_open(site) : dual_open(site); }
  std::vector<int8_t> delta_states() const { return {state.begin(), state.begin() + domain->num_delta()}; }
};

// N_Delta: open crosses (Both) among Delta sites.
int si_open_crosses(const SuperimposedConfig& cfg);
// k_Delta per sublattice: clusters, ghosts included, meeting a Delta-incident face.
std::array<int, 2> si_cluster_counts(const SuperimposedConfig& cfg);
Rational si_weight(const SuperimposedConfig& cfg, const Rational& alpha, const Rational& q);

// a, b: whether the primal (dual) endpoints of the cross are joined off it.
std::pair<bool, bool> cross_connectivity(const SuperimposedConfig& cfg, int site);

// Probabilities of (PrimalOnly, Both, DualOnly).
template <class T>
std::array<T, 3> cross_conditional(bool a, bool b, const T& alpha, const T& q) {
  T wp = b ? T(1) : q;
  T wd = a ? T(1) : q;
  T z = wp + alpha + wd;
  return {wp / z, alpha / z, wd / z};
}
std::array<double, 3> cross_conditional(const SuperimposedConfig& cfg, int site, const SiParams& params);

// Inverse CDF in the order +1, 0, -1 driven by the uniform u.
int8_t si_heat_bath_step(SuperimposedConfig& cfg, int site, double u, const SiParams& params);

struct HolleyReport {
  bool pass = true;
  long pairs = 0;
  long violations = 0;
  std::string counterexample;
};
// Exhaustive Holley check on the 3x3 block around one cross, over all
// ordered pairs of neighbour states and frame wirings.
HolleyReport holley_check(const Rational& alpha, const Rational& q);

// Exact sample by monotone CFTP from all PrimalOnly and all DualOnly.
SuperimposedConfig si_cftp(SiDomainPtr dom, const SiParams& params, uint64_t seed, CftpStats* stats = nullptr,
                           int64_t max_sweeps = kMaxCftpSweeps);
SuperimposedConfig si_heat_bath(SiDomainPtr dom, const SiParams& params, int64_t sweeps, uint64_t seed);

struct UniquenessRow {
  int n = 0;
  long samples = 0;
  double tv = 0.0;          // centre-cross marginal, wired-free vs free-wired
  double both_fraction = 0.0;
  double both_stderr = 0.0;
  double both_bound = 0.0;  // alpha / (max(2, q + 1) + alpha)
};
std::vector<UniquenessRow> uniqueness_probe(const SiParams& params, const std::vector<int>& sizes, long samples,
                                            uint64_t seed, bool parallel = true);

struct DmpReport {
  bool pass = false;
  long states = 0;
  std::string detail;
};
// Exact comparison on Delta of the law under an explicit tau (every circuit
// site Both) against the wired-wired law. Throws when tau breaks the circuit.
DmpReport circuit_dmp_check(SiDomainPtr tau_domain, const std::vector<Coord>& circuit, const Rational& alpha,
                            const Rational& q);

// One line per row of sites, top row first; '.' marks sites outside the domain.
std::string to_text(const SuperimposedConfig& cfg);

}  // namespace ffgrad
