#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffgrad/percolation.hpp"
#include "ffgrad/rational.hpp"

namespace ffgrad {

// Boundary condition comes from the window shell: wired windows contract the
// outside into the ghost, free windows have no shell edges.
struct FkParams {
  double p = 0.5;
  double q = 1.0;
};

class CftpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr int64_t kMaxCftpSweeps = int64_t(1) << 24;

// Whether the endpoints of e are joined by open edges other than e.
bool connected_off(const PercolationConfig& cfg, int e);

template <class T>
T fk_open_probability(bool connected, const T& p, const T& q) {
  if (connected) return p;
  return p / (p + q * (T(1) - p));
}

double fk_conditional(const PercolationConfig& cfg, int e, const FkParams& params);
// Heat-bath update of edge e driven by the uniform u: open iff u < P(open).
void fk_heat_bath_step(PercolationConfig& cfg, int e, double u, const FkParams& params);

struct CftpStats {
  int64_t horizon = 0;  // steps run from the final horizon
  int64_t total_steps = 0;
};

// Exact sample by monotone coupling from the past; requires q >= 1.
PercolationConfig fk_cftp(WindowPtr window, const FkParams& params, uint64_t seed, CftpStats* stats = nullptr,
                          int64_t max_sweeps = kMaxCftpSweeps);
// Approximate sample: the given number of random-scan sweeps from all closed.
PercolationConfig fk_heat_bath(WindowPtr window, const FkParams& params, int64_t sweeps, uint64_t seed);

struct PottsConfig {
  WindowPtr window;
  int q = 2;
  std::vector<int> spin;  // real vertices; the ghost of a wired window is 0
};

double p_from_beta(double beta);
double beta_from_p(double p);

// Uniform colour per cluster; the ghost cluster of a wired window gets 0.
PottsConfig potts_from_fk(const ClusterLabeling& lab, int q, uint64_t seed);
// Monochromatic edges open with probability p; shell edges see the ghost at 0.
PercolationConfig fk_from_potts(const PottsConfig& sigma, double p, uint64_t seed);

struct OrientedValue {
  int u = 0;
  int v = 0;
  int value = 0;
};
// (sigma_v - sigma_u) mod q along every internal window edge.
std::vector<OrientedValue> gradient_of_potts(const PottsConfig& sigma);
// Fraction of internal window edges whose endpoints agree.
double energy_stat(const PottsConfig& sigma);

// Unnormalized weights. The FK cluster count includes the ghost cluster.
Rational fk_weight(const PercolationConfig& cfg, const Rational& p, const Rational& q);
// exp(-beta H) up to a constant, written as (1 - p)^{#disagreeing edges}.
Rational potts_weight(const PottsConfig& sigma, const Rational& p);
// Edwards-Sokal joint weight; zero when an open edge joins unequal spins.
Rational es_weight(const PercolationConfig& omega, const PottsConfig& sigma, const Rational& p);

}  // namespace ffgrad
