#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "ffgrad/lattice.hpp"
#include "ffgrad/percolation.hpp"
#include "ffgrad/rational.hpp"
#include "ffgrad/superimposed.hpp"

namespace ffgrad {

// Outcome of one verification run. Informational results are reported but
// never fail a run.
struct SuiteResult {
  std::string name;
  bool pass = false;
  bool informational = false;
  nlohmann::json detail = nlohmann::json::object();
};

// Z^{spin,ij} = Z^{SI,11} / 4 on diamonds of the given radii; radius 2 is
// also checked by full enumeration of the superimposed side.
SuiteResult verify_partition_identity(const std::vector<int>& radii, const std::vector<Rational>& alphas);

// Joint FK-Potts law against both conditional descriptions on a wired box.
SuiteResult verify_es_coupling_potts(int side, int q, const Rational& p);
// Joint spin-superimposed law against both conditional descriptions, all four
// (i, j). Free faces are those with all four corners in Delta; the others
// follow the (i, j) pattern. With a diamond, the spin marginal is also
// compared with enumerate_spin.
SuiteResult verify_es_coupling_si(SiDomainPtr wired_wired, const Rational& alpha, const DiamondDomain* dom = nullptr);

SuiteResult verify_holley(const Rational& alpha, const Rational& q);

// Exact detailed balance of the random-scan heat baths, plus agreement of
// the floating-point conditionals used by the samplers.
SuiteResult verify_detailed_balance_fk(WindowPtr w, const Rational& p, const Rational& q);
SuiteResult verify_detailed_balance_si(SiDomainPtr dom, const Rational& alpha, const Rational& q);

// grad_edge against offline sigma differences on every internal edge, and
// witness perturbations on `queries` determined edges per configuration
// (the largest-radius one first).
SuiteResult verify_cluster_tree(int side, double p, int q, long configs, int queries, int perturbations,
                                uint64_t seed);

// Round trips, gradient identities and saddle equivalence on random heights.
SuiteResult verify_transforms(int n, long heights, uint64_t seed);

// P(sigma_u = j) and P(sigma_u sigma_v = ij) against boundary-cluster
// connection probabilities, exact, on a diamond.
SuiteResult verify_correlation_identity(int n, const Rational& alpha);

// Circuit domain Markov fixtures, the rejection case and a negative control.
SuiteResult verify_dmp(const Rational& alpha, const Rational& q, uint64_t seed);

// (1/(2+alpha), alpha/(2+alpha), 1/(2+alpha)) for random rational alpha,
// against both the closed form and weight ratios.
SuiteResult verify_saddle_trichotomy(int trials, uint64_t seed);

// Empirical law of CFTP samples against the oracle. The detail records the
// TV an exact sampler would show at this sample size.
SuiteResult cftp_fk_vs_oracle(WindowPtr w, const Rational& p, const Rational& q, long samples, uint64_t seed,
                              double tv_tol);
SuiteResult cftp_si_vs_oracle(SiDomainPtr dom, const Rational& alpha, const Rational& q, long samples,
                              uint64_t seed, double tv_tol);

// |grad_d h| from the pipeline against the height-enumeration pushforward.
SuiteResult pipeline_vs_oracle(int n, const Rational& alpha, long samples, uint64_t seed, double p_min);

// Trend probes: energy-statistic spread over box sides (Ising via q = 2
// wired FK), and wired-free vs free-wired centre TV over diamond radii.
SuiteResult energy_trend(const std::vector<int>& sides, double beta, long samples, uint64_t seed);
SuiteResult uniqueness_trend(const SiParams& params, const std::vector<int>& radii, long samples, uint64_t seed);

// Expected TV between an exact sampler's histogram and the law, to first order.
double expected_tv(const std::vector<double>& prob, long samples);

}  // namespace ffgrad
