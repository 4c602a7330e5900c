#include <omp.h>

#include <stdexcept>

#include "doctest.h"
#include "ffgrad/random_cluster.hpp"
#include "ffgrad/replicas.hpp"
#include "ffgrad/rng.hpp"
#include "ffgrad/sixvertex.hpp"
#include "ffgrad/superimposed.hpp"

using namespace ffgrad;

namespace {

// Forces several threads even on a single core so the parallel path is exercised.
struct Threads {
  int saved = omp_get_max_threads();
  explicit Threads(int n) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("results come back in index order") {
  Threads t(4);
  auto out = run_replicas(1000, [](long i) { return i * i; });
  REQUIRE(out.size() == 1000);
  for (long i = 0; i < 1000; ++i) CHECK(out[i] == i * i);
  CHECK(run_replicas(0, [](long i) { return i; }).empty());
}

TEST_CASE("exceptions propagate") {
  Threads t(4);
  auto boom = [](long i) -> int {
    if (i == 17) throw std::runtime_error("replica 17");
    return int(i);
  };
  CHECK_THROWS_WITH_AS(run_replicas(64, boom), "replica 17", std::runtime_error);
  CHECK_THROWS_AS(run_replicas(64, boom, false), std::runtime_error);
}

TEST_CASE("serial and parallel samplers agree") {
  Threads t(4);
  auto w = Window::box({4, 4}, Shell::Wired);
  auto fk = [&](long i) { return fk_cftp(w, {0.6, 2.0}, derive_seed(5, i)).open; };
  CHECK(run_replicas(64, fk, true) == run_replicas(64, fk, false));

  auto sd = SiDomain::diamond(diamond(Coord{0, 0}, 4), SiBoundary::WiredWired);
  auto si = [&](long i) { return si_cftp(sd, {4.5, 2.0}, derive_seed(6, i)).state; };
  CHECK(run_replicas(32, si, true) == run_replicas(32, si, false));

  auto dom = diamond(Coord{0, 0}, 2);
  auto pipe = [&](long i) {
    std::vector<int> v;
    for (const auto& e : abs_diag_grad_pipeline(dom, 4.5, derive_seed(7, i))) v.push_back(e.value.value);
    return v;
  };
  CHECK(run_replicas(32, pipe, true) == run_replicas(32, pipe, false));
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(42, 3) == derive_seed(42, 3));
  uint64_t state = 42;
  splitmix64_next(state);
  splitmix64_next(state);
  splitmix64_next(state);
  CHECK(derive_seed(42, 3) == splitmix64_next(state));
  CHECK(replica_threads() >= 1);
}
