#include <json.hpp>

#include "doctest.h"
#include "ffgrad/oracle.hpp"
#include "ffgrad/rng.hpp"
#include "ffgrad/sixvertex.hpp"
#include "ffgrad/superimposed.hpp"

using namespace ffgrad;

TEST_CASE("fk single edge") {
  auto w = Window::box({2, 1}, Shell::Free);
  REQUIRE(w->num_edges() == 1);
  auto t = enumerate_fk(w, Rational(1, 2), Rational(2));
  REQUIRE(t.size() == 2);
  CHECK(marginal(t, [](const State& s) { return s[0] == 1; }) == Rational(1, 3));
  CHECK(marginal(t, [](const State&) { return true; }) == 1);
}

TEST_CASE("fk edge marginal matches the single-edge conditional") {
  auto w = Window::box({2, 2}, Shell::Wired);
  const Rational p(3, 5), q(2);
  auto t = enumerate_fk(w, p, q);
  CHECK(t.size() == (size_t(1) << w->num_edges()));
  for (int e = 0; e < w->num_edges(); ++e) {
    // Average of the conditional over the table equals the marginal.
    Rational avg = 0;
    for (size_t i = 0; i < t.size(); ++i) {
      PercolationConfig cfg(w, false);
      for (int k = 0; k < w->num_edges(); ++k) cfg.open[k] = t.states[i][k];
      avg += t.probability(i) * fk_open_probability(connected_off(cfg, e), p, q);
    }
    CHECK(avg == marginal(t, [e](const State& s) { return s[e] == 1; }));
  }
}

TEST_CASE("superimposed single cross") {
  auto dom = SiDomain::uniform({Coord{0, 0}}, SiBoundary::WiredWired);
  auto t = enumerate_superimposed(dom, Rational(2), Rational(1));
  REQUIRE(t.size() == 3);
  CHECK(marginal(t, [](const State& s) { return s[0] == kBoth; }) == Rational(1, 2));
  CHECK(t.states[0][0] == kDualOnly);
  CHECK(t.states[2][0] == kPrimalOnly);
}

TEST_CASE("superimposed transfer agrees with enumeration") {
  const Rational alpha(7, 3);
  for (auto bc : {SiBoundary::WiredWired, SiBoundary::WiredFree, SiBoundary::FreeWired}) {
    for (Rational q : {Rational(1, 2), Rational(1), Rational(2), Rational(4)}) {
      auto blk = SiDomain::uniform({Coord{0, 0}, Coord{1, 0}, Coord{0, 1}, Coord{1, 1}, Coord{2, 1}}, bc);
      CHECK(si_partition_function(blk, alpha, q) == enumerate_superimposed(blk, alpha, q).Z);
    }
    auto dia = SiDomain::diamond(diamond(Coord{0, 0}, 2), bc);
    CHECK(si_partition_function(dia, alpha, Rational(2)) == enumerate_superimposed(dia, alpha, Rational(2)).Z);
  }
  std::vector<std::pair<Coord, int8_t>> pad = {{Coord{-1, 0}, kPrimalOnly}, {Coord{1, 0}, kDualOnly},
                                               {Coord{0, 1}, kBoth}, {Coord{0, -1}, kBoth}};
  auto tau = SiDomain::explicit_tau({Coord{0, 0}}, pad, true, false);
  CHECK(si_partition_function(tau, alpha, Rational(3)) == enumerate_superimposed(tau, alpha, Rational(3)).Z);
}

TEST_CASE("height enumeration") {
  auto dom = diamond(Coord{0, 0}, 2);
  auto t = enumerate_height(dom, 0, Rational(3));
  CHECK(t.size() == 18);
  CHECK(t.Z == Rational(301714998930L));
  for (int m : {1, 2, -7}) CHECK(enumerate_height(dom, m, Rational(3)).Z == t.Z);

  // Brute force over a box of values for the five free faces.
  std::vector<int> free;
  for (int i = 0; i < static_cast<int>(dom.faces.size()); ++i)
    if (dom.dist(dom.faces[i]) < dom.n) free.push_back(i);
  REQUIRE(free.size() == 5);
  Rational z = 0;
  long count = 0;
  HeightFunction h = flat_height(dom, 0);
  for (long code = 0; code < 59049; ++code) {
    long c = code;
    for (int k : free) {
      h.values[k] = int(c % 9) - 4;
      c /= 9;
    }
    if (!validate_height(h).empty()) continue;
    ++count;
    z += rpow(Rational(3), height_saddles(h, dom.hat_vertices));
  }
  CHECK(count == 18);
  CHECK(z == t.Z);
}

TEST_CASE("heights push forward to spins") {
  auto dom = std::make_shared<const DiamondDomain>(diamond(Coord{0, 0}, 2));
  for (int m : {0, 1, 2, 3}) {
    const Rational c(7, 2);
    auto heights = enumerate_height(*dom, m, c);
    auto [i, j] = spin_boundary(m);
    auto spins = enumerate_spin(*dom, i, j, c);
    auto push = pushforward(heights, [&](const State& s) {
      HeightFunction h{dom->faces, std::vector<int>(s.begin(), s.end()), m};
      return height_to_spin(h, dom).spin;
    });
    REQUIRE(push.size() == spins.size());
    for (size_t k = 0; k < spins.size(); ++k) CHECK(push.at(spins.states[k]) == spins.probability(k));
    // The circuit vertices of the flat boundary are always saddles.
    const int circuit = static_cast<int>(dom->hat_vertices.size() - dom->internal_vertices.size());
    CHECK(heights.Z == spins.Z * rpow(c, circuit));
  }
}

TEST_CASE("spin enumeration against brute force") {
  auto dom = std::make_shared<const DiamondDomain>(diamond(Coord{0, 0}, 2));
  for (int8_t i : {1, -1})
    for (int8_t j : {1, -1}) {
      auto t = enumerate_spin(*dom, i, j, Rational(3), false);
      std::vector<int> free;
      for (int k = 0; k < static_cast<int>(dom->faces.size()); ++k)
        if (dom->dist(dom->faces[k]) < dom->n) free.push_back(k);
      Rational z = 0;
      long count = 0;
      for (int code = 0; code < (1 << free.size()); ++code) {
        SpinConfig s{dom, std::vector<int8_t>(dom->faces.size(), j), i, j};
        for (size_t k = 0; k < free.size(); ++k) s.spin[free[k]] = (code >> k) & 1 ? 1 : -1;
        if (!validate_spin(s).empty()) continue;
        ++count;
        z += rpow(Rational(3), spin_saddles(s));
        CHECK(t.index_of(s.spin) >= 0);
      }
      CHECK(long(t.size()) == count);
      CHECK(t.Z == z);
      CHECK(enumerate_spin(*dom, i, j, Rational(3), true).Z == t.Z);
    }
}

TEST_CASE("marginals and total variation") {
  auto w = Window::box({2, 2}, Shell::Free);
  auto t = enumerate_fk(w, Rational(1, 3), Rational(3, 2));
  auto ev = [](const State& s) { return s[0] == 1 && s[1] == 0; };
  CHECK(marginal(t, ev) + marginal(t, [&](const State& s) { return !ev(s); }) == 1);

  std::map<State, long> exact;
  for (size_t i = 0; i < t.size(); ++i) exact[t.states[i]] = 0;
  // Empirical counts proportional to the weights: TV 0 up to rounding.
  Rational scale = Rational(1000000) / t.Z;
  long n = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    Rational c = t.weight[i] * scale;
    exact[t.states[i]] = static_cast<long>(to_double(c) + 0.5);
    n += exact[t.states[i]];
  }
  CHECK(tv_distance(t, exact) < 1e-5);
  std::map<State, long> off_support = {{State(w->num_edges(), 7), 10}};
  CHECK(tv_distance(t, off_support) == doctest::Approx(1.0));

  // Calibration: 10^5 draws from a three-state table.
  auto one = SiDomain::uniform({Coord{0, 0}}, SiBoundary::WiredWired);
  auto three = enumerate_superimposed(one, Rational(3, 2), Rational(2));
  Rng rng(99);
  int over = 0;
  for (int rep = 0; rep < 20; ++rep) {
    std::map<State, long> hist;
    for (int k = 0; k < 100000; ++k) {
      double u = rng.uniform(), acc = 0.0;
      size_t pick = three.size() - 1;
      for (size_t s = 0; s < three.size(); ++s) {
        acc += to_double(three.probability(s));
        if (u < acc) {
          pick = s;
          break;
        }
      }
      ++hist[three.states[pick]];
    }
    over += tv_distance(three, hist) > 0.01;
  }
  CHECK(over == 0);
}

TEST_CASE("size caps") {
  auto big = Window::box({6, 6}, Shell::Free);
  CHECK_THROWS_AS(enumerate_fk(big, Rational(1, 2), Rational(2)), OracleSizeError);
  std::vector<Coord> sites;
  for (int x = 0; x < 5; ++x)
    for (int y = 0; y < 4; ++y) sites.push_back(Coord{x, y});
  CHECK_THROWS_AS(enumerate_superimposed(SiDomain::uniform(sites, SiBoundary::WiredWired), 1, 2), OracleSizeError);
  // The transfer handles what enumeration refuses.
  CHECK(si_partition_function(SiDomain::uniform(sites, SiBoundary::WiredWired), 1, 2) > 0);
}

TEST_CASE("json export") {
  auto t = enumerate_superimposed(SiDomain::uniform({Coord{0, 0}}, SiBoundary::WiredWired), Rational(1, 3), 2);
  auto j = nlohmann::json::parse(to_json(t));
  CHECK(j["model"] == "superimposed");
  CHECK(j["states"].size() == 3);
  Rational z(j["Z"]["num"].get<std::string>() + "/" + j["Z"]["den"].get<std::string>());
  z.canonicalize();
  CHECK(z == t.Z);
  CHECK(j["states"][1]["state"][0] == 0);
}
