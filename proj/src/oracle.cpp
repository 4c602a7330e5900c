#include "ffgrad/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <json.hpp>

#include "ffgrad/random_cluster.hpp"
#include "ffgrad/replicas.hpp"
#include "ffgrad/sixvertex.hpp"
#include "ffgrad/superimposed.hpp"

namespace ffgrad {

namespace {

void check_size(double states, double cap, const std::string& what) {
  if (states > cap) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: %.3g states exceed the enumeration cap %.3g", what.c_str(), states, cap);
    throw OracleSizeError(buf);
  }
}

// Enumerates base^len codes with digit 0 most significant, so states come
// out in lexicographic order. Codes are split into prefix blocks that run
// as independent replicas; zero-weight states are dropped.
ExactTable enumerate_codes(const std::string& model, int len, int base, const std::vector<int8_t>& digit_value,
                           const std::function<Rational(const State&)>& weight, bool parallel) {
  long total = 1;
  for (int i = 0; i < len; ++i) total *= base;
  int prefix_len = 0;
  long blocks = 1;
  while (prefix_len < len && blocks * base <= 4096) {
    blocks *= base;
    ++prefix_len;
  }
  const long per_block = total / blocks;
  struct Part {
    std::vector<State> states;
    std::vector<Rational> weight;
  };
  auto parts = run_replicas(
      blocks,
      [&](long b) {
        Part part;
        State s(len);
        for (long k = 0; k < per_block; ++k) {
          long code = b * per_block + k;
          for (int i = len - 1; i >= 0; --i, code /= base) s[i] = digit_value[code % base];
          Rational w = weight(s);
          if (w != 0) {
            part.states.push_back(s);
            part.weight.push_back(std::move(w));
          }
        }
        return part;
      },
      parallel);
  ExactTable t;
  t.model = model;
  t.Z = 0;
  for (auto& part : parts) {
    for (size_t i = 0; i < part.states.size(); ++i) {
      t.Z += part.weight[i];
      t.states.push_back(std::move(part.states[i]));
      t.weight.push_back(std::move(part.weight[i]));
    }
  }
  return t;
}

}  // namespace

long ExactTable::index_of(const State& s) const {
  auto it = std::lower_bound(states.begin(), states.end(), s);
  return it != states.end() && *it == s ? static_cast<long>(it - states.begin()) : -1;
}

ExactTable enumerate_fk(WindowPtr w, const Rational& p, const Rational& q, bool parallel) {
  const int m = w->num_edges();
  check_size(std::pow(2.0, m), kMaxBinaryStates, "enumerate_fk");
  return enumerate_codes(
      "fk", m, 2, {0, 1},
      [&](const State& s) {
        PercolationConfig cfg(w, false);
        for (int e = 0; e < m; ++e) cfg.open[e] = static_cast<uint8_t>(s[e]);
        return fk_weight(cfg, p, q);
      },
      parallel);
}

ExactTable enumerate_potts(WindowPtr w, const Rational& p, int q, bool parallel) {
  const int n = w->num_vertices();
  check_size(std::pow(double(q), n), kMaxBinaryStates, "enumerate_potts");
  std::vector<int8_t> digits(q);
  for (int c = 0; c < q; ++c) digits[c] = static_cast<int8_t>(c);
  return enumerate_codes(
      "potts", n, q, digits,
      [&](const State& s) {
        PottsConfig sigma{w, q, std::vector<int>(s.begin(), s.end())};
        return potts_weight(sigma, p);
      },
      parallel);
}

ExactTable enumerate_superimposed(std::shared_ptr<const SiDomain> dom, const Rational& alpha, const Rational& q,
                                  bool parallel) {
  const int n = dom->num_delta();
  check_size(std::pow(3.0, n), kMaxTernaryStates, "enumerate_superimposed");
  return enumerate_codes(
      "superimposed", n, 3, {kDualOnly, kBoth, kPrimalOnly},
      [&](const State& s) {
        SuperimposedConfig cfg(dom, kBoth);
        std::copy(s.begin(), s.end(), cfg.state.begin());
        return si_weight(cfg, alpha, q);
      },
      parallel);
}

ExactTable enumerate_height(const DiamondDomain& dom, int m, const Rational& c) {
  HeightFunction h = flat_height(dom, m);
  std::vector<int> free;
  for (int i = 0; i < static_cast<int>(dom.faces.size()); ++i)
    if (dom.dist(dom.faces[i]) < dom.n) free.push_back(i);
  // Heights stay within the boundary value plus or minus the distance to it.
  ExactTable t;
  t.model = "height";
  t.Z = 0;
  std::function<void(size_t)> dfs = [&](size_t k) {
    if (k == free.size()) {
      if (!validate_height(h).empty()) return;
      Rational w = rpow(c, height_saddles(h, dom.hat_vertices));
      t.states.emplace_back(h.values.begin(), h.values.end());
      t.Z += w;
      t.weight.push_back(std::move(w));
      return;
    }
    const int fi = free[k];
    const Coord& f = dom.faces[fi];
    const int base = boundary_height(m, parity(f));
    const int slack = dom.n - dom.dist(f);
    for (int v = base - 2 * ((slack + 1) / 2) - 2; v <= base + 2 * ((slack + 1) / 2) + 2; v += 2) {
      bool ok = true;
      for (const auto& g : face_neighbors(f)) {
        int gi = h.index(g);
        bool assigned = gi < 0 || dom.dist(g) >= dom.n ||
                        std::find(free.begin(), free.begin() + k, gi) != free.begin() + k;
        if (assigned && std::abs(h.value(g) - v) != 1) ok = false;
      }
      if (!ok) continue;
      h.values[fi] = v;
      dfs(k + 1);
    }
    h.values[fi] = base;
  };
  dfs(0);
  // DFS order follows the face order, so states are already sorted.
  if (!std::is_sorted(t.states.begin(), t.states.end())) throw std::logic_error("enumerate_height: unsorted states");
  return t;
}

ExactTable enumerate_spin(const DiamondDomain& dom, int8_t i, int8_t j, const Rational& c, bool parallel) {
  auto shared = std::make_shared<const DiamondDomain>(dom);
  std::vector<int> free;
  std::vector<int> pos(dom.faces.size(), -1);
  for (int k = 0; k < static_cast<int>(dom.faces.size()); ++k)
    if (dom.dist(dom.faces[k]) < dom.n) {
      pos[k] = static_cast<int>(free.size());
      free.push_back(k);
    }
  const int n = static_cast<int>(free.size());
  // Each hat vertex is checked once its last free face is assigned.
  std::vector<std::vector<std::array<Coord, 4>>> check_at(n);
  for (const auto& x : dom.hat_vertices) {
    auto around = faces_around(x);
    int last = -1;
    for (const auto& f : around) {
      auto it = std::lower_bound(dom.faces.begin(), dom.faces.end(), f);
      if (it != dom.faces.end() && *it == f) last = std::max(last, pos[it - dom.faces.begin()]);
    }
    if (last >= 0) check_at[last].push_back(around);
  }
  SpinConfig base;
  base.dom = shared;
  base.i = i;
  base.j = j;
  base.spin.assign(dom.faces.size(), j);
  auto ice_ok = [](const SpinConfig& sc, const std::vector<std::array<Coord, 4>>& vs) {
    for (const auto& a : vs)  // SW, SE, NW, NE
      if (sc.at(a[0]) != sc.at(a[3]) && sc.at(a[1]) != sc.at(a[2])) return false;
    return true;
  };
  const int prefix = std::min(n, 12);
  struct Part {
    std::vector<State> states;
    std::vector<Rational> weight;
  };
  long visited = 0;
  auto parts = run_replicas(
      1L << prefix,
      [&](long b) {
        Part part;
        SpinConfig sc = base;
        for (int k = 0; k < prefix; ++k) {
          sc.spin[free[k]] = (b >> (prefix - 1 - k)) & 1 ? 1 : -1;
          if (!ice_ok(sc, check_at[k])) return part;
        }
        std::function<void(int)> dfs = [&](int k) {
          if (k == n) {
            if (!validate_spin(sc).empty()) return;
            part.states.push_back(sc.spin);
            part.weight.push_back(rpow(c, spin_saddles(sc)));
            long seen;
#pragma omp atomic capture
            seen = ++visited;
            check_size(double(seen), kMaxBinaryStates, "enumerate_spin");
            return;
          }
          for (int8_t v : {-1, 1}) {
            sc.spin[free[k]] = v;
            if (ice_ok(sc, check_at[k])) dfs(k + 1);
          }
          sc.spin[free[k]] = j;
        };
        dfs(prefix);
        return part;
      },
      parallel);
  ExactTable t;
  t.model = "spin";
  t.Z = 0;
  for (auto& part : parts)
    for (size_t k = 0; k < part.states.size(); ++k) {
      t.Z += part.weight[k];
      t.states.push_back(std::move(part.states[k]));
      t.weight.push_back(std::move(part.weight[k]));
    }
  // Blocks and branches run -1 before +1 in face order; fixed faces are constant.
  if (!std::is_sorted(t.states.begin(), t.states.end())) throw std::logic_error("enumerate_spin: unsorted states");
  return t;
}

Rational si_partition_function(std::shared_ptr<const SiDomain> dom, const Rational& alpha, const Rational& q) {
  const SiDomain& d = *dom;
  const int nf = d.num_faces();
  const int nd = d.num_delta();
  // Contract the frozen part: pad edges and ghost joins.
  std::vector<int> parent(nf + 2);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  SuperimposedConfig fixed(dom, kBoth);
  for (int s = nd; s < d.num_sites(); ++s)
    for (int sub = 0; sub < 2; ++sub)
      if (fixed.edge_open(s, sub)) parent[find(d.edge_faces(s, sub)[0])] = find(d.edge_faces(s, sub)[1]);
  for (int sub = 0; sub < 2; ++sub)
    if (d.wired(sub))
      for (int f : d.frame_faces(sub)) parent[find(f)] = find(d.ghost(sub));
  // Every node touched by a Delta edge holds a Delta-incident face, so each
  // block leaving the frontier is one counted cluster.
  std::vector<std::array<int, 4>> ends(nd);
  std::vector<int> first(nf + 2, nd), last(nf + 2, -1);
  for (int s = 0; s < nd; ++s)
    for (int k = 0; k < 4; ++k) {
      int x = find(d.edge_faces(s, k / 2)[k % 2]);
      ends[s][k] = x;
      first[x] = std::min(first[x], s);
      last[x] = std::max(last[x], s);
    }
  using Key = std::vector<uint8_t>;
  std::vector<int> frontier;  // sorted node ids
  std::map<Key, Rational> layer;
  layer[Key{}] = 1;
  for (int s = 0; s < nd; ++s) {
    std::vector<int> nodes = frontier;
    for (int k = 0; k < 4; ++k)
      if (first[ends[s][k]] == s) nodes.push_back(ends[s][k]);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    auto slot = [&](int x) { return static_cast<int>(std::lower_bound(nodes.begin(), nodes.end(), x) - nodes.begin()); };
    std::vector<int> next_frontier;
    std::vector<uint8_t> keep(nodes.size());
    for (size_t k = 0; k < nodes.size(); ++k) {
      keep[k] = last[nodes[k]] > s;
      if (keep[k]) next_frontier.push_back(nodes[k]);
    }
    const int p0 = slot(ends[s][0]), p1 = slot(ends[s][1]), d0 = slot(ends[s][2]), d1 = slot(ends[s][3]);
    std::map<Key, Rational> next;
    for (const auto& [key, w] : layer) {
      std::vector<int> label(nodes.size());
      int fresh = 0;
      for (size_t k = 0, f = 0; k < nodes.size(); ++k) {
        if (f < frontier.size() && frontier[f] == nodes[k]) {
          label[k] = key[f++];
          fresh = std::max(fresh, label[k] + 1);
        } else {
          label[k] = -1;
        }
      }
      for (auto& l : label)
        if (l < 0) l = fresh++;
      for (int8_t state : {kPrimalOnly, kBoth, kDualOnly}) {
        std::vector<int> lab = label;
        auto join = [&](int a, int b) {
          int from = lab[b], to = lab[a];
          if (from != to)
            for (auto& l : lab)
              if (l == from) l = to;
        };
        if (state >= 0) join(p0, p1);
        if (state <= 0) join(d0, d1);
        std::vector<uint8_t> live(fresh, 0), dead(fresh, 0);
        for (size_t k = 0; k < nodes.size(); ++k) (keep[k] ? live : dead)[lab[k]] = 1;
        int closed = 0;
        for (int l = 0; l < fresh; ++l) closed += dead[l] && !live[l];
        Key out;
        std::vector<int> canon(fresh, -1);
        int used = 0;
        for (size_t k = 0; k < nodes.size(); ++k)
          if (keep[k]) {
            if (canon[lab[k]] < 0) canon[lab[k]] = used++;
            out.push_back(static_cast<uint8_t>(canon[lab[k]]));
          }
        Rational v = w * rpow(q, closed);
        if (state == kBoth) v *= alpha;
        next[out] += v;
      }
    }
    layer = std::move(next);
    frontier = std::move(next_frontier);
  }
  if (layer.size() != 1 || !frontier.empty()) throw std::logic_error("si_partition_function: frontier not empty");
  return layer.begin()->second;
}

Rational marginal(const ExactTable& t, const std::function<bool(const State&)>& event) {
  Rational sum = 0;
  for (size_t i = 0; i < t.size(); ++i)
    if (event(t.states[i])) sum += t.weight[i];
  return sum / t.Z;
}

std::map<State, Rational> pushforward(const ExactTable& t, const std::function<State(const State&)>& key) {
  std::map<State, Rational> out;
  for (size_t i = 0; i < t.size(); ++i) out[key(t.states[i])] += t.weight[i];
  for (auto& [k, v] : out) v /= t.Z;
  return out;
}

double tv_distance(const ExactTable& t, const std::map<State, long>& empirical) {
  long n = 0;
  for (const auto& [s, c] : empirical) n += c;
  double tv = 0.0;
  std::vector<uint8_t> seen(t.size(), 0);
  for (const auto& [s, c] : empirical) {
    long i = t.index_of(s);
    double p = i < 0 ? 0.0 : to_double(t.probability(i));
    if (i >= 0) seen[i] = 1;
    tv += std::abs(p - double(c) / double(n));
  }
  for (size_t i = 0; i < t.size(); ++i)
    if (!seen[i]) tv += to_double(t.probability(i));
  return tv / 2.0;
}

std::string to_json(const ExactTable& t) {
  auto rat = [](const Rational& r) {
    return nlohmann::json{{"num", r.get_num().get_str()}, {"den", r.get_den().get_str()}};
  };
  nlohmann::json j;
  j["model"] = t.model;
  j["Z"] = rat(t.Z);
  nlohmann::json rows = nlohmann::json::array();
  for (size_t i = 0; i < t.size(); ++i) {
    std::vector<int> s(t.states[i].begin(), t.states[i].end());
    rows.push_back({{"state", s}, {"weight", rat(t.weight[i])}});
  }
  j["states"] = rows;
  return j.dump();
}

}  // namespace ffgrad
