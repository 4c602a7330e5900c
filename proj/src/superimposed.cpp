#include "ffgrad/superimposed.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "ffgrad/oracle.hpp"
#include "ffgrad/replicas.hpp"
#include "ffgrad/rng.hpp"

namespace ffgrad {

namespace {

struct Scratch {
  std::vector<uint32_t> mark;
  uint32_t stamp = 0;
  std::vector<int> qa, qb;
};

thread_local Scratch scratch;

int sub_of(const Coord& face) { return parity(face) == Parity::Even ? 0 : 1; }

std::array<Coord, 4> corners(const Coord& f) {
  return {f, Coord{f[0] + 1, f[1]}, Coord{f[0], f[1] + 1}, Coord{f[0] + 1, f[1] + 1}};
}

// Neighbours of a node in sublattice `sub`, skipping the edge of `skip`.
template <class F>
bool for_each_neighbour(const SuperimposedConfig& cfg, int sub, int node, int skip, F&& visit) {
  const SiDomain& d = *cfg.domain;
  if (node == d.ghost(sub)) {
    for (int f : d.frame_faces(sub))
      if (visit(f)) return true;
    return false;
  }
  for (const auto& [site, g] : d.face_adjacency(node))
    if (site != skip && cfg.edge_open(site, sub) && visit(g)) return true;
  if (d.wired(sub) && d.frame(node) && visit(d.ghost(sub))) return true;
  return false;
}

bool joined_off(const SuperimposedConfig& cfg, int sub, int site) {
  const SiDomain& d = *cfg.domain;
  const int a = d.edge_faces(site, sub)[0], b = d.edge_faces(site, sub)[1];
  Scratch& s = scratch;
  const size_t nodes = d.num_faces() + 2;
  if (s.mark.size() < nodes) s.mark.assign(nodes, 0);
  if (s.stamp > 0xFFFFFFF0u) {
    std::fill(s.mark.begin(), s.mark.end(), 0);
    s.stamp = 0;
  }
  const uint32_t sa = ++s.stamp, sb = ++s.stamp;
  s.qa.assign(1, a);
  s.qb.assign(1, b);
  s.mark[a] = sa;
  s.mark[b] = sb;
  size_t ia = 0, ib = 0;
  auto expand = [&](std::vector<int>& queue, size_t& head, uint32_t mine, uint32_t theirs) {
    int x = queue[head++];
    return for_each_neighbour(cfg, sub, x, site, [&](int y) {
      if (s.mark[y] == theirs) return true;
      if (s.mark[y] != mine) {
        s.mark[y] = mine;
        queue.push_back(y);
      }
      return false;
    });
  };
  while (ia < s.qa.size() && ib < s.qb.size()) {
    if (expand(s.qa, ia, sa, sb)) return true;
    if (expand(s.qb, ib, sb, sa)) return true;
  }
  return false;
}

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

void sorted_unique(std::vector<Coord>& xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}

}  // namespace

char cross_char(int8_t s) { return s > 0 ? 'P' : (s == 0 ? 'B' : 'D'); }

int8_t cross_from_char(char c) {
  switch (c) {
    case 'P':
      return kPrimalOnly;
    case 'B':
      return kBoth;
    case 'D':
      return kDualOnly;
    default:
      throw std::invalid_argument(std::string("unknown cross state '") + c + "'");
  }
}

const char* si_boundary_name(SiBoundary bc) {
  switch (bc) {
    case SiBoundary::WiredWired:
      return "wired-wired";
    case SiBoundary::WiredFree:
      return "wired-free";
    case SiBoundary::FreeWired:
      return "free-wired";
    default:
      return "explicit";
  }
}

SiBoundary parse_si_boundary(const std::string& s) {
  if (s == "wired-wired" || s == "11") return SiBoundary::WiredWired;
  if (s == "wired-free" || s == "10") return SiBoundary::WiredFree;
  if (s == "free-wired" || s == "01") return SiBoundary::FreeWired;
  throw std::invalid_argument("unknown boundary condition '" + s + "'");
}

void SiDomain::build(std::vector<Coord> delta, std::vector<std::pair<Coord, int8_t>> pad) {
  sorted_unique(delta);
  std::sort(pad.begin(), pad.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  num_delta_ = static_cast<int>(delta.size());
  sites_ = delta;
  pad_state_.assign(delta.size(), kBoth);
  std::unordered_map<Coord, int, CoordHash> index;
  for (int i = 0; i < num_delta_; ++i) index[sites_[i]] = i;
  for (const auto& [x, s] : pad) {
    if (s < -1 || s > 1) throw std::invalid_argument("SiDomain: invalid pad state");
    if (index.count(x)) {
      if (index[x] < num_delta_) continue;
      throw std::invalid_argument("SiDomain: duplicate pad site " + x.str());
    }
    index[x] = static_cast<int>(sites_.size());
    sites_.push_back(x);
    pad_state_.push_back(s);
  }
  std::vector<Coord> faces;
  for (const auto& x : sites_)
    for (const auto& f : faces_around(x)) faces.push_back(f);
  sorted_unique(faces);
  faces_ = faces;
  std::unordered_map<Coord, int, CoordHash> findex;
  for (int f = 0; f < num_faces(); ++f) findex[faces_[f]] = f;
  frame_.assign(faces_.size(), 0);
  delta_face_.assign(faces_.size(), 0);
  for (int f = 0; f < num_faces(); ++f)
    for (const auto& c : corners(faces_[f]))
      if (!index.count(c)) frame_[f] = 1;
  adj_.assign(faces_.size(), {});
  edge_faces_.resize(sites_.size());
  for (int s = 0; s < num_sites(); ++s) {
    Cross c = cross_of(sites_[s]);
    edge_faces_[s][0] = {findex.at(c.primal_edge.a), findex.at(c.primal_edge.b)};
    edge_faces_[s][1] = {findex.at(c.dual_edge.a), findex.at(c.dual_edge.b)};
    for (int sub = 0; sub < 2; ++sub) {
      auto [a, b] = edge_faces_[s][sub];
      adj_[a].emplace_back(s, b);
      adj_[b].emplace_back(s, a);
      if (s < num_delta_) delta_face_[a] = delta_face_[b] = 1;
    }
  }
  for (int sub = 0; sub < 2; ++sub) frame_faces_[sub].clear();
  for (int f = 0; f < num_faces(); ++f)
    if (frame_[f]) frame_faces_[sub_of(faces_[f])].push_back(f);
}

std::shared_ptr<const SiDomain> SiDomain::uniform(std::vector<Coord> delta, SiBoundary bc, int depth) {
  if (bc == SiBoundary::Explicit) throw std::invalid_argument("SiDomain::uniform: explicit boundary needs tau");
  if (depth < 1) throw std::invalid_argument("SiDomain::uniform: depth must be positive");
  const int8_t fill = bc == SiBoundary::WiredWired ? kBoth : (bc == SiBoundary::WiredFree ? kPrimalOnly : kDualOnly);
  sorted_unique(delta);
  std::vector<std::pair<Coord, int8_t>> pad;
  std::vector<Coord> ring;
  for (const auto& x : delta)
    for (int dx = -depth; dx <= depth; ++dx)
      for (int dy = -depth; dy <= depth; ++dy) ring.push_back(Coord{x[0] + dx, x[1] + dy});
  sorted_unique(ring);
  for (const auto& y : ring)
    if (!std::binary_search(delta.begin(), delta.end(), y)) pad.emplace_back(y, fill);
  auto d = std::make_shared<SiDomain>();
  d->build(std::move(delta), std::move(pad));
  d->bc_ = bc;
  d->wired_ = {bc != SiBoundary::FreeWired, bc != SiBoundary::WiredFree};
  return d;
}

std::shared_ptr<const SiDomain> SiDomain::explicit_tau(std::vector<Coord> delta,
                                                       std::vector<std::pair<Coord, int8_t>> pad, bool primal_wired,
                                                       bool dual_wired) {
  auto d = std::make_shared<SiDomain>();
  d->build(std::move(delta), std::move(pad));
  d->bc_ = SiBoundary::Explicit;
  d->wired_ = {primal_wired, dual_wired};
  return d;
}

std::shared_ptr<const SiDomain> SiDomain::diamond(const DiamondDomain& dom, SiBoundary bc) {
  return uniform(dom.delta_sites, bc, 1);
}

int SiDomain::site_index(const Coord& x) const {
  auto it = std::lower_bound(sites_.begin(), sites_.begin() + num_delta_, x);
  if (it != sites_.begin() + num_delta_ && *it == x) return static_cast<int>(it - sites_.begin());
  auto jt = std::lower_bound(sites_.begin() + num_delta_, sites_.end(), x);
  if (jt != sites_.end() && *jt == x) return static_cast<int>(jt - sites_.begin());
  return -1;
}

int SiDomain::face_index(const Coord& f) const {
  auto it = std::lower_bound(faces_.begin(), faces_.end(), f);
  return it != faces_.end() && *it == f ? static_cast<int>(it - faces_.begin()) : -1;
}

SuperimposedConfig::SuperimposedConfig(SiDomainPtr dom, int8_t fill) : domain(std::move(dom)) {
  state.resize(domain->num_sites());
  for (int i = 0; i < domain->num_sites(); ++i) state[i] = i < domain->num_delta() ? fill : domain->pad_state(i);
}

int si_open_crosses(const SuperimposedConfig& cfg) {
  int n = 0;
  for (int i = 0; i < cfg.domain->num_delta(); ++i) n += cfg.state[i] == kBoth;
  return n;
}

std::array<int, 2> si_cluster_counts(const SuperimposedConfig& cfg) {
  const SiDomain& d = *cfg.domain;
  const int nf = d.num_faces();
  Dsu dsu(nf + 2);
  for (int s = 0; s < d.num_sites(); ++s)
    for (int sub = 0; sub < 2; ++sub)
      if (cfg.edge_open(s, sub)) dsu.unite(d.edge_faces(s, sub)[0], d.edge_faces(s, sub)[1]);
  for (int sub = 0; sub < 2; ++sub)
    if (d.wired(sub))
      for (int f : d.frame_faces(sub)) dsu.unite(f, d.ghost(sub));
  std::array<int, 2> k{0, 0};
  std::vector<uint8_t> counted(nf + 2, 0);
  for (int f = 0; f < nf; ++f) {
    if (!d.delta_face(f)) continue;
    int r = dsu.find(f);
    if (!counted[r]) {
      counted[r] = 1;
      ++k[sub_of(d.face(f))];
    }
  }
  return k;
}

Rational si_weight(const SuperimposedConfig& cfg, const Rational& alpha, const Rational& q) {
  auto k = si_cluster_counts(cfg);
  return rpow(alpha, si_open_crosses(cfg)) * rpow(q, k[0] + k[1]);
}

std::pair<bool, bool> cross_connectivity(const SuperimposedConfig& cfg, int site) {
  return {joined_off(cfg, 0, site), joined_off(cfg, 1, site)};
}

std::array<double, 3> cross_conditional(const SuperimposedConfig& cfg, int site, const SiParams& params) {
  if (params.q == 1.0) return cross_conditional(true, true, params.alpha, 1.0);
  auto [a, b] = cross_connectivity(cfg, site);
  return cross_conditional(a, b, params.alpha, params.q);
}

int8_t si_heat_bath_step(SuperimposedConfig& cfg, int site, double u, const SiParams& params) {
  if (site < 0 || site >= cfg.domain->num_delta()) throw std::invalid_argument("si_heat_bath_step: not a Delta site");
  // The thresholds over all (a, b) bracket the outcome; search only when needed.
  double lo_plus = 1.0, hi_upper = 0.0;
  for (bool a : {false, true})
    for (bool b : {false, true}) {
      auto pr = cross_conditional(a, b, params.alpha, params.q);
      lo_plus = std::min(lo_plus, pr[0]);
      hi_upper = std::max(hi_upper, pr[0] + pr[1]);
    }
  int8_t s;
  if (u < lo_plus) {
    s = kPrimalOnly;
  } else if (u >= hi_upper) {
    s = kDualOnly;
  } else {
    auto pr = cross_conditional(cfg, site, params);
    s = u < pr[0] ? kPrimalOnly : (u < pr[0] + pr[1] ? kBoth : kDualOnly);
  }
  cfg.state[site] = s;
  return s;
}

HolleyReport holley_check(const Rational& alpha, const Rational& q) {
  // ab[w][code]: connectivity of the centre cross for frame wiring w
  // (bit 0 primal wired, bit 1 dual wired) and neighbour code in base 3.
  const int ring = 8;
  int codes = 1;
  for (int i = 0; i < ring; ++i) codes *= 3;
  std::vector<std::vector<uint8_t>> ab(4, std::vector<uint8_t>(codes));
  for (int w = 0; w < 4; ++w) {
    std::vector<std::pair<Coord, int8_t>> pad;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        if (dx || dy) pad.emplace_back(Coord{dx, dy}, kBoth);
    auto dom = SiDomain::explicit_tau({Coord{0, 0}}, pad, w & 1, (w >> 1) & 1);
    SuperimposedConfig cfg(dom, kBoth);
    for (int code = 0; code < codes; ++code) {
      int r = code;
      for (int i = 0; i < ring; ++i, r /= 3) cfg.state[1 + i] = static_cast<int8_t>(r % 3 - 1);
      auto [a, b] = cross_connectivity(cfg, 0);
      ab[w][code] = static_cast<uint8_t>(a | (b << 1));
    }
  }
  std::array<Rational, 4> t_plus, t_zero;
  for (int x = 0; x < 4; ++x) {
    auto pr = cross_conditional<Rational>(x & 1, (x >> 1) & 1, alpha, q);
    t_plus[x] = pr[0];
    t_zero[x] = pr[0] + pr[1];
  }
  bool dom[4][4];
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) dom[x][y] = t_plus[y] >= t_plus[x] && t_zero[y] >= t_zero[x];

  HolleyReport rep;
  std::vector<int> pow3(ring + 1, 1);
  for (int i = 1; i <= ring; ++i) pow3[i] = pow3[i - 1] * 3;
  for (int wl = 0; wl < 4; ++wl)
    for (int wu = 0; wu < 4; ++wu) {
      // Primal wired is larger, dual wired is smaller.
      bool primal_ok = (wl & 1) <= (wu & 1);
      bool dual_ok = ((wl >> 1) & 1) >= ((wu >> 1) & 1);
      if (!primal_ok || !dual_ok) continue;
      for (int lo = 0; lo < codes; ++lo) {
        // Enumerate every hi >= lo digitwise.
        std::vector<int> digit(ring);
        for (int i = 0, r = lo; i < ring; ++i, r /= 3) digit[i] = r % 3;
        std::vector<int> cur = digit;
        while (true) {
          int hi = 0;
          for (int i = 0; i < ring; ++i) hi += cur[i] * pow3[i];
          ++rep.pairs;
          if (!dom[ab[wl][lo]][ab[wu][hi]]) {
            ++rep.violations;
            if (rep.counterexample.empty()) {
              std::ostringstream os;
              os << "wiring " << wl << "->" << wu << " lower " << lo << " (a,b)=" << int(ab[wl][lo] & 1) << ","
                 << int(ab[wl][lo] >> 1) << " upper " << hi << " (a,b)=" << int(ab[wu][hi] & 1) << ","
                 << int(ab[wu][hi] >> 1);
              rep.counterexample = os.str();
            }
          }
          int i = 0;
          while (i < ring && cur[i] == 2) {
            cur[i] = digit[i];
            ++i;
          }
          if (i == ring) break;
          ++cur[i];
        }
      }
    }
  rep.pass = rep.violations == 0;
  return rep;
}

SuperimposedConfig si_cftp(SiDomainPtr dom, const SiParams& params, uint64_t seed, CftpStats* stats,
                           int64_t max_sweeps) {
  if (params.q < 1.0) throw std::invalid_argument("si_cftp: monotone coupling needs q >= 1");
  if (params.alpha <= 0.0) throw std::invalid_argument("si_cftp: alpha must be positive");
  const int n = dom->num_delta();
  TimeStream stream{seed};
  CftpStats local;
  for (int64_t T = std::max(n, 1);; T *= 2) {
    if (T > max_sweeps * int64_t(std::max(n, 1))) throw CftpError("si_cftp: no coalescence within the horizon cap");
    SuperimposedConfig upper(dom, kPrimalOnly), lower(dom, kDualOnly);
    for (int64_t t = -T; t < 0 && n > 0; ++t) {
      auto d = stream.at(t);
      int site = static_cast<int>(bounded_from_bits(d.index_bits, n));
      si_heat_bath_step(upper, site, d.u, params);
      si_heat_bath_step(lower, site, d.u, params);
      if (lower.state[site] > upper.state[site]) throw std::logic_error("si_cftp: sandwich violated");
    }
    local.total_steps += 2 * T;
    if (upper.state == lower.state) {
      local.horizon = T;
      if (stats) *stats = local;
      return upper;
    }
  }
}

SuperimposedConfig si_heat_bath(SiDomainPtr dom, const SiParams& params, int64_t sweeps, uint64_t seed) {
  SuperimposedConfig cfg(dom, kBoth);
  const int n = dom->num_delta();
  Rng rng(seed);
  for (int64_t t = 0; t < sweeps * n; ++t) {
    int site = static_cast<int>(rng.below(n));
    si_heat_bath_step(cfg, site, rng.uniform(), params);
  }
  return cfg;
}

std::vector<UniquenessRow> uniqueness_probe(const SiParams& params, const std::vector<int>& sizes, long samples,
                                            uint64_t seed, bool parallel) {
  std::vector<UniquenessRow> rows;
  for (int n : sizes) {
    DiamondDomain d = diamond(Coord{0, 0}, n);
    SiDomainPtr wf = SiDomain::diamond(d, SiBoundary::WiredFree);
    SiDomainPtr fw = SiDomain::diamond(d, SiBoundary::FreeWired);
    const int centre = wf->site_index(Coord{0, 0});
    const uint64_t size_seed = derive_seed(seed, static_cast<uint64_t>(n));
    struct Draw {
      int8_t wf = 0, fw = 0;
      double both = 0.0;
    };
    auto draws = run_replicas(
        samples,
        [&](long i) {
          Draw out;
          auto a = si_cftp(wf, params, derive_seed(size_seed, 2 * i));
          auto b = si_cftp(fw, params, derive_seed(size_seed, 2 * i + 1));
          out.wf = a.state[centre];
          out.fw = b.state[centre];
          out.both = 0.5 * (si_open_crosses(a) + si_open_crosses(b)) / d.delta_sites.size();
          return out;
        },
        parallel);
    std::array<long, 3> cw{}, cf{};
    std::vector<double> both;
    for (const auto& x : draws) {
      ++cw[x.wf + 1];
      ++cf[x.fw + 1];
      both.push_back(x.both);
    }
    UniquenessRow row;
    row.n = n;
    row.samples = samples;
    for (int s = 0; s < 3; ++s) row.tv += 0.5 * std::abs(double(cw[s] - cf[s])) / double(std::max(samples, 1L));
    double mean = 0.0, ss = 0.0;
    for (double x : both) mean += x;
    mean /= std::max<double>(1.0, both.size());
    for (double x : both) ss += (x - mean) * (x - mean);
    row.both_fraction = mean;
    row.both_stderr = both.size() > 1 ? std::sqrt(ss / (both.size() - 1) / both.size()) : 0.0;
    row.both_bound = params.alpha / (std::max(2.0, params.q + 1.0) + params.alpha);
    rows.push_back(row);
  }
  return rows;
}

DmpReport circuit_dmp_check(SiDomainPtr tau_domain, const std::vector<Coord>& circuit, const Rational& alpha,
                            const Rational& q) {
  for (const auto& x : circuit) {
    int i = tau_domain->site_index(x);
    if (i < tau_domain->num_delta())
      throw std::invalid_argument("circuit_dmp_check: circuit site " + x.str() + " is not in the boundary");
    if (tau_domain->pad_state(i) != kBoth)
      throw std::invalid_argument("circuit_dmp_check: circuit cross at " + x.str() + " is not open");
  }
  std::vector<Coord> delta;
  for (int i = 0; i < tau_domain->num_delta(); ++i) delta.push_back(tau_domain->site(i));
  auto wired = SiDomain::uniform(delta, SiBoundary::WiredWired, 1);
  ExactTable a = enumerate_superimposed(tau_domain, alpha, q);
  ExactTable b = enumerate_superimposed(wired, alpha, q);
  DmpReport rep;
  rep.states = static_cast<long>(a.size());
  rep.pass = a.size() == b.size();
  for (size_t i = 0; rep.pass && i < a.size(); ++i) {
    if (a.states[i] != b.states[i] || a.probability(i) != b.probability(i)) {
      rep.pass = false;
      rep.detail = "state " + std::to_string(i) + ": " + rational_string(a.probability(i)) + " vs " +
                   rational_string(b.probability(i));
    }
  }
  return rep;
}

std::string to_text(const SuperimposedConfig& cfg) {
  const SiDomain& d = *cfg.domain;
  int x0 = INT_MAX, x1 = INT_MIN, y0 = INT_MAX, y1 = INT_MIN;
  for (int i = 0; i < d.num_sites(); ++i) {
    x0 = std::min(x0, d.site(i)[0]);
    x1 = std::max(x1, d.site(i)[0]);
    y0 = std::min(y0, d.site(i)[1]);
    y1 = std::max(y1, d.site(i)[1]);
  }
  std::string out;
  for (int y = y1; y >= y0; --y) {
    for (int x = x0; x <= x1; ++x) {
      int i = d.site_index(Coord{x, y});
      out += i < 0 ? '.' : cross_char(cfg.state[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace ffgrad
