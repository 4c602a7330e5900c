// ffgrad: sampling, exact tables, verification suites and statistics.
// Exit codes: 0 success, 1 verification failure, 2 usage error, 3 CFTP horizon failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "ffgrad/gradient_coding.hpp"
#include "ffgrad/oracle.hpp"
#include "ffgrad/random_cluster.hpp"
#include "ffgrad/replicas.hpp"
#include "ffgrad/rng.hpp"
#include "ffgrad/sixvertex.hpp"
#include "ffgrad/stats.hpp"
#include "ffgrad/suites.hpp"

#ifndef FFGRAD_VERSION
#define FFGRAD_VERSION "unknown"
#endif

using namespace ffgrad;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string verb, suite, kind;
  std::string model = "fk";
  std::string alpha = "3", q = "2", p = "1/2";
  std::optional<double> beta;
  bool alpha_set = false, q_set = false, p_set = false;
  std::optional<int> diamond_n;
  std::string window = "8";
  std::string bc;
  long n = 1;
  uint64_t seed = 1;
  std::string out, input;
  int64_t sweeps = 0;
  int64_t cftp_max_sweeps = kMaxCftpSweeps;
  int m = 0;
  std::vector<int> sizes;
  std::string command_line;
};

std::vector<int> parse_extents(const std::string& s) {
  if (s.empty() || s.back() == 'x') throw UsageError("bad --window '" + s + "': expected e.g. 8 or 8x6");
  std::vector<int> ext;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    try {
      size_t used = 0;
      int v = std::stoi(part, &used);
      if (used != part.size() || v < 1) throw std::invalid_argument(part);
      ext.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("bad --window '" + s + "': expected e.g. 8 or 8x6");
    }
  }
  if (ext.empty()) throw UsageError("empty --window");
  if (ext.size() == 1) ext.push_back(ext[0]);
  return ext;
}

Rational rat(const std::string& s, const char* flag) {
  try {
    return parse_rational(s);
  } catch (const std::exception&) {
    throw UsageError(std::string("bad ") + flag + " '" + s + "'");
  }
}

double edge_p(const Options& o) {
  if (o.beta) {
    if (o.p_set) throw UsageError("--p and --beta are exclusive");
    return p_from_beta(*o.beta);
  }
  return to_double(rat(o.p, "--p"));
}

Shell shell_of(const Options& o) { return parse_shell(o.bc.empty() ? "wired" : o.bc); }

WindowPtr box_of(const Options& o) { return Window::box(parse_extents(o.window), shell_of(o)); }

SiBoundary si_bc_of(const Options& o) {
  SiBoundary bc = parse_si_boundary(o.bc.empty() ? "wired-wired" : o.bc);
  if (bc == SiBoundary::Explicit) throw UsageError("--bc explicit is not available from the command line");
  return bc;
}

SiDomainPtr si_domain_of(const Options& o) {
  if (o.diamond_n) return SiDomain::diamond(diamond(Coord{0, 0}, *o.diamond_n), si_bc_of(o));
  auto ext = parse_extents(o.window);
  if (ext.size() != 2) throw UsageError("si windows are two-dimensional");
  std::vector<Coord> sites;
  for (int y = 0; y < ext[1]; ++y)
    for (int x = 0; x < ext[0]; ++x) sites.push_back(Coord{x, y});
  return SiDomain::uniform(sites, si_bc_of(o));
}

std::shared_ptr<const DiamondDomain> diamond_of(const Options& o) {
  if (!o.diamond_n) throw UsageError("model '" + o.model + "' needs --diamond");
  if (*o.diamond_n < 2 || *o.diamond_n % 2) throw UsageError("--diamond must be even and at least 2");
  return std::make_shared<const DiamondDomain>(diamond(Coord{0, 0}, *o.diamond_n));
}

int potts_q(const Options& o) {
  Rational q = rat(o.q, "--q");
  if (q.get_den() != 1 || q < 2) throw UsageError("potts needs an integer --q >= 2");
  return static_cast<int>(q.get_num().get_si());
}

std::string spins_text(const std::vector<int>& spin) {
  std::string s;
  for (int v : spin) s += static_cast<char>('0' + v);
  return s;
}

// Output goes to --out, redirected into FFGRAD_OUT_DIR when set; stdout otherwise.
struct Sink {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Sink(const Options& o, const std::string& fallback) {
    std::string path = o.out;
    if (const char* dir = std::getenv("FFGRAD_OUT_DIR"); dir && *dir) {
      std::filesystem::path name = path.empty() ? fallback : std::filesystem::path(path).filename().string();
      std::filesystem::create_directories(dir);
      path = (std::filesystem::path(dir) / name).string();
    }
    if (!path.empty()) {
      file.open(path, std::ios::binary);
      if (!file) throw UsageError("cannot open output '" + path + "'");
      os = &file;
    }
  }
  void line(const json& j) { *os << j.dump() << '\n'; }
};

// ---- sample ----

int cmd_sample(const Options& o) {
  if (o.n < 0) throw UsageError("--n must be nonnegative");
  if (o.sweeps < 0) throw UsageError("--sweeps must be nonnegative");
  const std::string& model = o.model;
  const bool mcmc = o.sweeps > 0;
  json params = json::object();
  std::string window_desc, boundary;
  bool exact = true;
  std::function<json(uint64_t)> draw;

  if (model == "bernoulli" || model == "fk" || model == "potts") {
    WindowPtr w = box_of(o);
    window_desc = w->descriptor();
    boundary = shell_name(w->shell());
    const double p = edge_p(o);
    params["p"] = p;
    if (o.beta) params["beta"] = *o.beta;
    if (model == "bernoulli") {
      if (mcmc) throw UsageError("bernoulli samples are exact; --sweeps does not apply");
      draw = [w, p](uint64_t s) {
        auto cfg = bernoulli(w, p, s);
        return json{{"open", cfg.num_open()}, {"config", to_text(cfg)}};
      };
    } else {
      const double q = model == "potts" ? potts_q(o) : to_double(rat(o.q, "--q"));
      if (q <= 0) throw UsageError("--q must be positive");
      if (q < 1 && !mcmc) throw UsageError("CFTP needs q >= 1; pass --sweeps for an approximate sample");
      params["q"] = model == "potts" ? json(static_cast<int>(q)) : json(o.q);
      exact = !mcmc;
      const FkParams fp{p, q};
      const int64_t sweeps = o.sweeps, cap = o.cftp_max_sweeps;
      auto fk = [w, fp, sweeps, cap](uint64_t s) {
        return sweeps > 0 ? fk_heat_bath(w, fp, sweeps, s) : fk_cftp(w, fp, s, nullptr, cap);
      };
      if (model == "fk") {
        draw = [fk](uint64_t s) {
          auto cfg = fk(s);
          return json{{"open", cfg.num_open()}, {"clusters", components(cfg).num_clusters()}, {"config", to_text(cfg)}};
        };
      } else {
        const int iq = static_cast<int>(q);
        draw = [fk, iq](uint64_t s) {
          auto sigma = potts_from_fk(components(fk(derive_seed(s, 0))), iq, derive_seed(s, 1));
          return json{{"energy", energy_stat(sigma)}, {"spins", spins_text(sigma.spin)}};
        };
      }
    }
  } else if (model == "si") {
    SiDomainPtr dom = si_domain_of(o);
    window_desc = o.diamond_n ? "diamond " + std::to_string(*o.diamond_n) : "block " + o.window;
    boundary = si_boundary_name(dom->boundary());
    const SiParams sp{to_double(rat(o.alpha, "--alpha")), to_double(rat(o.q, "--q"))};
    if (sp.alpha <= 0 || sp.q <= 0) throw UsageError("--alpha and --q must be positive");
    if (sp.q < 1 && !mcmc) throw UsageError("CFTP needs q >= 1; pass --sweeps for an approximate sample");
    params = {{"alpha", o.alpha}, {"q", o.q}};
    exact = !mcmc;
    const int64_t sweeps = o.sweeps, cap = o.cftp_max_sweeps;
    draw = [dom, sp, sweeps, cap](uint64_t s) {
      auto cfg = sweeps > 0 ? si_heat_bath(dom, sp, sweeps, s) : si_cftp(dom, sp, s, nullptr, cap);
      return json{{"open_crosses", si_open_crosses(cfg)}, {"config", to_text(cfg)}};
    };
  } else if (model == "spin" || model == "height" || model == "pipeline") {
    auto dom = diamond_of(o);
    if (mcmc) throw UsageError("model '" + model + "' is sampled exactly; --sweeps does not apply");
    if (o.q_set && rat(o.q, "--q") != 2) throw UsageError("model '" + model + "' uses q = 2");
    window_desc = "diamond " + std::to_string(*o.diamond_n);
    boundary = "wired-wired";
    const double alpha = to_double(rat(o.alpha, "--alpha"));
    if (alpha <= 0) throw UsageError("--alpha must be positive");
    params = {{"alpha", o.alpha}, {"c", rational_string(rat(o.alpha, "--alpha") + 2)}};
    if (model == "pipeline") {
      draw = [dom, alpha](uint64_t s) {
        std::string v;
        for (const auto& g : abs_diag_grad_pipeline(*dom, alpha, s))
          v += g.value.determined() ? static_cast<char>('0' + g.value.value) : '?';
        return json{{"abs_diag_grad", v}};
      };
    } else {
      const int m = o.m;
      auto [i, j] = spin_boundary(m);
      params["m"] = m;
      params["i"] = i;
      params["j"] = j;
      SiDomainPtr sd = SiDomain::diamond(*dom, SiBoundary::WiredWired);
      const bool height = model == "height";
      draw = [dom, sd, alpha, i, j, m, height](uint64_t s) {
        auto eta = si_cftp(sd, SiParams{alpha, 2.0}, derive_seed(s, 0));
        SpinConfig spin = spin_from_si(eta, dom, i, j, derive_seed(s, 1));
        if (!height) return json{{"saddles", spin_saddles(spin)}, {"config", to_text(spin)}};
        HeightFunction h = spin_to_height(spin);
        h = spin_to_height(spin, (m - *h.m) / 4);
        return json{{"saddles", spin_saddles(spin)}, {"config", to_text(h)}};
      };
    }
  } else {
    throw UsageError("unknown --model '" + model + "'");
  }

  std::vector<uint64_t> seeds(o.n);
  for (long r = 0; r < o.n; ++r) seeds[r] = derive_seed(o.seed, static_cast<uint64_t>(r));
  Sink sink(o, "sample-" + model + "-" + std::to_string(o.seed) + ".jsonl");
  sink.line({{"record", "manifest"},
             {"command_line", o.command_line},
             {"model", model},
             {"params", params},
             {"window", window_desc},
             {"boundary", boundary},
             {"seed", o.seed},
             {"seed_derivation", "splitmix64(seed, replica)"},
             {"code_version", FFGRAD_VERSION},
             {"sampler", exact ? "cftp" : "heat-bath"},
             {"sweeps", o.sweeps},
             {"approximate", !exact},
             {"replica_seeds", seeds}});
  auto records = run_replicas(o.n, [&](long r) {
    json rec = draw(seeds[r]);
    rec["replica"] = r;
    rec["seed"] = seeds[r];
    rec["approximate"] = !exact;
    return rec.dump();
  });
  for (const auto& rec : records) *sink.os << rec << '\n';
  return 0;
}

// ---- exact ----

int cmd_exact(const Options& o) {
  ExactTable t;
  const std::string& model = o.model;
  if (model == "fk") {
    t = enumerate_fk(box_of(o), rat(o.p, "--p"), rat(o.q, "--q"));
  } else if (model == "potts") {
    t = enumerate_potts(box_of(o), rat(o.p, "--p"), potts_q(o));
  } else if (model == "si") {
    t = enumerate_superimposed(si_domain_of(o), rat(o.alpha, "--alpha"), rat(o.q, "--q"));
  } else if (model == "spin") {
    auto [i, j] = spin_boundary(o.m);
    t = enumerate_spin(*diamond_of(o), i, j, rat(o.alpha, "--alpha") + 2);
  } else if (model == "height") {
    t = enumerate_height(*diamond_of(o), o.m, rat(o.alpha, "--alpha") + 2);
  } else {
    throw UsageError("unknown --model '" + model + "' for exact");
  }
  Sink sink(o, "exact-" + model + ".json");
  *sink.os << to_json(t) << '\n';
  return 0;
}

// ---- verify ----

std::vector<Rational> rats_or(const Options& o, bool set, const std::string& v, const char* flag,
                              std::vector<Rational> fallback) {
  if (set) return {rat(v, flag)};
  return fallback;
}

int cmd_verify(const Options& o) {
  std::vector<SuiteResult> results;
  const std::string& s = o.suite;
  auto block = [](int w, int h) {
    std::vector<Coord> out;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.push_back(Coord{x, y});
    return out;
  };
  if (s == "holley") {
    results.push_back(verify_holley(rat(o.alpha, "--alpha"), rat(o.q, "--q")));
  } else if (s == "detailed-balance") {
    auto qs = rats_or(o, o.q_set, o.q, "--q", {Rational(2), Rational(3, 2), Rational(1, 2)});
    auto alphas = rats_or(o, o.alpha_set, o.alpha, "--alpha", {Rational(9, 2), Rational(1, 2)});
    for (const auto& w : {Window::box({2, 2}, Shell::Free), Window::box({2, 2}, Shell::Wired),
                          Window::box({3, 2}, Shell::Free)})
      for (const auto& q : qs) results.push_back(verify_detailed_balance_fk(w, rat(o.p, "--p"), q));
    std::vector<Coord> ell = {Coord{0, 0}, Coord{1, 0}, Coord{2, 0}, Coord{0, 1}, Coord{0, 2}};
    for (auto bc : {SiBoundary::WiredWired, SiBoundary::WiredFree, SiBoundary::FreeWired})
      for (const auto& a : alphas)
        for (const auto& q : qs) {
          results.push_back(verify_detailed_balance_si(SiDomain::uniform(block(2, 2), bc), a, q));
          results.push_back(verify_detailed_balance_si(SiDomain::uniform(ell, bc), a, q));
        }
  } else if (s == "es-coupling") {
    results.push_back(verify_es_coupling_potts(2, o.q_set ? potts_q(o) : 3, rat(o.p, "--p")));
    const Rational alpha = rat(o.alpha, "--alpha");
    results.push_back(verify_es_coupling_si(SiDomain::uniform(block(2, 2), SiBoundary::WiredWired), alpha));
    DiamondDomain d = diamond(Coord{0, 0}, 2);
    results.push_back(verify_es_coupling_si(SiDomain::diamond(d, SiBoundary::WiredWired), alpha, &d));
  } else if (s == "cluster-tree") {
    auto ext = parse_extents(o.window);
    const int q = o.q_set ? potts_q(o) : 2;
    results.push_back(verify_cluster_tree(ext[0], o.p_set ? edge_p(o) : 0.7, q, std::max(1L, o.n), 10, 100, o.seed));
  } else if (s == "transforms") {
    results.push_back(verify_transforms(o.diamond_n.value_or(4), std::max(1L, o.n), o.seed));
  } else if (s == "partition-identity") {
    std::vector<int> radii = o.diamond_n ? std::vector<int>{*o.diamond_n} : std::vector<int>{2};
    auto alphas = rats_or(o, o.alpha_set, o.alpha, "--alpha", {Rational(1), Rational(3), Rational(9, 2)});
    results.push_back(verify_partition_identity(radii, alphas));
  } else if (s == "correlation-identity") {
    results.push_back(verify_correlation_identity(o.diamond_n.value_or(2), rat(o.alpha, "--alpha")));
  } else if (s == "dmp") {
    results.push_back(verify_dmp(rat(o.alpha, "--alpha"), rat(o.q, "--q"), o.seed));
  } else if (s == "saddle-trichotomy") {
    results.push_back(verify_saddle_trichotomy(20, o.seed));
  } else {
    throw UsageError("unknown suite '" + s + "'");
  }
  bool pass = true;
  json report = json::array();
  for (const auto& r : results) {
    if (!r.informational) pass = pass && r.pass;
    report.push_back({{"name", r.name}, {"pass", r.pass}, {"informational", r.informational}, {"detail", r.detail}});
    std::cerr << (r.pass ? "PASS " : r.informational ? "INFO " : "FAIL ") << r.name << '\n';
  }
  Sink sink(o, "verify-" + s + ".json");
  sink.line({{"suite", s}, {"pass", pass}, {"results", report}});
  return pass ? 0 : 1;
}

// ---- stats ----

std::vector<json> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read --input '" + path + "'");
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error&) {
      throw UsageError("schema mismatch: --input is not JSON lines");
    }
  }
  if (out.empty() || out[0].value("record", "") != "manifest") throw UsageError("schema mismatch: no manifest record");
  return out;
}

json summary_json(const std::vector<double>& xs) {
  Summary s = summarize(xs);
  return {{"n", s.n}, {"mean", s.mean}, {"variance", s.variance}, {"stddev", s.stddev}, {"min", s.min}, {"max", s.max}};
}

int cmd_stats(const Options& o) {
  json out = {{"kind", o.kind}};
  if (o.kind == "energy") {
    std::vector<double> e;
    if (!o.input.empty()) {
      auto recs = read_records(o.input);
      if (recs[0].value("model", "") != "potts") throw UsageError("schema mismatch: energy needs potts samples");
      const json& pr = recs[0]["params"];
      WindowPtr w = window_from_descriptor(recs[0]["window"].get<std::string>());
      const int q = pr.at("q").get<int>();
      for (size_t k = 1; k < recs.size(); ++k) {
        if (!recs[k].contains("spins")) throw UsageError("schema mismatch: record without spins");
        std::vector<int> spin;
        for (char c : recs[k]["spins"].get<std::string>()) spin.push_back(c - '0');
        if (static_cast<int>(spin.size()) != w->num_vertices()) throw UsageError("schema mismatch: spin count");
        e.push_back(energy_stat(PottsConfig{w, q, spin}));
      }
      out["source"] = o.input;
    } else {
      WindowPtr w = box_of(o);
      const int q = potts_q(o);
      const FkParams fp{edge_p(o), double(q)};
      e = run_replicas(o.n, [&](long r) {
        uint64_t s = derive_seed(o.seed, static_cast<uint64_t>(r));
        return energy_stat(potts_from_fk(components(fk_cftp(w, fp, derive_seed(s, 0))), q, derive_seed(s, 1)));
      });
      out["window"] = w->descriptor();
      out["p"] = fp.p;
    }
    out["summary"] = summary_json(e);
    std::map<std::string, long> hist;
    for (double x : e) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", std::floor(x * 20.0) / 20.0);
      ++hist[buf];
    }
    out["histogram_bin_width"] = 0.05;
    out["histogram"] = hist;
  } else if (o.kind == "witness-radius") {
    WindowPtr w = box_of(o);
    const double p = edge_p(o);
    auto ext = parse_extents(o.window);
    std::vector<int> mid(ext.size());
    for (size_t k = 0; k < ext.size(); ++k) mid[k] = ext[k] / 2;
    Coord a = Coord{mid[0], mid[1]}, b = Coord{mid[0] + 1 < ext[0] ? mid[0] + 1 : mid[0] - 1, mid[1]};
    const int q = o.q_set ? potts_q(o) : 2;
    auto gen = [w, p](uint64_t s) { return bernoulli(w, p, s); };
    auto h = witness_radius_survey(gen, w->index_of(a), w->index_of(b), q, o.n, o.seed);
    json bins = json::array();
    for (const auto& [r, c] : h.counts) bins.push_back({{"radius", r}, {"count", c}});
    out["window"] = w->descriptor();
    out["p"] = p;
    out["edge"] = {a.str(), b.str()};
    out["bins"] = bins;
    out["undetermined"] = h.undetermined;
    out["trials"] = h.trials;
  } else if (o.kind == "uniqueness") {
    const SiParams sp{to_double(rat(o.alpha, "--alpha")), to_double(rat(o.q, "--q"))};
    std::vector<int> sizes = o.sizes.empty() ? std::vector<int>{2, 4, 6} : o.sizes;
    json rows = json::array();
    for (const auto& r : uniqueness_probe(sp, sizes, o.n, o.seed))
      rows.push_back({{"n", r.n},
                      {"samples", r.samples},
                      {"tv", r.tv},
                      {"both_fraction", r.both_fraction},
                      {"both_stderr", r.both_stderr},
                      {"both_bound", r.both_bound}});
    out["alpha"] = sp.alpha;
    out["q"] = sp.q;
    out["rows"] = rows;
  } else if (o.kind == "cluster-size") {
    std::vector<PercolationConfig> cfgs;
    if (!o.input.empty()) {
      auto recs = read_records(o.input);
      for (size_t k = 1; k < recs.size(); ++k) {
        if (!recs[k].contains("config")) throw UsageError("schema mismatch: record without config");
        try {
          cfgs.push_back(from_text(recs[k]["config"].get<std::string>()));
        } catch (const std::invalid_argument&) {
          throw UsageError("schema mismatch: config is not a percolation configuration");
        }
      }
      out["source"] = o.input;
    } else {
      WindowPtr w = box_of(o);
      const double p = edge_p(o);
      cfgs = run_replicas(o.n, [&](long r) { return bernoulli(w, p, derive_seed(o.seed, static_cast<uint64_t>(r))); });
      out["window"] = w->descriptor();
      out["p"] = p;
    }
    std::map<long, long> sizes;
    long total = 0;
    for (const auto& c : cfgs)
      for (const auto& cl : components(c).clusters) {
        if (cl.contains_ghost) continue;
        ++sizes[static_cast<long>(cl.vertices.size())];
        ++total;
      }
    json rows = json::array();
    long above = total;
    for (const auto& [sz, cnt] : sizes) {
      rows.push_back({{"size", sz}, {"count", cnt}, {"tail", total ? double(above) / double(total) : 0.0}});
      above -= cnt;
    }
    out["configs"] = cfgs.size();
    out["clusters"] = total;
    out["rows"] = rows;
  } else {
    throw UsageError("unknown stats kind '" + o.kind + "'");
  }
  Sink sink(o, "stats-" + o.kind + ".json");
  sink.line(out);
  return 0;
}

// --config FILE: the JSON object's entries become flags placed before the
// command-line ones, so explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  for (size_t k = 1; k < args.size(); ++k) {
    if (args[k] != "--config") continue;
    if (k + 1 >= args.size()) throw UsageError("--config needs a file");
    std::ifstream in(args[k + 1]);
    if (!in) throw UsageError("cannot read --config '" + args[k + 1] + "'");
    json cfg;
    try {
      cfg = json::parse(in);
    } catch (const json::parse_error& e) {
      throw UsageError(std::string("bad --config: ") + e.what());
    }
    if (!cfg.is_object()) throw UsageError("--config must hold a JSON object");
    args.erase(args.begin() + k, args.begin() + k + 2);
    std::vector<std::string> flags;
    for (const auto& [key, v] : cfg.items()) {
      flags.push_back("--" + key);
      if (v.is_array()) {
        for (const auto& x : v) flags.push_back(x.is_string() ? x.get<std::string>() : x.dump());
      } else {
        flags.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    }
    // After the verb (and the suite or kind positional) so the subcommand parses them.
    size_t at = std::min<size_t>(args.size(), 2);
    args.insert(args.begin() + at, flags.begin(), flags.end());
    break;
  }
  return args;
}

int run(std::vector<std::string> args) {
  Options o;
  // The output path is left out so that reruns into different files match byte for byte.
  for (size_t k = 1; k < args.size(); ++k) {
    if (args[k] == "--out") {
      ++k;
      continue;
    }
    if (args[k].rfind("--out=", 0) == 0) continue;
    o.command_line += (o.command_line.empty() ? "" : " ") + args[k];
  }
  args = expand_config(std::move(args));

  CLI::App app{"ffgrad: samplers, exact oracles and verification suites"};
  app.require_subcommand(1);
  auto common = [&](CLI::App* c) {
    auto take_last = [](CLI::Option* opt) { return opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); };
    take_last(c->add_option("--model", o.model, "fk, potts, si, spin, height, pipeline, bernoulli"));
    take_last(c->add_option_function<std::string>(
        "--alpha", [&](const std::string& v) { o.alpha = v, o.alpha_set = true; }, "cross weight (rational)"));
    take_last(c->add_option_function<std::string>(
        "--q", [&](const std::string& v) { o.q = v, o.q_set = true; }, "cluster weight (rational)"));
    take_last(c->add_option_function<std::string>(
        "--p", [&](const std::string& v) { o.p = v, o.p_set = true; }, "edge parameter (rational)"));
    take_last(c->add_option_function<double>(
        "--beta", [&](double v) { o.beta = v; }, "inverse temperature, p = 1 - exp(-beta)"));
    take_last(c->add_option_function<int>(
        "--diamond", [&](int v) { o.diamond_n = v; }, "diamond radius"));
    take_last(c->add_option("--window", o.window, "box extents, e.g. 8 or 8x6"));
    take_last(c->add_option("--bc", o.bc, "free, wired, wired-wired, wired-free, free-wired"));
    take_last(c->add_option("--n", o.n, "samples, configurations or trials"));
    take_last(c->add_option("--seed", o.seed, "master seed"));
    take_last(c->add_option("--out", o.out, "output file"));
    take_last(c->add_option("--sweeps", o.sweeps, "heat-bath sweeps; marks output approximate"));
    take_last(c->add_option("--cftp-max-sweeps", o.cftp_max_sweeps, "CFTP horizon cap in sweeps"));
    take_last(c->add_option("--m", o.m, "height boundary value"));
    take_last(c->add_option("--input", o.input, "JSON-lines samples to summarize"));
    c->add_option("--sizes", o.sizes, "diamond radii for the uniqueness probe")->delimiter(',');
  };
  auto* sample = app.add_subcommand("sample", "draw samples as JSON lines");
  auto* exact = app.add_subcommand("exact", "exact table by enumeration");
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  auto* stats = app.add_subcommand("stats", "summary tables");
  verify->add_option("suite", o.suite, "suite name")->required();
  stats->add_option("kind", o.kind, "energy, witness-radius, uniqueness, cluster-size")->required();
  for (auto* c : {sample, exact, verify, stats}) common(c);

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (*sample) return cmd_sample(o);
  if (*exact) return cmd_exact(o);
  if (*verify) return cmd_verify(o);
  return cmd_stats(o);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(std::vector<std::string>(argv, argv + argc));
  } catch (const UsageError& e) {
    std::cerr << "ffgrad: " << e.what() << '\n';
    return 2;
  } catch (const CftpError& e) {
    std::cerr << "ffgrad: CFTP horizon failure: " << e.what() << '\n';
    return 3;
  } catch (const OracleSizeError& e) {
    std::cerr << "ffgrad: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ffgrad: " << e.what() << '\n';
    return 2;
  }
}
