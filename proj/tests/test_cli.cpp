#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

std::string cli() {
  const char* p = std::getenv("FFGRAD_CLI");
  REQUIRE_MESSAGE(p != nullptr, "FFGRAD_CLI is not set");
  return p;
}

Result run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + cli() + " " + args + " 2>/dev/null";
  Result r;
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
  int status = pclose(f);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("ffgrad_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("sample: manifest, records and byte determinism") {
  fs::path d = scratch("sample");
  const std::string flags = "sample --model si --alpha 4.5 --q 2 --diamond 4 --bc wired-wired --n 1000 --seed 7";
  REQUIRE(run(flags + " --out " + (d / "a.jsonl").string()).code == 0);
  REQUIRE(run(flags + " --out " + (d / "b.jsonl").string()).code == 0);
  std::string a = slurp(d / "a.jsonl");
  CHECK(a == slurp(d / "b.jsonl"));
  auto ls = lines(a);
  REQUIRE(ls.size() == 1001);
  json m = json::parse(ls[0]);
  CHECK(m["record"] == "manifest");
  CHECK(m["seed"] == 7);
  CHECK(m["approximate"] == false);
  CHECK(m["replica_seeds"].size() == 1000);
  json r = json::parse(ls[1]);
  CHECK(r["replica"] == 0);
  CHECK(r["seed"] == m["replica_seeds"][0]);

  // A different seed changes the records.
  auto other = run("sample --model si --alpha 4.5 --q 2 --diamond 4 --n 3 --seed 8");
  CHECK(lines(other.out)[1] != ls[1]);
}

TEST_CASE("sample: --n 0 gives the manifest only") {
  auto r = run("sample --model fk --window 4 --n 0");
  CHECK(r.code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 1);
  CHECK(json::parse(ls[0])["record"] == "manifest");
}

TEST_CASE("sample: heat-bath output is flagged approximate") {
  auto r = run("sample --model fk --q 0.5 --window 3 --sweeps 20 --n 2");
  REQUIRE(r.code == 0);
  for (const auto& l : lines(r.out)) CHECK(json::parse(l)["approximate"] == true);
  auto e = run("sample --model potts --q 3 --window 3 --n 2");
  REQUIRE(e.code == 0);
  for (const auto& l : lines(e.out)) CHECK(json::parse(l)["approximate"] == false);
}

TEST_CASE("sample: every model runs") {
  for (const char* args : {"--model bernoulli --window 4", "--model fk --window 4 --q 2", "--model potts --window 4 --q 3",
                           "--model si --window 3x2 --bc wired-free", "--model spin --diamond 2",
                           "--model height --diamond 2 --m 1", "--model pipeline --diamond 2"}) {
    CAPTURE(args);
    auto r = run(std::string("sample ") + args + " --n 2");
    CHECK(r.code == 0);
    CHECK(lines(r.out).size() == 3);
  }
}

TEST_CASE("config file, flags override") {
  fs::path d = scratch("config");
  std::ofstream(d / "c.json") << R"({"model": "potts", "q": 3, "window": "4", "n": 5, "seed": 3})";
  auto a = run("sample --config " + (d / "c.json").string());
  CHECK(a.code == 0);
  CHECK(lines(a.out).size() == 6);
  auto b = run("sample --config " + (d / "c.json").string() + " --n 2");
  CHECK(b.code == 0);
  auto ls = lines(b.out);
  REQUIRE(ls.size() == 3);
  CHECK(json::parse(ls[0])["model"] == "potts");
}

TEST_CASE("FFGRAD_OUT_DIR redirects the output file") {
  fs::path d = scratch("outdir");
  auto r = run("sample --model fk --window 3 --n 2 --out nested/x.jsonl", "FFGRAD_OUT_DIR=" + d.string());
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(lines(slurp(d / "x.jsonl")).size() == 3);
}

TEST_CASE("exit codes") {
  CHECK(run("").code == 2);
  CHECK(run("sample --model nope").code == 2);
  CHECK(run("sample --model fk --q 0.5").code == 2);
  CHECK(run("sample --model spin").code == 2);
  CHECK(run("sample --model fk --window 4x").code == 2);
  CHECK(run("verify nosuch").code == 2);
  CHECK(run("exact --model fk --window 9").code == 2);
  CHECK(run("sample --model fk --window 30 --p 0.6 --cftp-max-sweeps 1 --n 1").code == 3);
}

TEST_CASE("verify suites") {
  auto h = run("verify holley --q 2 --alpha 3");
  CHECK(h.code == 0);
  CHECK(json::parse(h.out)["pass"] == true);

  // Below q = 1 the outcome is recorded as informational, with the counterexample.
  auto hi = run("verify holley --q 0.5 --alpha 1");
  CHECK(hi.code == 0);
  json res = json::parse(hi.out)["results"][0];
  CHECK(res["informational"] == true);
  CHECK(res["pass"] == false);
  CHECK(!res["detail"]["counterexample"].get<std::string>().empty());

  for (const char* s : {"partition-identity", "detailed-balance", "transforms --n 20", "dmp", "saddle-trichotomy",
                        "cluster-tree --window 12 --n 3"}) {
    CAPTURE(s);
    CHECK(run(std::string("verify ") + s).code == 0);
  }
}

TEST_CASE("exact tables") {
  auto r = run("exact --model fk --window 2 --bc free --p 1/2 --q 2");
  REQUIRE(r.code == 0);
  json t = json::parse(r.out);
  CHECK(t["states"].size() == 16);
  auto s = run("exact --model spin --diamond 2");
  REQUIRE(s.code == 0);
  CHECK(json::parse(s.out)["states"].size() == 18);
}

TEST_CASE("stats") {
  fs::path d = scratch("stats");
  // Constant-spin fixture.
  REQUIRE(run("sample --model potts --q 3 --window 4 --n 10 --out " + (d / "p.jsonl").string()).code == 0);
  auto ls = lines(slurp(d / "p.jsonl"));
  {
    std::ofstream f(d / "const.jsonl");
    f << ls[0] << '\n';
    for (size_t k = 1; k < ls.size(); ++k) {
      json r = json::parse(ls[k]);
      r["spins"] = std::string(r["spins"].get<std::string>().size(), '2');
      f << r.dump() << '\n';
    }
  }
  auto e = run("stats energy --input " + (d / "const.jsonl").string());
  REQUIRE(e.code == 0);
  json es = json::parse(e.out)["summary"];
  CHECK(es["mean"] == 1.0);
  CHECK(es["variance"] == 0.0);
  CHECK(es["n"] == 10);

  auto w = run("stats witness-radius --window 12 --p 0.7 --n 40 --seed 5");
  REQUIRE(w.code == 0);
  json wj = json::parse(w.out);
  long sum = wj["undetermined"].get<long>();
  for (const auto& b : wj["bins"]) {
    CHECK(b["radius"].get<int>() >= 0);
    CHECK(b["count"].get<long>() >= 0);
    sum += b["count"].get<long>();
  }
  CHECK(sum == 40);

  auto u = run("stats uniqueness --alpha 6 --q 2 --n 50 --sizes 2,4,6");
  REQUIRE(u.code == 0);
  json rows = json::parse(u.out)["rows"];
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row["tv"].get<double>() >= 0.0);
    CHECK(row["tv"].get<double>() <= 1.0);
  }

  auto c = run("stats cluster-size --window 6 --p 0.5 --n 5");
  REQUIRE(c.code == 0);
  CHECK(json::parse(c.out)["rows"][0]["tail"] == 1.0);

  // Schema mismatch: energy of percolation samples.
  REQUIRE(run("sample --model bernoulli --window 3 --n 2 --out " + (d / "b.jsonl").string()).code == 0);
  CHECK(run("stats energy --input " + (d / "b.jsonl").string()).code == 2);
}
