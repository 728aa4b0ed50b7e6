#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kFixtures = NETCLUST_FIXTURES;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(NETCLUST_SCRATCH) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Run {
  int code;
  std::string err;
};

Run run(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(NETCLUST_CLI) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream s;
  s << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, s.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::string fixture(const char* name) { return (kFixtures / name).string(); }

}  // namespace

TEST_CASE("spectrum: two components give two zero eigenvalues") {
  const auto dir = scratch("spectrum_two");
  const Run r = run("spectrum " + fixture("two_triangles.txt") + " --out " + dir.string(), dir);
  REQUIRE(r.code == 0);
  const json j = read_json(dir / "spectrum.json");
  CHECK(j["near_zero_count"] == 2);
  CHECK(slurp(dir / "spectrum.csv").rfind("# netclust spectrum v1", 0) == 0);
}

TEST_CASE("spectrum: malformed line exits 2 citing the line") {
  const auto dir = scratch("spectrum_bad");
  const Run r = run("spectrum " + fixture("malformed.txt") + " --out " + dir.string(), dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(run("spectrum " + (dir / "missing.txt").string(), dir).code == 2);
  CHECK(run("spectrum " + fixture("two_triangles.txt") + " --bogus", dir).code == 2);
}

TEST_CASE("spectrum: ER fixture suggests one cluster") {
  const auto dir = scratch("spectrum_er");
  REQUIRE(run("generate --model er --n 1000 --seed 1 --out " + dir.string(), dir).code == 0);
  REQUIRE(run("spectrum " + (dir / "edges.txt").string() + " --k 30 --embed 3 --out " + dir.string(), dir).code == 0);
  CHECK(read_json(dir / "spectrum.json")["suggested_L"] == 1);
  CHECK(slurp(dir / "embedding.csv").find("node,coord_1,coord_2,coord_3") != std::string::npos);
}

TEST_CASE("cluster: bridge graph and warnings") {
  const auto dir = scratch("cluster_bridge");
  const Run r = run("cluster " + fixture("triangles_bridge.txt") + " --L 2 --min-size 1 --out " + dir.string(), dir);
  CHECK(r.code == 10);  // only two clusters: TOO_FEW_CLUSTERS
  const json j = read_json(dir / "diagnostics.json");
  CHECK(j["max_conductance"].get<double>() == doctest::Approx(1.0 / 7.0));
  CHECK(slurp(dir / "partition.csv").find("node,cluster,discarded") != std::string::npos);

  const auto k10 = scratch("cluster_k10");
  CHECK(run("cluster " + fixture("k10.txt") + " --L 2 --min-size 1 --out " + k10.string(), k10).code == 10);
  const json w = read_json(k10 / "diagnostics.json");
  bool high = false;
  for (const auto& x : w["warnings"]) high = high || x == "HIGH_CONDUCTANCE";
  CHECK(high);

  CHECK(run("cluster " + fixture("k10.txt") + " --L 2 --threshold 0.1", k10).code == 2);
}

TEST_CASE("cluster: component-only graph exits 0") {
  const auto dir = scratch("cluster_components");
  // six disjoint triangles: L=1 in the giant, five more components, all conductance 0
  std::ofstream f(dir / "tri6.txt");
  for (int b = 0; b < 6; ++b) f << 3 * b << ' ' << 3 * b + 1 << '\n' << 3 * b + 1 << ' ' << 3 * b + 2 << '\n' << 3 * b << ' ' << 3 * b + 2 << '\n';
  f.close();
  const Run r = run("cluster " + (dir / "tri6.txt").string() + " --L 1 --min-size 1 --out " + dir.string(), dir);
  CHECK(r.code == 0);
  CHECK(read_json(dir / "diagnostics.json")["max_conductance"] == 0.0);
}

TEST_CASE("generate is idempotent") {
  const auto a = scratch("gen_a");
  const auto b = scratch("gen_b");
  REQUIRE(run("generate --model er --n 100 --seed 1 --out " + a.string(), a).code == 0);
  REQUIRE(run("generate --model er --n 100 --seed 1 --out " + b.string(), b).code == 0);
  CHECK(slurp(a / "edges.txt") == slurp(b / "edges.txt"));
  CHECK(slurp(a / "metadata.json") == slurp(b / "metadata.json"));
  REQUIRE(run("generate --model rgg --n 100 --seed 2 --out " + a.string(), a).code == 0);
  CHECK(slurp(a / "positions.csv").rfind("# netclust positions v1", 0) == 0);
  CHECK(run("generate --model er --n 10 --param kappa=20 --out " + a.string(), a).code == 2);
}

TEST_CASE("test: randomization on a Design 1 fixture reports k = 244") {
  const auto dir = scratch("test_rand");
  REQUIRE(run("generate --model er --n 1000 --seed 3 --design1-values --out " + dir.string(), dir).code == 0);
  const std::string edges = (dir / "edges.txt").string();
  const int cc = run("cluster " + edges + " --L 8 --out " + dir.string(), dir).code;
  REQUIRE((cc == 0 || cc == 10));
  const std::string common = "--edges " + edges + " --values " + (dir / "values.csv").string() + " --out " + dir.string();
  const Run r = run("test --method rand --alpha 0.05 --partition " + (dir / "partition.csv").string() + " " + common, dir);
  REQUIRE(r.code == 0);
  const json j = read_json(dir / "test.json");
  CHECK(j["details"]["k"] == 244);
  CHECK(j["details"]["L"] == 8);
  CHECK(j["method"] == "rand");

  REQUIRE(run("test --method hac " + common, dir).code == 0);
  CHECK(read_json(dir / "test.json")["details"].contains("bandwidth"));
  REQUIRE(run("test --method iid " + common, dir).code == 0);
  CHECK(run("test --method rand " + common, dir).code == 2);  // no partition
}

TEST_CASE("test: zero variance exits 3") {
  const auto dir = scratch("test_flat");
  std::ofstream v(dir / "values.csv");
  v << "node,value\n";
  for (int i = 0; i < 6; ++i) v << i << ",1.0\n";
  v.close();
  const Run r = run("test --method iid --edges " + fixture("two_triangles.txt") + " --values " + (dir / "values.csv").string() + " --out " + dir.string(), dir);
  CHECK(r.code == 3);
}

TEST_CASE("simulate writes mc_se and is reproducible") {
  const auto dir = scratch("simulate");
  std::ofstream c(dir / "config.json");
  c << R"({"model":"rgg","n":300,"design":"D1","replications":2,"L_giant":5,"seed":7})";
  c.close();
  REQUIRE(run("simulate --config " + (dir / "config.json").string() + " --out " + (dir / "a.csv").string(), dir).code == 0);
  const std::string a = slurp(dir / "a.csv");
  CHECK(a.find("method,model,n,value,mc_se") != std::string::npos);
  REQUIRE(run("--threads 1 simulate --config " + (dir / "config.json").string() + " --out " + (dir / "b.csv").string(), dir).code == 0);
  CHECK(a == slurp(dir / "b.csv"));

  std::ofstream bad(dir / "bad.json");
  bad << R"({"model":"rgg","unknown":1})";
  bad.close();
  CHECK(run("simulate --config " + (dir / "bad.json").string() + " --out " + dir.string(), dir).code == 2);
}
