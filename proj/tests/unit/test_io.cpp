#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "netclust/error.hpp"
#include "netclust/io.hpp"

using namespace netclust;

TEST_CASE("format_double round trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) CHECK(std::stod(io::format_double(x)) == x);
  CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("values csv") {
  std::istringstream in("# netclust values v1\nnode,value\n4,1.5\n2,-3\n");
  const auto v = io::read_values_csv(in);
  CHECK(v.size() == 2);
  CHECK(v.at(2) == -3.0);
  std::istringstream dup("1,2\n1,3\n");
  CHECK_THROWS_AS(io::read_values_csv(dup), ParseError);
  std::istringstream bad("node,value\n1,abc\n");
  try {
    io::read_values_csv(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream inf("1,inf\n");
  CHECK_THROWS_AS(io::read_values_csv(inf), ParseError);
}

TEST_CASE("partition csv round trip") {
  const Partition p({0, 1, 1, 2});
  const std::vector<bool> disc{false, false, true};
  const std::vector<std::uint64_t> ids{10, 11, 12, 40};
  std::stringstream buf;
  io::write_partition_csv(buf, p, disc, ids);
  CHECK(buf.str().rfind("# netclust partition v1", 0) == 0);
  const auto back = io::read_partition_csv(buf);
  CHECK(back.size() == 4);
  CHECK(back.at(40).cluster == 2);
  CHECK(back.at(40).discarded);
  CHECK_FALSE(back.at(11).discarded);
  std::istringstream flag("1,0,yes\n");
  CHECK_THROWS_AS(io::read_partition_csv(flag), ParseError);
}

TEST_CASE("json documents carry a schema") {
  TestResult r;
  r.method = "rand";
  r.statistic = std::numeric_limits<double>::infinity();
  r.critical_value = 1.0;
  r.details["k"] = 244;
  const auto j = io::test_result_json(r);
  CHECK(j.contains("schema"));
  CHECK(j["statistic"].is_string());
  CHECK(j["details"]["k"] == 244);

  ClusterDiagnostics d;
  d.max_conductance = 0.25;
  d.warnings = {Warning::kTooFewClusters};
  const auto dj = io::diagnostics_json(d);
  CHECK(dj["max_conductance"] == 0.25);
  CHECK(dj["warnings"][0] == "TOO_FEW_CLUSTERS");
  CHECK(dj["lambda_L"].is_null());

  std::ostringstream out;
  io::write_json(out, io::Json{{"b", 1}, {"a", 2}});
  CHECK(out.str().find("\"a\"") < out.str().find("\"b\""));
}

TEST_CASE("spectrum csv") {
  SpectrumReport r;
  r.eigenvalues = Eigen::Vector3d(0.0, 0.5, 1.25);
  r.n = 3;
  std::ostringstream out;
  io::write_spectrum_csv(out, r);
  CHECK(out.str() == "# netclust spectrum v1 n=3\nindex,eigenvalue\n1,0\n2,0.5\n3,1.25\n");
  const auto j = io::spectrum_summary_json(r, 1, 1);
  CHECK(j["suggested_L"] == 1);
  CHECK(j["gaps"].size() == 2);
}
