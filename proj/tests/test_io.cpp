#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "poisson_lab/errors.hpp"
#include "poisson_lab/io.hpp"

using namespace plab;
using nlohmann::json;

namespace {
int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}
}  // namespace

TEST_CASE("config hash is stable and sensitive") {
  const json a{{"k", 60}, {"replicas", 100}};
  const json b{{"replicas", 100}, {"k", 60}};
  CHECK(io::config_hash(a) == io::config_hash(b));
  CHECK(io::config_hash(a).size() == 16);
  CHECK(io::config_hash(a) != io::config_hash(json{{"k", 61}, {"replicas", 100}}));
}

TEST_CASE("header round trip") {
  std::ostringstream os;
  io::write_header(os, json{{"k", 3}});
  const std::string line = os.str().substr(0, os.str().size() - 1);
  const json h = io::read_header(line);
  CHECK(h["config"]["k"] == 3);
  CHECK(h["version"] == io::kVersion);
  CHECK_THROWS_AS(io::read_header("k,r"), InvalidParameter);
}

TEST_CASE("coefficient csv keeps superexponential values in log form") {
  const auto s = sample_poisson(1200.0, 1.0, 5);
  const auto c = coefficients_product(s, 240, PrecisionConfig::for_degree(240));
  std::stringstream ss;
  io::write_coefficients_csv(ss, c, json{{"k", 100}});
  const auto back = io::read_coefficients_csv(ss);
  CHECK(back.header["config"]["seed"] == 5);
  CHECK(back.header["config"]["n_points"] == s.size());
  CHECK(back.header["config"]["bits"] == c.precision.bits);
  REQUIRE(back.rows.size() == 241);
  for (int j = 0; j <= 240; ++j) {
    CHECK(back.rows[j].index == j);
    CHECK(back.rows[j].sign == c.e[j].sign());
    CHECK(back.rows[j].log10_abs == c.e[j].log_abs() / std::log(10.0));
  }
  CHECK(back.rows[240].log10_abs < -308.0);  // below double range
}

TEST_CASE("row formats") {
  ZeroSet zs;
  zs.k = 7;
  zs.zeros = {-0.5, 0.5, 1.5};
  std::ostringstream z;
  io::write_zeros_csv(z, zs, 42, json::object());
  CHECK(z.str().find("seed,k,index,zero,gap\n42,7,0,-0.5,\n42,7,1,0.5,1\n") != std::string::npos);
  CHECK(count_lines(z.str()) == 5);

  SaddlePoint sp;
  sp.trace = {{0.0, 1.0}, {0.1, 1.2}};
  sp.residual_trace = {1e-2, 1e-9};
  std::ostringstream t;
  io::write_saddle_trace(t, sp, json::object());
  CHECK(count_lines(t.str()) == 3);
  std::istringstream lines(t.str());
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  CHECK(json::parse(line)["residual"] == 1e-2);
}

TEST_CASE("contour csv lists every arc and the total") {
  const PoissonSample s({1.0, -2.0, 4.0}, 5.0);
  SaddlePoint sp;
  sp.k = 2;
  sp.sigma = {0.0, 2.0};
  const auto res = coefficient_via_contour(s, 2, 0, build_contour(sp, 0.4, 64));
  std::ostringstream os;
  io::write_contour_csv(os, res, json::object());
  CHECK(count_lines(os.str()) == 1 + 1 + 6 + 1);
  CHECK(os.str().find("2,0,G1',") != std::string::npos);
  CHECK(os.str().find("2,0,total,") != std::string::npos);
}
