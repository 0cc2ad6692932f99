#include <algorithm>

#include "doctest.h"
#include "poisson_lab/errors.hpp"
#include "poisson_lab/montecarlo.hpp"

using namespace plab;

TEST_CASE("ensemble configuration") {
  EnsembleConfig cfg;
  cfg.k = 60;
  CHECK(cfg.resolved_window() == 600.0);
  cfg.k = 20;
  CHECK(cfg.resolved_window() == 500.0);
  CHECK(cfg.resolved_r_max() == 182);
  CHECK(cfg.n_max() == 202);
  CHECK(cfg.resolved_sign_lo() == 20);
  CHECK(cfg.resolved_sign_hi() == 22);
  CHECK_NOTHROW(cfg.validate());

  EnsembleConfig bad = cfg;
  bad.replicas = 0;
  CHECK_THROWS_AS(run_replicas(bad), InvalidParameter);
  bad = cfg;
  bad.bits = 32;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
  bad = cfg;
  bad.window_halfwidth = 50.0;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
  bad = cfg;
  bad.match_epsilon = 0.3;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
}

TEST_CASE("a single replica is reproducible") {
  EnsembleConfig cfg;
  cfg.k = 40;
  cfg.replicas = 1;
  cfg.base_seed = 7;
  const auto a = run_replicas(cfg), b = run_replicas(cfg);
  REQUIRE(a.size() == 1);
  CHECK(a[0].seed == 7);
  CHECK(a[0].ok);
  CHECK(a[0].to_json().dump() == b[0].to_json().dump());
  CHECK(a[0].e_signs.size() == 3);
  CHECK(a[0].cosine_law_errors.size() == 7);
  CHECK(a[0].spacing.n_zeros > 0);
}

TEST_CASE("thread count does not change the ensemble") {
  EnsembleConfig cfg;
  cfg.k = 30;
  cfg.zeros = false;
  cfg.replicas = 12;
  cfg.base_seed = 100;
  const auto serial = run_replicas(cfg);
  cfg.threads = 4;
  const auto parallel = run_replicas(cfg);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].seed == 100 + i);
    CHECK(serial[i].to_json().dump() == parallel[i].to_json().dump());
  }
}

TEST_CASE("saddle solves at k = 60") {
  EnsembleConfig cfg;
  cfg.k = 60;
  cfg.zeros = false;
  cfg.replicas = 100;
  cfg.base_seed = 1;
  const auto rs = run_replicas(cfg);
  const auto ok = std::count_if(rs.begin(), rs.end(), [](const ReplicaSummary& r) { return r.saddle_converged; });
  CHECK(ok >= 95);
  for (const auto& r : rs)
    if (!r.saddle_converged) CHECK(r.failure.rfind("saddle", 0) == 0);
}

TEST_CASE("test results serialize their verdict") {
  TestResult t;
  t.name = "x";
  t.statistic = 0.5;
  t.threshold = 0.1;
  t.pass = true;
  const auto j = t.to_json();
  CHECK(j["name"] == "x");
  CHECK(j["pass"] == true);
}
