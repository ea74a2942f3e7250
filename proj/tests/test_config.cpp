#include <doctest.h>

#include <string>

#include "polx/config.hpp"

using namespace polx;

TEST_CASE("defaults and overrides") {
  const RunConfig d = parse_config("");
  CHECK(d.medium.gamma == doctest::Approx(kTwoPi / 50));
  CHECK(d.evolve.snapshots.size() == 4);
  const RunConfig c = parse_config(
      "[medium]\nalpha = 0.5\ngamma = 2pi/17\n[source]\ngamma_j = pi/10\n"
      "[evolve]\nsnapshots = 0, 2e-3, 5e-3\nz_units = absolute\n[run]\nseed = 7\n");
  CHECK(c.medium.alpha == 0.5);
  CHECK(c.medium.gamma == doctest::Approx(kTwoPi / 17));
  CHECK(c.make_medium().gamma_j() == doctest::Approx(kPi / 10));
  CHECK(c.evolve.snapshots == std::vector<double>{0.0, 2e-3, 5e-3});
  CHECK(c.seed == 7);
  CHECK(c.to_json().find("\"alpha\":0.5") != std::string::npos);
}

TEST_CASE("diagnostics name the key and line") {
  try {
    parse_config("[medium]\nalpha = 1\nalpah = 2\n", "x.ini");
    FAIL("no throw");
  } catch (const ValidationError& e) {
    const std::string w = e.what();
    CHECK(w.find("x.ini:3") != std::string::npos);
    CHECK(w.find("medium.alpah") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[medium]\nalpha = abc\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[grid]\nn_radial = 1.5\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[medium]\nmodel = pink\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[nosuch]\na = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[medium]\ngamma = -1\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[medium\n"), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/polx.ini"), ValidationError);
}
