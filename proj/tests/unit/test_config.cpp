#include <doctest.h>

#include <sstream>

#include "bubble/config.hpp"
#include "bubble/error.hpp"

using namespace bubble;

TEST_CASE("config text overrides defaults") {
  RunConfig cfg;
  cfg.apply_text("# comment\nmin_points = 24\nseed=9\n\nbootstrap_replicates = 50\nwindow_start = 2006Q1\n");
  CHECK(cfg.fit.min_points == 24);
  CHECK(cfg.seed == 9);
  CHECK(cfg.fit.bootstrap_replicates == 50);
  CHECK(cfg.window.first == Quarter{2006, 1});
}

TEST_CASE("config errors name the line") {
  RunConfig cfg;
  try {
    cfg.apply_text("seed = 1\nnot_a_key = 3\n");
    FAIL("expected an error");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  CHECK_THROWS_AS(cfg.apply_text("m_min = abc\n"), PreconditionError);
  CHECK_THROWS_AS(cfg.apply_text("just text\n"), PreconditionError);
}
