#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "hapdeploy/grid.hpp"
#include "support/fixtures.hpp"

using namespace hapdeploy;

TEST_CASE("flatten follows the (i-1)*x_j + j mapping") {
  const GridScenario g5 = fixtures::make_grid(5, 5);
  CHECK(flatten(Site{1, 1}, g5) == 1);
  CHECK(flatten(Site{2, 3}, g5) == 8);
  CHECK(flatten(Site{5, 5}, g5) == 25);
  CHECK_THROWS_AS(flatten(Site{0, 1}, g5), IndexError);
  CHECK_THROWS_AS(flatten(Site{1, 6}, g5), IndexError);
  CHECK_THROWS_AS(unflatten(0, g5), IndexError);
  CHECK_THROWS_AS(unflatten(26, g5), IndexError);
}

TEST_CASE("flatten/unflatten round-trips on every grid up to 10x10") {
  for (int xi = 1; xi <= 10; ++xi) {
    for (int xj = 1; xj <= 10; ++xj) {
      GridScenario g = fixtures::make_grid(xi, xj);
      for (int i = 1; i <= xi; ++i) {
        for (int j = 1; j <= xj; ++j) {
          const Site s{i, j};
          REQUIRE(unflatten(flatten(s, g), g) == s);
        }
      }
      for (int n = 1; n <= g.site_count(); ++n) {
        REQUIRE(flatten(unflatten(n, g), g) == n);
      }
    }
  }
}

TEST_CASE("neighbors returns the 2, 3 or 4 grid-adjacent crossroads") {
  const GridScenario g5 = fixtures::make_grid(5, 5);
  auto as_set = [](const std::vector<Site>& v) {
    return std::set<Site>(v.begin(), v.end());
  };
  CHECK(as_set(neighbors(g5, Site{1, 1})) ==
        std::set<Site>{Site{1, 2}, Site{2, 1}});
  CHECK(as_set(neighbors(g5, Site{3, 3})) ==
        std::set<Site>{Site{2, 3}, Site{4, 3}, Site{3, 2}, Site{3, 4}});
  CHECK(as_set(neighbors(g5, Site{1, 3})) ==
        std::set<Site>{Site{1, 2}, Site{1, 4}, Site{2, 3}});

  const GridScenario g12 = fixtures::make_grid(1, 2);
  CHECK(as_set(neighbors(g12, Site{1, 1})) == std::set<Site>{Site{1, 2}});
  CHECK_THROWS_AS(neighbors(g5, Site{6, 1}), IndexError);
}

TEST_CASE("neighbors is symmetric") {
  for (auto [xi, xj] : {std::pair{1, 2}, {3, 3}, {4, 6}}) {
    const GridScenario g = fixtures::make_grid(xi, xj);
    for (int a = 0; a < g.site_count(); ++a) {
      const Site sa = site_at(a, g);
      for (const Site& sb : neighbors(g, sa)) {
        const auto back = neighbors(g, sb);
        REQUIRE(std::find(back.begin(), back.end(), sa) != back.end());
      }
    }
  }
}

TEST_CASE("grid validation names the violated invariant") {
  SECTION("valid baseline passes") {
    CHECK_NOTHROW(validate_grid(fixtures::make_grid(5, 5)));
  }
  SECTION("wet range must stay below wit range") {
    GridScenario g = fixtures::make_grid(5, 5);
    g.wet_range = 60.0;
    CHECK_THROWS_WITH(validate_grid(g),
                      Catch::Matchers::ContainsSubstring("r^E < r^D violated"));
  }
  SECTION("street length must exceed twice every radius") {
    GridScenario g = fixtures::make_grid(5, 5);
    g.crowded_range[site_ord(Site{1, 1}, g)] = 120.0;
    CHECK_THROWS_WITH(validate_grid(g), Catch::Matchers::ContainsSubstring(
                                            "l > 2*max(r^D, r^E, r^C) violated "
                                            "at crossroad (1,1)"));
  }
  SECTION("budget bounded by the site count") {
    GridScenario g = fixtures::make_grid(2, 2);
    g.budget = 5;
    CHECK_THROWS_AS(validate_grid(g), ValidationError);
  }
  SECTION("path loss exponent of one is rejected") {
    GridScenario g = fixtures::make_grid(3, 3);
    g.path_loss.exponent = 1.0;
    CHECK_THROWS_AS(validate_grid(g), ValidationError);
  }
  SECTION("reference distance must sit inside both ranges") {
    GridScenario g = fixtures::make_grid(3, 3);
    g.path_loss.ref_distance = 15.0;  // > r^E = 10
    CHECK_THROWS_AS(validate_grid(g), ValidationError);
  }
  SECTION("alpha outside [0,1]") {
    GridScenario g = fixtures::make_grid(3, 3);
    g.alpha = 1.5;
    CHECK_THROWS_AS(validate_grid(g), ValidationError);
  }
}

TEST_CASE("user validation checks speeds and turn probabilities") {
  const GridScenario g = fixtures::make_grid(2, 2);

  SECTION("uniform user passes") {
    CHECK_NOTHROW(validate_user(fixtures::make_user(g), g));
  }
  SECTION("crowd speed above base speed is rejected") {
    UserProfile u = fixtures::make_user(g, 1.0, 1.0);
    u.crowd_speed[2] = 1.5;
    CHECK_THROWS_WITH(validate_user(u, g),
                      Catch::Matchers::ContainsSubstring("crowd speed"));
  }
  SECTION("turn probabilities must normalise per crossroad") {
    UserProfile u = fixtures::make_user(g);
    u.turn_prob[{0, 1}] = 0.5;
    u.turn_prob[{0, 2}] = 0.4;
    CHECK_THROWS_WITH(validate_user(u, g),
                      Catch::Matchers::ContainsSubstring("sum to"));
  }
  SECTION("positive probability to a non-neighbour is rejected") {
    UserProfile u = fixtures::make_user(g);
    u.turn_prob[{0, 1}] = 0.5;
    u.turn_prob[{0, 2}] = 0.2;
    u.turn_prob[{0, 3}] = 0.3;  // diagonal
    CHECK_THROWS_WITH(validate_user(u, g),
                      Catch::Matchers::ContainsSubstring("non-neighbour"));
  }
  SECTION("zero probability to a non-neighbour is tolerated") {
    UserProfile u = fixtures::make_user(g);
    u.turn_prob[{0, 1}] = 0.5;
    u.turn_prob[{0, 2}] = 0.5;
    u.turn_prob[{0, 3}] = 0.0;
    CHECK_NOTHROW(validate_user(u, g));
  }
}
