#include <algorithm>
#include <set>

#include "doctest.h"
#include "frameext/grid.hpp"

using namespace frameext;

TEST_SUITE_BEGIN("grid");

TEST_CASE("spatial grid coordinates, 1D affine map") {
  const GridSpec spec(4, 2, 0.5, 1);
  const auto points = build_spatial_grid(spec);
  REQUIRE(points.size() == 4);
  const double expected[] = {-0.5, -0.25, 0.0, 0.25};
  for (int k = 0; k < 4; ++k) {
    CHECK(points[static_cast<std::size_t>(k)].index == MultiIndex{k});
    CHECK(points[static_cast<std::size_t>(k)].coordinate[0] ==
          doctest::Approx(expected[k]).epsilon(1e-15));
  }
}

TEST_CASE("spatial grid row-major order, 2D") {
  const GridSpec spec(2, 2, 2.0, 2);
  const auto points = build_spatial_grid(spec);
  REQUIRE(points.size() == 4);
  CHECK(points[0].index == MultiIndex{0, 0});
  CHECK(points[1].index == MultiIndex{0, 1});
  CHECK(points[2].index == MultiIndex{1, 0});
  CHECK(points[3].index == MultiIndex{1, 1});
}

TEST_CASE("spatial grid extremes at n_r=16") {
  const GridSpec spec(16, 5, 2.0, 2);
  const auto points = build_spatial_grid(spec);
  CHECK(points.size() == 256);
  double max_coord = -1e300, min_coord = 1e300;
  for (const auto& p : points)
    for (double x : p.coordinate) {
      max_coord = std::max(max_coord, x);
      min_coord = std::min(min_coord, x);
    }
  CHECK(max_coord == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(min_coord == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("frequency window conventions") {
  SUBCASE("odd window is symmetric") {
    const GridSpec spec(8, 3, 2.0, 1);
    const auto window = build_freq_window(spec);
    REQUIRE(window.size() == 3);
    CHECK(window.indices[0] == MultiIndex{-1});
    CHECK(window.indices[1] == MultiIndex{0});
    CHECK(window.indices[2] == MultiIndex{1});
  }
  SUBCASE("even window leans negative") {
    const GridSpec spec(8, 4, 2.0, 1);
    const auto window = build_freq_window(spec);
    REQUIRE(window.size() == 4);
    CHECK(window.indices.front() == MultiIndex{-2});
    CHECK(window.indices.back() == MultiIndex{1});
  }
  SUBCASE("2D window is the lexicographic tensor product") {
    const GridSpec spec(8, 3, 2.0, 2);
    const auto window = build_freq_window(spec);
    REQUIRE(window.size() == 9);
    CHECK(window.indices.front() == MultiIndex{-1, -1});
    CHECK(window.indices[1] == MultiIndex{-1, 0});
    CHECK(window.indices.back() == MultiIndex{1, 1});
    CHECK(std::is_sorted(window.indices.begin(), window.indices.end()));
  }
}

TEST_CASE("odd window closed under negation") {
  for (int n_lambda : {1, 3, 5, 7}) {
    const GridSpec spec(8, n_lambda, 2.0, 2);
    const auto window = build_freq_window(spec);
    std::set<MultiIndex> all(window.indices.begin(), window.indices.end());
    for (const auto& l : window.indices) {
      MultiIndex neg = l;
      for (int& v : neg) v = -v;
      CHECK(all.count(neg) == 1);
    }
  }
}

TEST_CASE("flat index basics") {
  const GridSpec spec(4, 3, 2.0, 2);
  CHECK(flat_index({0, 0}, spec) == 0);
  CHECK(flat_index({1, 2}, spec) == 6);
  CHECK_THROWS_AS(flat_index({4, 0}, spec), std::out_of_range);
  CHECK_THROWS_AS(flat_index({0, -1}, spec), std::out_of_range);
  CHECK_THROWS_AS(unflatten(16, spec), std::out_of_range);
}

TEST_CASE("flat index round trip, exhaustive up to n_r=8") {
  for (int dim : {1, 2, 3}) {
    for (int n_r : {1, 2, 5, 8}) {
      const GridSpec spec(n_r, 1, 2.0, dim);
      const std::size_t total = spec.grid_point_count();
      for (std::size_t flat = 0; flat < total; ++flat) {
        const MultiIndex k = unflatten(flat, spec);
        CHECK(flat_index(k, spec) == flat);
      }
    }
  }
}

TEST_CASE("set sizes follow the grid parameters") {
  const GridSpec spec(8, 5, 2.0, 2);
  CHECK(build_spatial_grid(spec).size() == 64);
  CHECK(build_freq_window(spec).size() == 25);
  CHECK(spec.grid_point_count() == 64);
  CHECK(spec.freq_count() == 25);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(GridSpec(4, 5), std::invalid_argument);   // n_lambda > n_r
  CHECK_THROWS_AS(GridSpec(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(4, 2, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(4, 2, 2.0, 0), std::invalid_argument);
}

TEST_CASE("frequency grid positions wrap modulo n_r") {
  const GridSpec spec(8, 5, 2.0, 2);
  CHECK(freq_grid_position({0, 0}, spec) == 0);
  CHECK(freq_grid_position({-1, 0}, spec) == 7 * 8);
  CHECK(freq_grid_position({2, -2}, spec) == 2 * 8 + 6);
}

TEST_SUITE_END();
