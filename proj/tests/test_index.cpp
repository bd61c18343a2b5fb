#include "doctest.h"

#include "core/index.hpp"

using namespace mlbicgstabt;

TEST_CASE("cycle index examples") {
    CHECK(cycle_index(4, 5) == 1);
    CHECK(cycle_index(3, 1) == 0);
    CHECK(cycle_index(3, -2) == -1);
    CHECK(cycle_index(3, 0) == -1);
    CHECK(cycle_index(1, 7) == 6);
}

TEST_CASE("phase index examples") {
    CHECK(phase_index(4, 5) == 1);
    CHECK(phase_index(3, 3) == 3);
    CHECK(phase_index(3, -2) == 1);
    CHECK(phase_index(3, 0) == 3);
}

TEST_CASE("index functions reject n <= 0") {
    CHECK_THROWS_AS(cycle_index(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(phase_index(-2, 1), std::invalid_argument);
    CHECK_THROWS_AS(split_index(0, 5), std::invalid_argument);
}

TEST_CASE("k = n g + r with r in 1..n") {
    for (std::int64_t n = 1; n <= 16; ++n) {
        for (std::int64_t k = -200; k <= 200; ++k) {
            const auto [g, r] = split_index(n, k);
            REQUIRE(k == n * g + r);
            REQUIRE(r >= 1);
            REQUIRE(r <= n);
            REQUIRE(g == cycle_index(n, k));
        }
    }
}

TEST_CASE("jn + i maps to (j, i)") {
    for (std::int64_t n = 1; n <= 6; ++n) {
        for (std::int64_t j = -4; j <= 4; ++j) {
            for (std::int64_t i = 1; i <= n; ++i) {
                CHECK(cycle_index(n, j * n + i) == j);
                CHECK(phase_index(n, j * n + i) == i);
            }
        }
    }
}

static_assert(cycle_index(4, 5) == 1);
static_assert(phase_index(3, -2) == 1);
