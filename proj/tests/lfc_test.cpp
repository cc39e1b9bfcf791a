#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ssrv/lfc.hpp"
#include "test_support.hpp"

using namespace ssrv;

TEST_CASE("group contrast of log compositions, frozen two-sample example") {
    // control (0.5, 0.5), case (0.8, 0.2):
    // theta = (log 0.8 - log 0.5, log 0.2 - log 0.5).
    const auto comp = test::comp_from_columns({{0.5, 0.5}, {0.8, 0.2}});
    ConditionLabels labels;
    labels.x = {0, 1};
    const auto theta = comp_lfc(comp, labels);
    REQUIRE(theta.size() == 2);
    CHECK(theta[0] == doctest::Approx(0.47000362924573563).epsilon(1e-14));
    CHECK(theta[1] == doctest::Approx(-0.916290731874155).epsilon(1e-14));
}

TEST_CASE("swapping the group labels negates the contrast exactly") {
    const auto comp = test::comp_from_columns({{0.2, 0.3, 0.5},
                                               {0.1, 0.6, 0.3},
                                               {0.25, 0.25, 0.5},
                                               {0.4, 0.4, 0.2}});
    ConditionLabels labels;
    labels.x = {0, 0, 1, 1};
    ConditionLabels swapped;
    swapped.x = {1, 1, 0, 0};

    const auto theta = comp_lfc(comp, labels);
    const auto mirror = comp_lfc(comp, swapped);
    REQUIRE(theta.size() == mirror.size());
    // Bitwise antisymmetry: the same two scaled sums subtracted in opposite
    // order, and IEEE subtraction satisfies fl(y - x) = -fl(x - y).
    for (std::size_t d = 0; d < theta.size(); ++d) CHECK(mirror[d] == -theta[d]);
}

TEST_CASE("linear contrast with +-1/n weights matches the group contrast") {
    const auto comp = test::comp_from_columns({{0.2, 0.3, 0.5},
                                               {0.1, 0.6, 0.3},
                                               {0.25, 0.25, 0.5},
                                               {0.4, 0.4, 0.2},
                                               {0.15, 0.35, 0.5}});
    ConditionLabels labels;
    labels.x = {0, 0, 1, 1, 1};

    const std::vector<double> w = {-0.5, -0.5, 1.0 / 3, 1.0 / 3, 1.0 / 3};
    const auto via_weights = linear_contrast(comp, w);
    const auto via_groups = comp_lfc(comp, labels);
    REQUIRE(via_weights.size() == via_groups.size());
    for (std::size_t d = 0; d < via_weights.size(); ++d)
        CHECK(via_weights[d] == doctest::Approx(via_groups[d]).epsilon(1e-12));

    // Zero weights drop the column from the sum, so a non-finite log there
    // never reaches the output.
    auto polluted = comp;
    polluted.at(0, 4) = std::nan("");
    const std::vector<double> w2 = {-0.5, -0.5, 0.5, 0.5, 0.0};
    for (double v : linear_contrast(polluted, w2)) CHECK(std::isfinite(v));

    CHECK_THROWS_AS(linear_contrast(comp, {1.0, -1.0}), std::invalid_argument);
}

TEST_CASE("rank-one update adds the scalar to every entry") {
    const std::vector<double> theta = {1.0, -2.0, 0.5, 4.0};
    const auto up = rank1_update(theta, 0.75);
    const auto down = rank1_update(theta, -0.25);
    REQUIRE(up.size() == theta.size());
    for (std::size_t d = 0; d < theta.size(); ++d) {
        CHECK(up[d] == theta[d] + 0.75);
        CHECK(down[d] == theta[d] - 0.25);
    }
}

TEST_CASE("contrast requires both condition groups") {
    const auto comp = test::comp_from_columns({{0.5, 0.5}, {0.8, 0.2}});
    ConditionLabels all_case;
    all_case.x = {1, 1};
    CHECK_THROWS_WITH_AS(comp_lfc(comp, all_case), "control group is empty",
                         std::invalid_argument);

    ConditionLabels mismatched;
    mismatched.x = {0, 1, 1};
    CHECK_THROWS_AS(comp_lfc(comp, mismatched), std::invalid_argument);

    // The resampling entry point takes explicit column multisets and guards
    // them itself.
    const auto logs = detail::log_matrix(comp);
    CHECK_THROWS_WITH_AS(detail::contrast_from_log_columns(logs, {0, 1}, {}),
                         "comp_lfc: both condition groups must be non-empty",
                         std::invalid_argument);
}
