#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ssrv/rng.hpp"
#include "ssrv/sim.hpp"
#include "test_support.hpp"

using namespace ssrv;

TEST_CASE("effect magnitudes live on [1, 6] with the right center") {
    RngStream r(91, 3);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double m = detail::effect_magnitude(r);
        CHECK(m >= 1.0);
        CHECK(m <= 6.0);
        sum += m;
    }
    // 5 * Beta(1, 3) + 1 has mean 2.25.
    CHECK(std::fabs(sum / n - 2.25) < 0.05);
}

TEST_CASE("poisson counts match their first two moments") {
    RngStream r(92, 5);
    for (double lambda : {5.0, 100.0}) {  // product method, then the large-lambda path
        const int n = 20000;
        std::vector<double> v(static_cast<std::size_t>(n));
        for (auto& x : v) x = static_cast<double>(detail::poisson(r, lambda));
        const auto m = test::moments(v);
        CHECK(std::fabs(m.mean - lambda) < 3.0 * std::sqrt(lambda / n));
        CHECK(m.var == doctest::Approx(lambda).epsilon(0.08));
    }
    CHECK(detail::poisson(r, 0.0) == 0);
    CHECK_THROWS_AS(detail::poisson(r, -1.0), std::invalid_argument);
}

TEST_CASE("generator is deterministic in the spec seed") {
    GeneratorSpec spec;
    spec.features = 40;
    spec.samples = 16;
    spec.depth = 5000;
    spec.seed = 77;
    const auto a = generate(spec);
    const auto b = generate(spec);
    CHECK(a.table.counts == b.table.counts);
    CHECK(a.truth == b.truth);
    CHECK(a.true_loads == b.true_loads);
    CHECK(a.labels.x == b.labels.x);

    spec.seed = 78;
    const auto c = generate(spec);
    CHECK(a.table.counts != c.table.counts);
}

TEST_CASE("generated table shape, labels, and depths") {
    GeneratorSpec spec;
    spec.features = 30;
    spec.samples = 10;
    spec.depth = 2000;
    spec.prop_relevant = 0.3;
    spec.seed = 5;
    const auto ds = generate(spec);

    CHECK(ds.table.n_features() == 30);
    CHECK(ds.table.n_samples() == 10);
    // Fixed depth: every column sums to exactly spec.depth.
    for (double l : ds.table.depths) CHECK(l == 2000.0);

    // Controls first, half the samples case.
    CHECK(ds.labels.n_case() == 5);
    for (std::int64_t n = 0; n < 5; ++n) CHECK(ds.labels.x[static_cast<std::size_t>(n)] == 0);
    for (std::int64_t n = 5; n < 10; ++n) CHECK(ds.labels.x[static_cast<std::size_t>(n)] == 1);

    // 30 * 0.3 = 9 relevant features, magnitudes on the effect support.
    std::int64_t k = 0;
    for (double t : ds.truth) {
        if (t == 0.0) continue;
        ++k;
        CHECK(std::fabs(t) >= 1.0);
        CHECK(std::fabs(t) <= 6.0);
    }
    CHECK(k == 9);
    CHECK(ds.warnings.empty());
}

TEST_CASE("poisson depth jitter varies the column totals") {
    GeneratorSpec spec;
    spec.features = 20;
    spec.samples = 12;
    spec.depth = 1000;
    spec.poisson_depth = true;
    spec.seed = 9;
    const auto ds = generate(spec);
    bool any_off = false;
    for (double l : ds.table.depths) {
        CHECK(l > 800.0);
        CHECK(l < 1200.0);
        if (l != 1000.0) any_off = true;
    }
    CHECK(any_off);
}

TEST_CASE("all-positive effects when requested") {
    GeneratorSpec spec;
    spec.features = 50;
    spec.samples = 6;
    spec.depth = 500;
    spec.prop_relevant = 0.4;
    spec.pos_frac = 1.0;
    spec.seed = 21;
    const auto ds = generate(spec);
    for (double t : ds.truth) CHECK(t >= 0.0);
}

TEST_CASE("a zero relevant proportion yields a flagged pure null") {
    GeneratorSpec spec;
    spec.features = 25;
    spec.samples = 8;
    spec.depth = 800;
    spec.prop_relevant = 0.0;
    spec.seed = 2;
    const auto ds = generate(spec);
    for (double t : ds.truth) CHECK(t == 0.0);
    REQUIRE(ds.warnings.size() == 1);
    CHECK(ds.warnings[0] == "no relevant features: dataset is pure null");
}

TEST_CASE("the case load multiplier never touches the counts") {
    GeneratorSpec spec;
    spec.features = 35;
    spec.samples = 10;
    spec.depth = 3000;
    spec.seed = 13;
    const auto base = generate(spec);

    spec.case_load_multiplier = 2.5;
    const auto scaled = generate(spec);

    CHECK(scaled.table.counts == base.table.counts);
    CHECK(scaled.truth == base.truth);
    for (std::int64_t n = 0; n < 10; ++n) {
        const auto nn = static_cast<std::size_t>(n);
        if (base.labels.x[nn]) {
            CHECK(scaled.true_loads[nn] == base.true_loads[nn] * 2.5);
        } else {
            CHECK(scaled.true_loads[nn] == base.true_loads[nn]);
        }
    }
    REQUIRE(scaled.warnings.size() == 1);
    CHECK(scaled.warnings[0] ==
          "case_load_multiplier rescales true_loads only; truth records population "
          "composition effects");
}

TEST_CASE("spec validation rejects out-of-range settings") {
    GeneratorSpec ok;
    CHECK_NOTHROW(ok.validate());

    auto expect_throw = [](auto mutate) {
        GeneratorSpec s;
        mutate(s);
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    };
    expect_throw([](GeneratorSpec& s) { s.features = 1; });
    expect_throw([](GeneratorSpec& s) { s.samples = 1; });
    expect_throw([](GeneratorSpec& s) { s.depth = s.features - 1; });
    expect_throw([](GeneratorSpec& s) { s.prop_relevant = -0.1; });
    expect_throw([](GeneratorSpec& s) { s.prop_relevant = 1.1; });
    expect_throw([](GeneratorSpec& s) { s.pos_frac = 2.0; });
    expect_throw([](GeneratorSpec& s) { s.sigma0 = 0.0; });
    expect_throw([](GeneratorSpec& s) { s.load_sd = -0.5; });
    expect_throw([](GeneratorSpec& s) { s.case_load_multiplier = 0.0; });
}

TEST_CASE("confusion counts and scores on hand-worked calls") {
    const std::vector<double> truth = {0.0, 1.2, 0.0, -0.5};
    const std::vector<bool> called = {true, true, false, false};
    const auto c = score_calls(called, truth);
    CHECK(c.tp == 1);
    CHECK(c.fp == 1);
    CHECK(c.fn == 1);
    CHECK(c.tn == 1);
    CHECK(fdr_of(c) == 0.5);
    CHECK(tpr_of(c) == 0.5);
    // F0.5 = 1.25 TP / (1.25 TP + 0.25 FN + FP).
    CHECK(f_half_of(c) == 0.5);

    // Vacuous cases: nothing to find and nothing called.
    const auto v = score_calls({false, false}, {0.0, 0.0});
    CHECK(fdr_of(v) == 0.0);
    CHECK(tpr_of(v) == 1.0);
    CHECK(f_half_of(v) == 1.0);

    CHECK_THROWS_AS(score_calls({true}, {0.0, 1.0}), std::invalid_argument);
}
