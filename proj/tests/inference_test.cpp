#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ssrv/inference.hpp"
#include "ssrv/rng.hpp"
#include "ssrv/sim.hpp"
#include "test_support.hpp"

using namespace ssrv;

TEST_CASE("step-up q-values on a hand-worked triple") {
    const auto q = bh_qvalues({0.001, 0.02, 0.9});
    REQUIRE(q.size() == 3);
    CHECK(q[0] == doctest::Approx(0.003).epsilon(1e-14));
    CHECK(q[1] == doctest::Approx(0.03).epsilon(1e-14));
    CHECK(q[2] == doctest::Approx(0.9).epsilon(1e-14));

    CHECK(bh_qvalues({}).empty());
    CHECK_THROWS_AS(bh_qvalues({0.5, -0.1}), std::invalid_argument);
    CHECK_THROWS_AS(bh_qvalues({0.5, std::nan("")}), std::invalid_argument);
}

TEST_CASE("q-values dominate p-values and stay within the unit interval") {
    RngStream r(33, 1);
    std::vector<double> p(200);
    for (auto& x : p) x = std::pow(r.uniform(), 3.0);  // skewed toward 0
    const auto q = bh_qvalues(p);
    REQUIRE(q.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(q[i] >= p[i]);
        CHECK(q[i] <= 1.0);
    }

    // Step-up: in p-sorted order the q sequence is non-decreasing.
    std::vector<std::size_t> order(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });
    for (std::size_t i = 1; i < order.size(); ++i) CHECK(q[order[i]] >= q[order[i - 1]]);
}

TEST_CASE("tail probability has the add-one Monte-Carlo floor") {
    const std::int64_t S = 128;
    MatrixD theta(2, S);
    RngStream r(70, 4);
    for (std::int64_t s = 0; s < S; ++s) {
        theta.at(0, s) = 1.0 + 0.1 * r.normal();      // all positive
        theta.at(1, s) = (s % 2 == 0) ? 0.7 : -0.7;   // perfectly balanced
    }
    const auto sum = summarize(theta, 0.05);
    REQUIRE(sum.size() == 2);
    CHECK(sum[0].tail_p == doctest::Approx(2.0 / 129.0).epsilon(1e-14));
    CHECK(sum[0].tail_p == doctest::Approx(0.0155038759689922).epsilon(1e-12));
    CHECK(sum[0].significant);

    // 64 of each sign: 2 * (64 + 1) / 129 > 1 caps at 1.
    CHECK(sum[1].tail_p == 1.0);
    CHECK_FALSE(sum[1].significant);
}

TEST_CASE("summary row exposes moments and an equal-tailed interval") {
    MatrixD theta(1, 5);
    theta.at(0, 0) = 3.0;
    theta.at(0, 1) = 1.0;
    theta.at(0, 2) = 5.0;
    theta.at(0, 3) = 2.0;
    theta.at(0, 4) = 4.0;
    const auto sum = summarize(theta, 0.2);
    REQUIRE(sum.size() == 1);
    CHECK(sum[0].mean_lfc == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(sum[0].sd_lfc == doctest::Approx(std::sqrt(2.5)).epsilon(1e-14));
    // Interpolated order statistics at 0.1 and 0.9 over {1,2,3,4,5}.
    CHECK(sum[0].ci_low == doctest::Approx(1.4).epsilon(1e-14));
    CHECK(sum[0].ci_high == doctest::Approx(4.6).epsilon(1e-14));
}

TEST_CASE("summarize validates its inputs") {
    MatrixD ok(2, 4);
    for (auto& x : ok.data) x = 0.1;
    CHECK_THROWS_AS(summarize(MatrixD(2, 1), 0.05), std::invalid_argument);
    CHECK_THROWS_AS(summarize(MatrixD(0, 4), 0.05), std::invalid_argument);
    CHECK_THROWS_AS(summarize(ok, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(summarize(ok, 1.0), std::invalid_argument);
}

TEST_CASE("full pipeline runs are reproducible and internally consistent") {
    GeneratorSpec spec;
    spec.features = 30;
    spec.samples = 12;
    spec.depth = 3000;
    spec.prop_relevant = 0.3;
    spec.seed = 41;
    const auto ds = generate(spec);

    AnalysisConfig cfg;
    cfg.num_draws = 16;
    cfg.seed = 5;

    const auto a = run_sparse_ssrv(ds.table, ds.labels, cfg);
    const auto b = run_sparse_ssrv(ds.table, ds.labels, cfg);

    REQUIRE(a.summaries.size() == b.summaries.size());
    REQUIRE(a.summaries.size() == 30);
    CHECK(a.feature_ids == b.feature_ids);
    CHECK(a.scale_model == b.scale_model);
    CHECK(a.scale_variance == b.scale_variance);
    for (std::size_t d = 0; d < a.summaries.size(); ++d) {
        CHECK(a.summaries[d].mean_lfc == b.summaries[d].mean_lfc);
        CHECK(a.summaries[d].q_value == b.summaries[d].q_value);
        CHECK(a.summaries[d].significant == b.summaries[d].significant);
    }

    for (const auto& s : a.summaries) {
        CHECK(s.ci_low <= s.ci_high);
        CHECK(s.q_value >= s.tail_p);
        CHECK(s.significant == (s.q_value <= cfg.target_fdr));
        CHECK(s.sd_lfc >= 0.0);
    }
    CHECK((a.scale_model == "laplace" || a.scale_model == "bootstrap"));
    const double picked = (a.scale_model == "laplace") ? a.laplace_variance : a.bootstrap_variance;
    CHECK(a.scale_variance == picked);

    // Density diagnostic is on by default: one averaged density per grid
    // point and one mode per draw.
    CHECK(a.density.grid.size() == static_cast<std::size_t>(cfg.kde_grid_size));
    CHECK(a.density.mean_density.size() == a.density.grid.size());
    CHECK(a.density.mode_draws.size() == static_cast<std::size_t>(cfg.num_draws));

    AnalysisConfig no_density = cfg;
    no_density.density_diagnostic = false;
    const auto c = run_sparse_ssrv(ds.table, ds.labels, no_density);
    CHECK(c.density.grid.empty());
    for (std::size_t d = 0; d < a.summaries.size(); ++d)
        CHECK(c.summaries[d].mean_lfc == a.summaries[d].mean_lfc);
}

TEST_CASE("convergence probe emits one row per ladder rung") {
    GeneratorSpec base;
    base.samples = 10;
    base.prop_relevant = 0.2;
    base.seed = 3;

    AnalysisConfig cfg;
    cfg.num_draws = 8;

    const auto rows = consistency_probe(base, {{500, 20}}, 2, cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].depth == 500);
    CHECK(rows[0].features == 20);
    CHECK(rows[0].median_rmse >= 0.0);
    CHECK(std::isfinite(rows[0].median_rmse));
    CHECK(rows[0].median_mean_sd > 0.0);
}
