#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ssrv/benchmark.hpp"
#include "test_support.hpp"

using namespace ssrv;

namespace {

GeneratorSpec quick_scenario(std::uint64_t seed) {
    GeneratorSpec s;
    s.features = 25;
    s.samples = 10;
    s.depth = 2000;
    s.prop_relevant = 0.2;
    s.seed = seed;
    return s;
}

AnalysisConfig quick_config() {
    AnalysisConfig cfg;
    cfg.num_draws = 12;
    cfg.density_diagnostic = false;
    return cfg;
}

const BenchCell& cell_of(const BenchmarkResult& res, std::size_t scenario,
                         const std::string& method) {
    for (const auto& c : res.cells) {
        if (c.scenario == scenario && c.method == method) return c;
    }
    throw std::runtime_error("cell not found: " + method);
}

}  // namespace

TEST_CASE("method naming and defaults") {
    CHECK(BenchMethod::make(MethodKind::sparse_ssrv).name() == "sparse-ssrv");
    CHECK(BenchMethod::make(MethodKind::clr_degenerate).name() == "clr");
    CHECK(BenchMethod::make(MethodKind::oracle).name() == "oracle");
    CHECK(BenchMethod::make(MethodKind::flag_all).name() == "flag-all");
    CHECK(BenchMethod::make(MethodKind::gaussian_clr).gamma2 == 0.25);
    CHECK(BenchMethod::make(MethodKind::informed_load).gamma2 == 0.5);
}

TEST_CASE("degenerate classifiers anchor the scoring") {
    const std::vector<GeneratorSpec> scenarios = {quick_scenario(100)};
    const std::vector<BenchMethod> methods = {BenchMethod::make(MethodKind::oracle),
                                              BenchMethod::make(MethodKind::flag_all)};
    const auto res = run_benchmark(scenarios, methods, 4, quick_config());
    REQUIRE(res.cells.size() == 2);

    const auto& oracle = cell_of(res, 0, "oracle");
    CHECK(oracle.completed == 4);
    CHECK(oracle.mean_fdr == 0.0);
    CHECK(oracle.mean_tpr == 1.0);
    CHECK(oracle.mean_f_half == 1.0);

    // flag-all calls every feature: TPR 1 and FDR = the null fraction
    // (exactly 0.8 here since 25 * 0.2 = 5 relevant features per dataset).
    const auto& all = cell_of(res, 0, "flag-all");
    CHECK(all.mean_tpr == 1.0);
    CHECK(all.mean_fdr == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("benchmark runs are deterministic and seed-matched across methods") {
    const std::vector<GeneratorSpec> scenarios = {quick_scenario(7)};
    const std::vector<BenchMethod> methods = {BenchMethod::make(MethodKind::sparse_ssrv),
                                              BenchMethod::make(MethodKind::clr_degenerate)};
    const auto a = run_benchmark(scenarios, methods, 3, quick_config());
    const auto b = run_benchmark(scenarios, methods, 3, quick_config());

    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].method == b.cells[i].method);
        CHECK(a.cells[i].mean_fdr == b.cells[i].mean_fdr);
        CHECK(a.cells[i].mean_tpr == b.cells[i].mean_tpr);
        REQUIRE(a.cells[i].replicates.size() == 3);
        for (std::size_t r = 0; r < 3; ++r) {
            CHECK(a.cells[i].replicates[r].ok);
            CHECK(a.cells[i].replicates[r].counts.tp == b.cells[i].replicates[r].counts.tp);
            CHECK(a.cells[i].replicates[r].counts.fp == b.cells[i].replicates[r].counts.fp);
        }
    }
    CHECK(a.generator_note == generator_note());
    CHECK_FALSE(a.generator_note.empty());
}

TEST_CASE("a failing configuration is recorded per replicate, not thrown") {
    // informed_load scores against generator loads; an unsatisfiable filter
    // leaves no features and every analysis replicate fails.
    auto scenario = quick_scenario(3);
    auto cfg = quick_config();
    cfg.filter_min_mean_count = 1e18;

    const std::vector<BenchMethod> methods = {BenchMethod::make(MethodKind::sparse_ssrv),
                                              BenchMethod::make(MethodKind::oracle)};
    const auto res = run_benchmark({scenario}, methods, 2, cfg);

    const auto& ssrv_cell = cell_of(res, 0, "sparse-ssrv");
    CHECK(ssrv_cell.completed == 0);
    for (const auto& rep : ssrv_cell.replicates) {
        CHECK_FALSE(rep.ok);
        CHECK_FALSE(rep.error.empty());
    }
    // The oracle never runs the analysis pipeline, so it still completes.
    CHECK(cell_of(res, 0, "oracle").completed == 2);
}

TEST_CASE("sparsity sweep is run_benchmark over copies of the base scenario") {
    const auto base = quick_scenario(11);
    const std::vector<BenchMethod> methods = {BenchMethod::make(MethodKind::flag_all)};
    const auto cfg = quick_config();

    const auto swept = sparsity_sweep(base, {0.2, 0.6}, methods, 2, cfg);
    REQUIRE(swept.scenarios.size() == 2);
    CHECK(swept.scenarios[0].prop_relevant == 0.2);
    CHECK(swept.scenarios[1].prop_relevant == 0.6);

    auto copy = base;
    copy.prop_relevant = 0.6;
    const auto direct = run_benchmark({copy}, methods, 2, cfg);
    const auto& via_sweep = cell_of(swept, 1, "flag-all");
    const auto& via_direct = cell_of(direct, 0, "flag-all");
    CHECK(via_sweep.mean_fdr == via_direct.mean_fdr);
    CHECK(via_sweep.mean_tpr == via_direct.mean_tpr);

    // Denser truth lowers the flag-all false discovery rate: 1 - 0.6 < 1 - 0.2.
    CHECK(cell_of(swept, 1, "flag-all").mean_fdr < cell_of(swept, 0, "flag-all").mean_fdr);
}

TEST_CASE("benchmark input validation") {
    const std::vector<BenchMethod> methods = {BenchMethod::make(MethodKind::oracle)};
    CHECK_THROWS_AS(run_benchmark({}, methods, 2, quick_config()), std::invalid_argument);
    CHECK_THROWS_AS(run_benchmark({quick_scenario(1)}, {}, 2, quick_config()),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_benchmark({quick_scenario(1)}, methods, 0, quick_config()),
                    std::invalid_argument);
}
