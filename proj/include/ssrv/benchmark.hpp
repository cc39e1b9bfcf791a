#pragma once

#include <string>
#include <vector>

#include "ssrv/baselines.hpp"
#include "ssrv/inference.hpp"
#include "ssrv/sim.hpp"
#include "ssrv/types.hpp"

namespace ssrv {

// Methods the replicate harness can score. oracle and flag_all are
// degenerate classifiers kept as scoring sanity anchors.
enum class MethodKind { sparse_ssrv, clr_degenerate, gaussian_clr, informed_load, oracle, flag_all };

struct BenchMethod {
    MethodKind kind = MethodKind::sparse_ssrv;
    double gamma2 = 0.0;  // gaussian_clr / informed_load only

    std::string name() const;
    static BenchMethod make(MethodKind kind);  // fills the default gamma2
};

struct ReplicateOutcome {
    ConfusionCounts counts;
    bool ok = false;
    std::string error;  // set when !ok
};

// One scenario x method cell: per-replicate confusion counts plus metric
// means over the replicates that completed.
struct BenchCell {
    std::size_t scenario = 0;
    std::string method;
    std::vector<ReplicateOutcome> replicates;
    int completed = 0;
    double mean_fdr = 0.0;
    double mean_tpr = 0.0;
    double mean_f_half = 0.0;
};

struct BenchmarkResult {
    std::vector<GeneratorSpec> scenarios;
    std::vector<std::string> methods;
    int replicates = 0;
    std::vector<BenchCell> cells;  // scenario-major, then method
    std::string generator_note;   // synthetic-data caveat, attached to every export
};

// Replicate r of scenario i uses dataset seed derive_stream(spec.seed, r),
// and every method analyzes that same dataset with the same analysis seed,
// so cross-method comparisons are seed-matched. A method failure on one
// replicate is recorded in the cell, not fatal.
BenchmarkResult run_benchmark(const std::vector<GeneratorSpec>& scenarios,
                              const std::vector<BenchMethod>& methods, int replicates,
                              const AnalysisConfig& config, int threads = 0);

// run_benchmark over copies of base with prop_relevant swept through the
// given levels.
BenchmarkResult sparsity_sweep(const GeneratorSpec& base, const std::vector<double>& prop_levels,
                               const std::vector<BenchMethod>& methods, int replicates,
                               const AnalysisConfig& config, int threads = 0);

// The caveat string embedded in BenchmarkResult and its file exports.
const std::string& generator_note();

}  // namespace ssrv
