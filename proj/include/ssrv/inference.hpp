#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssrv/scale_model.hpp"
#include "ssrv/sim.hpp"
#include "ssrv/types.hpp"

namespace ssrv {

struct PosteriorSummary {
    double mean_lfc = 0.0;
    double sd_lfc = 0.0;
    double ci_low = 0.0;   // equal-tailed interval at level 1 - target_fdr
    double ci_high = 0.0;
    double tail_p = 1.0;   // two-sided Monte-Carlo tail probability, add-one smoothed
    double q_value = 1.0;  // Benjamini-Hochberg over retained features
    bool significant = false;
};

// Sparsity diagnostic: the per-draw LFC densities averaged on a common
// grid, plus the per-draw Parzen mode locations. A well-separated density
// peak near the null mass is what the rank-one update keys on.
struct DensityDiagnostic {
    std::vector<double> grid;
    std::vector<double> mean_density;
    std::vector<double> mode_draws;  // size S
};

struct DaReport {
    std::vector<std::string> feature_ids;  // retained features, table order
    std::vector<PosteriorSummary> summaries;
    std::string scale_model;  // "laplace" or "bootstrap"
    double scale_variance = 0.0;
    double laplace_variance = 0.0;
    double bootstrap_variance = 0.0;
    AnalysisConfig config;  // as run, after defaulting
    std::vector<std::string> warnings;
    DensityDiagnostic density;  // empty when density_diagnostic is off
    double elapsed_seconds = 0.0;
    int threads_used = 1;
};

// Step-up q-values; ties keep their input order. Output is >= input
// pointwise and capped at 1.
std::vector<double> bh_qvalues(const std::vector<double>& p_values);

// theta_draws holds one posterior draw per column (D rows, S >= 2 columns).
std::vector<PosteriorSummary> summarize(const MatrixD& theta_draws, double target_fdr);

// Full pipeline: validate and filter, fit per-sample posteriors, draw S
// compositions, run both scale models on shared draws, keep the one with
// the larger shift variance, assemble theta via the rank-one update, and
// summarize. threads <= 0 means the environment default.
DaReport run_sparse_ssrv(const CountTable& table, const ConditionLabels& labels,
                         const AnalysisConfig& config, int threads = 0);

struct ConvergenceRow {
    std::int64_t depth = 0;
    std::int64_t features = 0;
    double median_rmse = 0.0;     // RMSE of mean_lfc against generator truth
    double median_mean_sd = 0.0;  // mean posterior sd, median over seeds
};

// Convergence diagnostic: runs the full pipeline on synthetic data along a
// (depth, features) ladder and reports per-rung medians over seeds. Both
// columns should fall as depth and dimension grow together.
std::vector<ConvergenceRow> consistency_probe(const GeneratorSpec& base,
                                              const std::vector<std::pair<std::int64_t, std::int64_t>>& ladder,
                                              int seeds_per_rung, const AnalysisConfig& config,
                                              int threads = 0);

}  // namespace ssrv
