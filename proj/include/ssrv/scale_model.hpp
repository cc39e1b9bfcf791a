#pragma once

#include "ssrv/measurement.hpp"
#include "ssrv/rng.hpp"
#include "ssrv/types.hpp"

namespace ssrv {

enum class ScaleModelKind { laplace, bootstrap };

// One fitted scale model: S draws of the scalar shift theta_perp. The
// shift for draw s is minus the Parzen mode of that draw's LFC vector,
// plus model-specific perturbation (Gaussian noise for Laplace, resampling
// variability for the bootstrap).
struct ScaleModelFit {
    ScaleModelKind kind = ScaleModelKind::laplace;
    std::vector<double> shift_draws;           // size S
    std::vector<double> mode_point_estimates;  // size S, Parzen mode per draw, pre-noise
    std::vector<double> laplace_tau2;          // size S for Laplace fits, else empty
    double variance = 0.0;                     // sample variance of shift_draws
    std::vector<std::string> warnings;
};

// Laplace model: per draw, tau^2 = -1 / (log p)''(mode) from the analytic
// KDE curvature, then shift = -mode + Normal(0, tau^2). Draw s consumes
// rng.child(s), so draws may run in any order. comp_lfc_draws holds one
// draw per column (D rows, S columns).
ScaleModelFit laplace_scale_fit(const MatrixD& comp_lfc_draws, const AnalysisConfig& config,
                                const RngStream& rng);

// Test hooks for the bootstrap stages; production uses the defaults.
struct BootstrapOptions {
    bool resample_samples = true;
    bool resample_features = true;
    const CompositionDraw* fixed_composition = nullptr;  // bypass posterior sampling
};

// Two-stage bootstrap: per draw, (i) a composition draw keyed by
// (config.seed, draw index) exactly as the main pipeline's, (ii) a
// stratified within-condition resample of sample columns with the LFC
// recomputed, (iii) a resample of the D LFC entries, (iv) shift = -mode of
// the resampled vector. rng.child(s) drives only the resampling stages.
ScaleModelFit bootstrap_scale_fit(const CountTable& table, const ConditionLabels& labels,
                                  const DirichletPosterior& post, const AnalysisConfig& config,
                                  const RngStream& rng, const BootstrapOptions& options = {});

// Retains the fit with strictly larger dispersion; ties within 1e-12 go to
// the bootstrap (the more conservative, assumption-light model).
const ScaleModelFit& select_scale_model(const ScaleModelFit& laplace, const ScaleModelFit& bootstrap);

namespace detail {

struct DrawScaleResult {
    double shift = 0.0;
    double mode = 0.0;
    double tau2 = 0.0;
    bool curvature_fallback = false;
};

// Single-draw kernels shared by the standalone fits above and the fused
// pipeline in run_sparse_ssrv; both must consume streams identically.
DrawScaleResult laplace_one(const std::vector<double>& lfc_values, const AnalysisConfig& config,
                            RngStream noise);
DrawScaleResult bootstrap_one(const MatrixD& log_comp, const std::vector<std::int64_t>& case_cols,
                              const std::vector<std::int64_t>& control_cols,
                              const AnalysisConfig& config, RngStream draw_rng,
                              const BootstrapOptions& options);

double sample_variance(const std::vector<double>& v);

}  // namespace detail

}  // namespace ssrv
