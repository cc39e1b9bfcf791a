#include "ssrv/scale_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ssrv/kde.hpp"
#include "ssrv/lfc.hpp"

namespace ssrv {

namespace detail {

double sample_variance(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(n - 1);
}

DrawScaleResult laplace_one(const std::vector<double>& lfc_values, const AnalysisConfig& config,
                            RngStream noise) {
    const KdeSpec spec = make_kde_spec(lfc_values, config);
    const double mode = parzen_mode(lfc_values, spec);

    double curv = kde_log_density_derivatives(lfc_values, spec, mode).second;
    bool fallback = false;
    if (!std::isfinite(curv) || curv >= 0.0) {
        // Numerically flat top: central difference of log p at grid spacing.
        fallback = true;
        const double delta = (spec.hi - spec.lo) / static_cast<double>(spec.grid_size - 1);
        const double lm = std::log(kde_density(lfc_values, spec, mode - delta));
        const double l0 = std::log(kde_density(lfc_values, spec, mode));
        const double lp = std::log(kde_density(lfc_values, spec, mode + delta));
        curv = (lp - 2.0 * l0 + lm) / (delta * delta);
    }

    DrawScaleResult out;
    out.mode = mode;
    out.curvature_fallback = fallback;
    if (std::isfinite(curv) && curv < 0.0) {
        out.tau2 = -1.0 / curv;
    } else {
        // No curvature information at all; fall back to the dispersion of
        // the values themselves rather than claiming false precision.
        out.tau2 = sample_variance(lfc_values);
        out.curvature_fallback = true;
    }
    const double eps = noise.normal() * std::sqrt(out.tau2);
    out.shift = -mode + eps;
    return out;
}

DrawScaleResult bootstrap_one(const MatrixD& log_comp, const std::vector<std::int64_t>& case_cols,
                              const std::vector<std::int64_t>& control_cols,
                              const AnalysisConfig& config, RngStream draw_rng,
                              const BootstrapOptions& options) {
    RngStream col_rng = draw_rng.child(0);
    RngStream entry_rng = draw_rng.child(1);

    std::vector<double> theta;
    if (options.resample_samples) {
        std::vector<std::int64_t> case_sel(case_cols.size());
        for (auto& c : case_sel) {
            c = case_cols[col_rng.uniform_int(case_cols.size())];
        }
        std::vector<std::int64_t> ctrl_sel(control_cols.size());
        for (auto& c : ctrl_sel) {
            c = control_cols[col_rng.uniform_int(control_cols.size())];
        }
        theta = detail::contrast_from_log_columns(log_comp, case_sel, ctrl_sel);
    } else {
        theta = detail::contrast_from_log_columns(log_comp, case_cols, control_cols);
    }

    if (options.resample_features) {
        const std::size_t D = theta.size();
        std::vector<double> resampled(D);
        for (std::size_t i = 0; i < D; ++i) {
            resampled[i] = theta[entry_rng.uniform_int(D)];
        }
        theta.swap(resampled);
    }

    // Bandwidth comes from the resampled vector itself: each bootstrap
    // replicate carries its own smoothing.
    const KdeSpec spec = make_kde_spec(theta, config);
    DrawScaleResult out;
    out.mode = parzen_mode(theta, spec);
    out.shift = -out.mode;
    return out;
}

}  // namespace detail

ScaleModelFit laplace_scale_fit(const MatrixD& comp_lfc_draws, const AnalysisConfig& config,
                                const RngStream& rng) {
    config.validate();
    const std::int64_t S = comp_lfc_draws.cols;
    const std::int64_t D = comp_lfc_draws.rows;
    if (S < 2 || D < 2) {
        throw std::invalid_argument("laplace_scale_fit: need at least 2 draws of 2 features");
    }

    ScaleModelFit fit;
    fit.kind = ScaleModelKind::laplace;
    fit.shift_draws.resize(static_cast<std::size_t>(S));
    fit.mode_point_estimates.resize(static_cast<std::size_t>(S));
    fit.laplace_tau2.resize(static_cast<std::size_t>(S));

    std::int64_t fallbacks = 0;
    std::vector<double> row(static_cast<std::size_t>(D));
    for (std::int64_t s = 0; s < S; ++s) {
        const double* col = comp_lfc_draws.col(s);
        row.assign(col, col + D);
        const auto r = detail::laplace_one(row, config, rng.child(static_cast<std::uint64_t>(s)));
        fit.shift_draws[s] = r.shift;
        fit.mode_point_estimates[s] = r.mode;
        fit.laplace_tau2[s] = r.tau2;
        fallbacks += r.curvature_fallback;
    }
    fit.variance = detail::sample_variance(fit.shift_draws);
    if (fallbacks > 0) {
        fit.warnings.push_back("curvature fallback used in " + std::to_string(fallbacks) + " of " +
                               std::to_string(S) + " draws");
    }
    return fit;
}

ScaleModelFit bootstrap_scale_fit(const CountTable& table, const ConditionLabels& labels,
                                  const DirichletPosterior& post, const AnalysisConfig& config,
                                  const RngStream& rng, const BootstrapOptions& options) {
    config.validate();
    labels.validate(table.n_samples());
    if (post.D != table.n_features() || post.N != table.n_samples()) {
        throw std::invalid_argument("bootstrap_scale_fit: posterior does not match table");
    }

    const std::int64_t S = config.num_draws;
    const auto case_cols = labels.group_indices(1);
    const auto control_cols = labels.group_indices(0);

    ScaleModelFit fit;
    fit.kind = ScaleModelKind::bootstrap;
    fit.shift_draws.resize(static_cast<std::size_t>(S));
    fit.mode_point_estimates.resize(static_cast<std::size_t>(S));

    const RngStream comp_root(config.seed, streams::composition);
    for (std::int64_t s = 0; s < S; ++s) {
        MatrixD logs;
        if (options.fixed_composition != nullptr) {
            logs = detail::log_matrix(*options.fixed_composition);
        } else {
            const CompositionDraw comp =
                sample_composition(post, comp_root.child(static_cast<std::uint64_t>(s)));
            logs = detail::log_matrix(comp);
        }
        const auto r = detail::bootstrap_one(logs, case_cols, control_cols, config,
                                             rng.child(static_cast<std::uint64_t>(s)), options);
        fit.shift_draws[s] = r.shift;
        fit.mode_point_estimates[s] = r.mode;
    }
    fit.variance = detail::sample_variance(fit.shift_draws);
    return fit;
}

const ScaleModelFit& select_scale_model(const ScaleModelFit& laplace,
                                        const ScaleModelFit& bootstrap) {
    if (laplace.shift_draws.size() != bootstrap.shift_draws.size()) {
        throw std::invalid_argument("select_scale_model: fits have different draw counts");
    }
    if (std::fabs(laplace.variance - bootstrap.variance) <= 1e-12) {
        return bootstrap;
    }
    return (laplace.variance > bootstrap.variance) ? laplace : bootstrap;
}

}  // namespace ssrv
