#include "ssrv/reference.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "ssrv/kde.hpp"
#include "ssrv/lfc.hpp"
#include "ssrv/measurement.hpp"
#include "ssrv/scale_model.hpp"

namespace ssrv::reference {

DaReport run_sparse_ssrv(const CountTable& table, const ConditionLabels& labels,
                         const AnalysisConfig& config) {
    const auto t_start = std::chrono::steady_clock::now();

    AnalysisContext ctx = validate_inputs(table, labels, config);
    const CountTable& tab = ctx.table;
    const std::int64_t D = tab.n_features();
    const std::int64_t S = ctx.config.num_draws;

    const DirichletPosterior post = fit_posterior(tab, ctx.config.alpha_prior);

    const RngStream comp_root(ctx.config.seed, streams::composition);
    const RngStream lap_root(ctx.config.seed, streams::laplace_noise);
    const RngStream boot_root(ctx.config.seed, streams::bootstrap);

    MatrixD theta_par(D, S);
    for (std::int64_t s = 0; s < S; ++s) {
        const CompositionDraw comp =
            sample_composition(post, comp_root.child(static_cast<std::uint64_t>(s)));
        const auto th = comp_lfc(comp, ctx.labels);
        std::copy(th.begin(), th.end(), theta_par.col(s));
    }

    const ScaleModelFit lap_fit = laplace_scale_fit(theta_par, ctx.config, lap_root);
    const ScaleModelFit boot_fit =
        bootstrap_scale_fit(tab, ctx.labels, post, ctx.config, boot_root);
    const ScaleModelFit& chosen = select_scale_model(lap_fit, boot_fit);

    MatrixD theta(D, S);
    std::vector<double> row(static_cast<std::size_t>(D));
    for (std::int64_t s = 0; s < S; ++s) {
        const double* c = theta_par.col(s);
        row.assign(c, c + D);
        const auto shifted = rank1_update(row, chosen.shift_draws[static_cast<std::size_t>(s)]);
        std::copy(shifted.begin(), shifted.end(), theta.col(s));
    }

    DaReport rep;
    rep.feature_ids = tab.feature_ids;
    rep.summaries = summarize(theta, ctx.config.target_fdr);
    rep.scale_model = chosen.kind == ScaleModelKind::laplace ? "laplace" : "bootstrap";
    rep.scale_variance = chosen.variance;
    rep.laplace_variance = lap_fit.variance;
    rep.bootstrap_variance = boot_fit.variance;
    rep.config = ctx.config;
    rep.warnings = ctx.warnings;
    for (const auto& w : lap_fit.warnings) rep.warnings.push_back(w);
    rep.threads_used = 1;

    if (ctx.config.density_diagnostic) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (double v : theta_par.data) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        double pad = 0.05 * (hi - lo);
        if (!(pad > 0.0)) pad = 1.0;
        const int G = ctx.config.kde_grid_size;
        rep.density.grid.resize(static_cast<std::size_t>(G));
        const double a = lo - pad;
        const double step = (hi + pad - a) / static_cast<double>(G - 1);
        for (int g = 0; g < G; ++g) rep.density.grid[static_cast<std::size_t>(g)] = a + step * g;
        rep.density.mean_density.assign(static_cast<std::size_t>(G), 0.0);
        for (std::int64_t s = 0; s < S; ++s) {
            const double* c = theta_par.col(s);
            row.assign(c, c + D);
            const double bw = bandwidth_or_fallback(row);
            const auto dens = kde_density_grid(row, bw, rep.density.grid);
            for (int g = 0; g < G; ++g)
                rep.density.mean_density[static_cast<std::size_t>(g)] +=
                    dens[static_cast<std::size_t>(g)];
        }
        for (auto& v : rep.density.mean_density) v /= static_cast<double>(S);
        rep.density.mode_draws = lap_fit.mode_point_estimates;
    }

    rep.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

}  // namespace ssrv::reference
