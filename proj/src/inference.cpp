#include "ssrv/inference.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "ssrv/kde.hpp"
#include "ssrv/lfc.hpp"
#include "ssrv/measurement.hpp"
#include "ssrv/threading.hpp"

namespace ssrv {

namespace {

// Type-7 quantile on an ascending vector.
double quantile_sorted(const std::vector<double>& x, double q) {
    const auto n = x.size();
    if (n == 1) return x[0];
    const double h = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return x[n - 1];
    const double frac = h - static_cast<double>(lo);
    return x[lo] + frac * (x[lo + 1] - x[lo]);
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, 0.5);
}

}  // namespace

std::vector<double> bh_qvalues(const std::vector<double>& p_values) {
    const std::size_t n = p_values.size();
    for (double p : p_values) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("bh_qvalues: p-values must be finite and >= 0");
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> q(n);
    double running = std::numeric_limits<double>::infinity();
    for (std::size_t i = n; i-- > 0;) {
        const double raw =
            p_values[order[i]] * static_cast<double>(n) / static_cast<double>(i + 1);
        running = std::min(running, raw);
        q[order[i]] = std::min(running, 1.0);
    }
    return q;
}

std::vector<PosteriorSummary> summarize(const MatrixD& theta_draws, double target_fdr) {
    const std::int64_t D = theta_draws.rows;
    const std::int64_t S = theta_draws.cols;
    if (D < 1 || S < 2) {
        throw std::invalid_argument("summarize: need at least 1 feature and 2 draws");
    }
    if (!(target_fdr > 0.0 && target_fdr < 1.0)) {
        throw std::invalid_argument("summarize: target_fdr must be in (0, 1)");
    }

    std::vector<PosteriorSummary> out(static_cast<std::size_t>(D));
    std::vector<double> tail(static_cast<std::size_t>(D));
    std::vector<double> row(static_cast<std::size_t>(S));
    for (std::int64_t d = 0; d < D; ++d) {
        for (std::int64_t s = 0; s < S; ++s) row[static_cast<std::size_t>(s)] = theta_draws.at(d, s);

        auto& r = out[static_cast<std::size_t>(d)];
        double mean = mean_of(row);
        double ss = 0.0;
        for (double x : row) ss += (x - mean) * (x - mean);
        r.mean_lfc = mean;
        r.sd_lfc = std::sqrt(ss / static_cast<double>(S - 1));

        std::vector<double> sorted(row);
        std::sort(sorted.begin(), sorted.end());
        r.ci_low = quantile_sorted(sorted, target_fdr / 2.0);
        r.ci_high = quantile_sorted(sorted, 1.0 - target_fdr / 2.0);

        std::int64_t pos = 0, neg = 0;
        for (double x : row) {
            if (x > 0.0) ++pos;
            else if (x < 0.0) ++neg;
        }
        const double smaller = static_cast<double>(std::min(pos, neg) + 1);
        r.tail_p = std::min(1.0, 2.0 * smaller / static_cast<double>(S + 1));
        tail[static_cast<std::size_t>(d)] = r.tail_p;
    }

    const auto q = bh_qvalues(tail);
    for (std::int64_t d = 0; d < D; ++d) {
        auto& r = out[static_cast<std::size_t>(d)];
        r.q_value = q[static_cast<std::size_t>(d)];
        r.significant = r.q_value <= target_fdr;
    }
    return out;
}

DaReport run_sparse_ssrv(const CountTable& table, const ConditionLabels& labels,
                         const AnalysisConfig& config, int threads) {
    const auto t_start = std::chrono::steady_clock::now();

    AnalysisContext ctx = validate_inputs(table, labels, config);
    const CountTable& tab = ctx.table;
    const std::int64_t D = tab.n_features();
    const std::int64_t S = ctx.config.num_draws;

    const DirichletPosterior post = fit_posterior(tab, ctx.config.alpha_prior);
    const auto case_cols = ctx.labels.group_indices(1);
    const auto control_cols = ctx.labels.group_indices(0);

    const RngStream comp_root(ctx.config.seed, streams::composition);
    const RngStream lap_root(ctx.config.seed, streams::laplace_noise);
    const RngStream boot_root(ctx.config.seed, streams::bootstrap);

    MatrixD theta_par(D, S);
    std::vector<double> lap_shift(static_cast<std::size_t>(S));
    std::vector<double> lap_mode(static_cast<std::size_t>(S));
    std::vector<double> lap_tau2(static_cast<std::size_t>(S));
    std::vector<unsigned char> lap_fb(static_cast<std::size_t>(S), 0);
    std::vector<double> boot_shift(static_cast<std::size_t>(S));
    std::vector<double> boot_mode(static_cast<std::size_t>(S));

    const int nt = resolve_threads(threads);
    std::atomic<bool> failed{false};
    std::string error_msg;

    // Every per-draw random input is keyed by the draw index, so the
    // schedule cannot change results, only their completion order.
#pragma omp parallel for num_threads(nt) schedule(dynamic)
    for (std::int64_t s = 0; s < S; ++s) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            const auto su = static_cast<std::uint64_t>(s);
            const CompositionDraw comp = sample_composition(post, comp_root.child(su));
            const MatrixD logs = detail::log_matrix(comp);
            const std::vector<double> th =
                detail::contrast_from_log_columns(logs, case_cols, control_cols);
            std::copy(th.begin(), th.end(), theta_par.col(s));

            const auto lap = detail::laplace_one(th, ctx.config, lap_root.child(su));
            lap_shift[static_cast<std::size_t>(s)] = lap.shift;
            lap_mode[static_cast<std::size_t>(s)] = lap.mode;
            lap_tau2[static_cast<std::size_t>(s)] = lap.tau2;
            lap_fb[static_cast<std::size_t>(s)] = lap.curvature_fallback ? 1 : 0;

            const auto boot = detail::bootstrap_one(logs, case_cols, control_cols, ctx.config,
                                                    boot_root.child(su), BootstrapOptions{});
            boot_shift[static_cast<std::size_t>(s)] = boot.shift;
            boot_mode[static_cast<std::size_t>(s)] = boot.mode;
        } catch (const std::exception& e) {
#pragma omp critical(ssrv_run_error)
            {
                if (!failed.exchange(true)) error_msg = e.what();
            }
        } catch (...) {
#pragma omp critical(ssrv_run_error)
            {
                if (!failed.exchange(true)) error_msg = "unknown error";
            }
        }
    }
    if (failed.load()) {
        throw std::runtime_error("run_sparse_ssrv: draw failed: " + error_msg);
    }

    ScaleModelFit lap_fit;
    lap_fit.kind = ScaleModelKind::laplace;
    lap_fit.shift_draws = std::move(lap_shift);
    lap_fit.mode_point_estimates = lap_mode;
    lap_fit.laplace_tau2 = std::move(lap_tau2);
    lap_fit.variance = detail::sample_variance(lap_fit.shift_draws);
    const std::int64_t fallbacks =
        std::count(lap_fb.begin(), lap_fb.end(), static_cast<unsigned char>(1));
    if (fallbacks > 0) {
        lap_fit.warnings.push_back("curvature fallback used in " + std::to_string(fallbacks) +
                                   " of " + std::to_string(S) + " draws");
    }

    ScaleModelFit boot_fit;
    boot_fit.kind = ScaleModelKind::bootstrap;
    boot_fit.shift_draws = std::move(boot_shift);
    boot_fit.mode_point_estimates = std::move(boot_mode);
    boot_fit.variance = detail::sample_variance(boot_fit.shift_draws);

    const ScaleModelFit& chosen = select_scale_model(lap_fit, boot_fit);

    MatrixD theta = theta_par;
    for (std::int64_t s = 0; s < S; ++s) {
        const double shift = chosen.shift_draws[static_cast<std::size_t>(s)];
        double* c = theta.col(s);
        for (std::int64_t d = 0; d < D; ++d) c[d] += shift;
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
    rep.threads_used = nt;

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
        std::vector<double> row(static_cast<std::size_t>(D));
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
        rep.density.mode_draws = std::move(lap_mode);
    }

    rep.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

std::vector<ConvergenceRow> consistency_probe(
    const GeneratorSpec& base, const std::vector<std::pair<std::int64_t, std::int64_t>>& ladder,
    int seeds_per_rung, const AnalysisConfig& config, int threads) {
    if (ladder.empty()) throw std::invalid_argument("consistency_probe: empty ladder");
    if (seeds_per_rung < 1) throw std::invalid_argument("consistency_probe: seeds_per_rung < 1");

    AnalysisConfig cfg = config;
    cfg.density_diagnostic = false;
    // Feature filters would break the row alignment with generator truth.
    cfg.filter_min_mean_count = 0;
    cfg.filter_min_prevalence = 0.0;

    std::vector<ConvergenceRow> rows;
    rows.reserve(ladder.size());
    for (std::size_t r = 0; r < ladder.size(); ++r) {
        std::vector<double> rmses;
        std::vector<double> sds;
        for (int i = 0; i < seeds_per_rung; ++i) {
            GeneratorSpec spec = base;
            spec.depth = ladder[r].first;
            spec.features = ladder[r].second;
            spec.seed = derive_stream(derive_stream(base.seed, static_cast<std::uint64_t>(r)),
                                      static_cast<std::uint64_t>(i));
            const SyntheticDataset ds = generate(spec);
            const DaReport rep = run_sparse_ssrv(ds.table, ds.labels, cfg, threads);

            double se = 0.0;
            double sd_sum = 0.0;
            const auto Df = ds.truth.size();
            for (std::size_t d = 0; d < Df; ++d) {
                const double e = rep.summaries[d].mean_lfc - ds.truth[d];
                se += e * e;
                sd_sum += rep.summaries[d].sd_lfc;
            }
            rmses.push_back(std::sqrt(se / static_cast<double>(Df)));
            sds.push_back(sd_sum / static_cast<double>(Df));
        }
        ConvergenceRow row;
        row.depth = ladder[r].first;
        row.features = ladder[r].second;
        row.median_rmse = median_of(rmses);
        row.median_mean_sd = median_of(sds);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ssrv
