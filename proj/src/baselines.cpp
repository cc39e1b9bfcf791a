#include "ssrv/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ssrv/lfc.hpp"
#include "ssrv/measurement.hpp"
#include "ssrv/scale_model.hpp"
#include "ssrv/threading.hpp"

namespace ssrv {

void ScalePrior::validate(std::int64_t n_samples) const {
    if (!(gamma2 >= 0.0) || !std::isfinite(gamma2)) {
        throw std::invalid_argument("scale prior: gamma2 must be finite and >= 0");
    }
    if (kind == ScalePriorKind::informed_load) {
        if (static_cast<std::int64_t>(loads.size()) != n_samples) {
            throw std::invalid_argument("scale prior: need one load per sample");
        }
        for (double l : loads) {
            if (!(l > 0.0) || !std::isfinite(l)) {
                throw std::invalid_argument("scale prior: loads must be positive and finite");
            }
        }
    }
}

namespace {

// Column means of log proportions.
std::vector<double> clr_column_centers(const MatrixD& logs) {
    std::vector<double> phi(static_cast<std::size_t>(logs.cols));
    for (std::int64_t n = 0; n < logs.cols; ++n) {
        const double* c = logs.col(n);
        double s = 0.0;
        for (std::int64_t d = 0; d < logs.rows; ++d) s += c[d];
        phi[static_cast<std::size_t>(n)] = s / static_cast<double>(logs.rows);
    }
    return phi;
}

double group_contrast(const std::vector<double>& per_sample,
                      const std::vector<std::int64_t>& case_cols,
                      const std::vector<std::int64_t>& control_cols) {
    double cs = 0.0;
    for (auto n : case_cols) cs += per_sample[static_cast<std::size_t>(n)];
    double os = 0.0;
    for (auto n : control_cols) os += per_sample[static_cast<std::size_t>(n)];
    return cs / static_cast<double>(case_cols.size()) -
           os / static_cast<double>(control_cols.size());
}

}  // namespace

double clr_shift(const CompositionDraw& comp, const ConditionLabels& labels) {
    labels.validate(comp.cols);
    const MatrixD logs = detail::log_matrix(comp);
    const auto phi = clr_column_centers(logs);
    // mean over controls minus mean over cases of phi; equivalently the
    // case-minus-control contrast of -phi.
    std::vector<double> neg_phi(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) neg_phi[i] = -phi[i];
    return group_contrast(neg_phi, labels.group_indices(1), labels.group_indices(0));
}

DaReport run_baseline(const CountTable& table, const ConditionLabels& labels,
                      const AnalysisConfig& config, const ScalePrior& prior, int threads) {
    const auto t_start = std::chrono::steady_clock::now();

    AnalysisContext ctx = validate_inputs(table, labels, config);
    prior.validate(ctx.table.n_samples());
    const CountTable& tab = ctx.table;
    const std::int64_t D = tab.n_features();
    const std::int64_t N = tab.n_samples();
    const std::int64_t S = ctx.config.num_draws;

    const DirichletPosterior post = fit_posterior(tab, ctx.config.alpha_prior);
    const auto case_cols = ctx.labels.group_indices(1);
    const auto control_cols = ctx.labels.group_indices(0);

    // Same composition stream keys as the main pipeline: on a shared seed,
    // methods see identical measurement draws and differ only in scale.
    const RngStream comp_root(ctx.config.seed, streams::composition);
    const RngStream prior_root(ctx.config.seed, streams::scale_prior);

    const double gamma = std::sqrt(prior.gamma2);
    const bool add_noise = prior.kind != ScalePriorKind::clr_degenerate && prior.gamma2 > 0.0;
    const bool informed = prior.kind == ScalePriorKind::informed_load;

    std::vector<double> log_loads;
    if (informed) {
        log_loads.resize(static_cast<std::size_t>(N));
        for (std::int64_t n = 0; n < N; ++n)
            log_loads[static_cast<std::size_t>(n)] = std::log(prior.loads[static_cast<std::size_t>(n)]);
    }

    MatrixD theta_par(D, S);
    std::vector<double> theta_perp(static_cast<std::size_t>(S));

    const int nt = resolve_threads(threads);
    std::atomic<bool> failed{false};
    std::string error_msg;

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

            std::vector<double> shift(static_cast<std::size_t>(N));
            if (informed) {
                shift = log_loads;
            } else {
                const auto phi = clr_column_centers(logs);
                for (std::int64_t n = 0; n < N; ++n)
                    shift[static_cast<std::size_t>(n)] = -phi[static_cast<std::size_t>(n)];
            }
            if (add_noise) {
                RngStream draw_rng = prior_root.child(su);
                for (std::int64_t n = 0; n < N; ++n)
                    shift[static_cast<std::size_t>(n)] +=
                        gamma * draw_rng.child(static_cast<std::uint64_t>(n)).normal();
            }
            theta_perp[static_cast<std::size_t>(s)] =
                group_contrast(shift, case_cols, control_cols);
        } catch (const std::exception& e) {
#pragma omp critical(ssrv_baseline_error)
            {
                if (!failed.exchange(true)) error_msg = e.what();
            }
        } catch (...) {
#pragma omp critical(ssrv_baseline_error)
            {
                if (!failed.exchange(true)) error_msg = "unknown error";
            }
        }
    }
    if (failed.load()) {
        throw std::runtime_error("run_baseline: draw failed: " + error_msg);
    }

    MatrixD theta = theta_par;
    for (std::int64_t s = 0; s < S; ++s) {
        const double shift = theta_perp[static_cast<std::size_t>(s)];
        double* c = theta.col(s);
        for (std::int64_t d = 0; d < D; ++d) c[d] += shift;
    }

    DaReport rep;
    rep.feature_ids = tab.feature_ids;
    rep.summaries = summarize(theta, ctx.config.target_fdr);
    switch (prior.kind) {
        case ScalePriorKind::clr_degenerate: rep.scale_model = "clr"; break;
        case ScalePriorKind::gaussian_clr: rep.scale_model = "gaussian-clr"; break;
        case ScalePriorKind::informed_load: rep.scale_model = "informed"; break;
    }
    rep.scale_variance = detail::sample_variance(theta_perp);
    rep.config = ctx.config;
    rep.warnings = ctx.warnings;
    rep.threads_used = nt;
    rep.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

}  // namespace ssrv
