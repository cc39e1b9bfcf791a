#include "ssrv/measurement.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ssrv {

DirichletPosterior fit_posterior(const CountTable& table, double alpha) {
    if (!(std::isfinite(alpha) && alpha > 0.0)) {
        throw std::invalid_argument("fit_posterior: alpha must be finite and > 0");
    }
    const std::int64_t D = table.n_features();
    const std::int64_t N = table.n_samples();

    // Depths are recomputed here rather than taken from finalize(): the
    // posterior is well-defined even for an all-zero column (it reduces to
    // the prior), which the pipeline-level validation rejects but this
    // operation does not.
    DirichletPosterior post;
    post.D = D;
    post.N = N;
    post.alpha = alpha;
    post.concentration.resize(static_cast<std::size_t>(D * N));
    post.depth.resize(static_cast<std::size_t>(N));
    for (std::int64_t n = 0; n < N; ++n) {
        std::int64_t sum = 0;
        for (std::int64_t d = 0; d < D; ++d) {
            const std::int64_t c = table.at(d, n);
            if (c < 0) {
                throw std::invalid_argument("fit_posterior: negative count");
            }
            sum += c;
            post.concentration[static_cast<std::size_t>(n * D + d)] =
                alpha + static_cast<double>(c);
        }
        post.depth[n] = static_cast<double>(sum);
    }
    return post;
}

double posterior_mean(const DirichletPosterior& post, std::int64_t d, std::int64_t n) {
    const double total = static_cast<double>(post.D) * post.alpha + post.depth[n];
    return post.conc(d, n) / total;
}

double posterior_variance(const DirichletPosterior& post, std::int64_t d, std::int64_t n) {
    const double c = post.conc(d, n);
    const double total = static_cast<double>(post.D) * post.alpha + post.depth[n];
    return c * (total - c) / (total * total * (total + 1.0));
}

CompositionDraw sample_composition(const DirichletPosterior& post, const RngStream& rng) {
    CompositionDraw comp(post.D, post.N);
    for (std::int64_t n = 0; n < post.N; ++n) {
        RngStream col_rng = rng.child(static_cast<std::uint64_t>(n));
        double* w = comp.col(n);
        double sum = 0.0;
        for (std::int64_t d = 0; d < post.D; ++d) {
            double g = col_rng.gamma(post.conc(d, n));
            // Gamma draws for small concentrations can underflow; the
            // composition must stay strictly positive.
            if (g < 1e-300) g = 1e-300;
            w[d] = g;
            sum += g;
        }
        const double inv = 1.0 / sum;
        for (std::int64_t d = 0; d < post.D; ++d) {
            w[d] *= inv;
        }
    }
    return comp;
}

MatrixD clr_transform(const CompositionDraw& comp) {
    MatrixD out(comp.rows, comp.cols);
    for (std::int64_t n = 0; n < comp.cols; ++n) {
        const double* w = comp.col(n);
        double* o = out.col(n);
        double mean = 0.0;
        for (std::int64_t d = 0; d < comp.rows; ++d) {
            if (!(w[d] > 0.0)) {
                throw std::invalid_argument("clr_transform: non-positive entry in column " +
                                            std::to_string(n));
            }
            o[d] = std::log(w[d]);
            mean += o[d];
        }
        mean /= static_cast<double>(comp.rows);
        for (std::int64_t d = 0; d < comp.rows; ++d) {
            o[d] -= mean;
        }
    }
    return out;
}

}  // namespace ssrv
