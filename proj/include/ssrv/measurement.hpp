#pragma once

#include "ssrv/rng.hpp"
#include "ssrv/types.hpp"

namespace ssrv {

// Per-sample Dirichlet posterior over the composition: column n has
// concentration counts[., n] + alpha. Columns are independent.
struct DirichletPosterior {
    std::int64_t D = 0;
    std::int64_t N = 0;
    double alpha = 0.0;
    std::vector<double> concentration;  // column-major D x N
    std::vector<double> depth;          // lambda_n per column

    double conc(std::int64_t d, std::int64_t n) const {
        return concentration[static_cast<std::size_t>(n * D + d)];
    }
};

DirichletPosterior fit_posterior(const CountTable& table, double alpha);

// Closed-form first two moments of component d in column n:
// mean  (alpha + y) / (D alpha + lambda)
// var   (alpha + y) (lambda + D alpha - (alpha + y)) /
//       ((D alpha + lambda)^2 (D alpha + lambda + 1))
double posterior_mean(const DirichletPosterior& post, std::int64_t d, std::int64_t n);
double posterior_variance(const DirichletPosterior& post, std::int64_t d, std::int64_t n);

// One joint draw: each column sampled as normalized independent Gamma
// variables. Column n uses rng.child(n), so results do not depend on the
// order in which columns are processed. Entries are strictly positive and
// each column sums to one.
CompositionDraw sample_composition(const DirichletPosterior& post, const RngStream& rng);

// Centered log-ratio per column: log w - mean(log w). Columns sum to zero.
// Throws std::invalid_argument on non-positive entries.
MatrixD clr_transform(const CompositionDraw& comp);

}  // namespace ssrv
