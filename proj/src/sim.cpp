#include "ssrv/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ssrv {

void GeneratorSpec::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("generator: " + msg); };
    if (features < 2) fail("features must be >= 2");
    if (samples < 2) fail("samples must be >= 2");
    if (depth < features) fail("depth must be >= features");
    if (!(prop_relevant >= 0.0 && prop_relevant <= 1.0)) fail("prop_relevant must be in [0, 1]");
    if (!(pos_frac >= 0.0 && pos_frac <= 1.0)) fail("pos_frac must be in [0, 1]");
    if (!std::isfinite(mu0)) fail("mu0 must be finite");
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) fail("sigma0 must be positive");
    if (!(load_sd >= 0.0) || !std::isfinite(load_sd)) fail("load_sd must be >= 0");
    if (!(case_load_multiplier > 0.0) || !std::isfinite(case_load_multiplier))
        fail("case_load_multiplier must be positive");
}

namespace detail {

double effect_magnitude(RngStream& rng) {
    // Beta(1,3) as Gamma(1)/(Gamma(1)+Gamma(3)); consumption order is fixed.
    double g1 = rng.gamma(1.0);
    double g2 = rng.gamma(3.0);
    double beta = g1 / (g1 + g2);
    return 5.0 * beta + 1.0;
}

std::int64_t poisson(RngStream& rng, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("poisson: lambda must be >= 0");
    if (lambda == 0.0) return 0;
    if (lambda < 30.0) {
        // Product-of-uniforms; each trial consumes one uniform.
        double limit = std::exp(-lambda);
        double prod = rng.uniform_open();
        std::int64_t k = 0;
        while (prod > limit) {
            prod *= rng.uniform_open();
            ++k;
        }
        return k;
    }
    // Hormann's transformed rejection (PTRS). Valid for lambda >= 10.
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    while (true) {
        double u = rng.uniform_open() - 0.5;
        double v = rng.uniform_open();
        double us = 0.5 - std::abs(u);
        double kd = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kd);
        if (kd < 0.0 || (us < 0.013 && v > us)) continue;
        double k = kd;
        double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        double rhs = k * log_lambda - lambda - std::lgamma(k + 1.0);
        if (lhs <= rhs) return static_cast<std::int64_t>(kd);
    }
}

}  // namespace detail

namespace {

// One multinomial read: binary search of a uniform against the cumulative mass.
std::int64_t pick_bucket(const std::vector<double>& cum, double u) {
    double target = u * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    auto idx = static_cast<std::int64_t>(it - cum.begin());
    auto last = static_cast<std::int64_t>(cum.size()) - 1;
    return std::min(idx, last);
}

}  // namespace

SyntheticDataset generate(const GeneratorSpec& spec) {
    spec.validate();
    const auto D = spec.features;
    const auto N = spec.samples;

    RngStream root(spec.seed, streams::generator);
    RngStream base_rng = root.child(0);
    RngStream select_rng = root.child(1);
    RngStream effect_rng = root.child(2);
    RngStream sign_rng = root.child(3);
    RngStream load_rng = root.child(4);
    RngStream counts_root = root.child(5);

    SyntheticDataset out;

    // Baseline log abundances, shared by both groups.
    std::vector<double> base(static_cast<std::size_t>(D));
    for (auto& a : base) a = spec.mu0 + spec.sigma0 * base_rng.normal();

    // Relevant set: partial Fisher-Yates over feature indices.
    auto k = static_cast<std::int64_t>(std::llround(spec.prop_relevant * static_cast<double>(D)));
    k = std::min(k, D);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(D));
    for (std::int64_t d = 0; d < D; ++d) idx[static_cast<std::size_t>(d)] = d;
    for (std::int64_t i = 0; i < k; ++i) {
        auto j = i + static_cast<std::int64_t>(
                         select_rng.uniform_int(static_cast<std::uint64_t>(D - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    std::vector<bool> relevant(static_cast<std::size_t>(D), false);
    for (std::int64_t i = 0; i < k; ++i) relevant[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = true;

    // Effects in feature order so the draw sequence does not depend on which
    // features were selected first.
    out.truth.assign(static_cast<std::size_t>(D), 0.0);
    for (std::int64_t d = 0; d < D; ++d) {
        if (!relevant[static_cast<std::size_t>(d)]) continue;
        double mag = detail::effect_magnitude(effect_rng);
        double sign = (sign_rng.uniform() < spec.pos_frac) ? 1.0 : -1.0;
        out.truth[static_cast<std::size_t>(d)] = sign * mag;
    }
    if (k == 0) out.warnings.push_back("no relevant features: dataset is pure null");

    // Group abundance profiles.
    std::vector<double> ctrl_mass(static_cast<std::size_t>(D));
    std::vector<double> case_mass(static_cast<std::size_t>(D));
    double ctrl_total = 0.0;
    double case_total = 0.0;
    for (std::int64_t d = 0; d < D; ++d) {
        auto dd = static_cast<std::size_t>(d);
        ctrl_mass[dd] = std::exp(base[dd]);
        case_mass[dd] = std::exp(base[dd] + out.truth[dd]);
        ctrl_total += ctrl_mass[dd];
        case_total += case_mass[dd];
    }
    std::vector<double> ctrl_cum(static_cast<std::size_t>(D));
    std::vector<double> case_cum(static_cast<std::size_t>(D));
    double acc = 0.0;
    for (std::int64_t d = 0; d < D; ++d) {
        acc += ctrl_mass[static_cast<std::size_t>(d)];
        ctrl_cum[static_cast<std::size_t>(d)] = acc;
    }
    acc = 0.0;
    for (std::int64_t d = 0; d < D; ++d) {
        acc += case_mass[static_cast<std::size_t>(d)];
        case_cum[static_cast<std::size_t>(d)] = acc;
    }

    // Balanced labels, controls first.
    auto n_case = N / 2;
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(N), 0);
    for (std::int64_t n = N - n_case; n < N; ++n) labels[static_cast<std::size_t>(n)] = 1;

    // Counts are multinomial over the normalized group profile, so the load
    // multiplier enters true_loads only; the count table is unchanged by it.
    out.table.counts.assign(static_cast<std::size_t>(D * N), 0);
    out.true_loads.assign(static_cast<std::size_t>(N), 0.0);
    for (std::int64_t n = 0; n < N; ++n) {
        auto nn = static_cast<std::size_t>(n);
        bool is_case = labels[nn] != 0;
        double log_jitter = spec.load_sd * load_rng.normal();
        double group_total = is_case ? case_total : ctrl_total;
        double mult = is_case ? spec.case_load_multiplier : 1.0;
        out.true_loads[nn] = group_total * std::exp(log_jitter) * mult;

        RngStream sample_rng = counts_root.child(static_cast<std::uint64_t>(n));
        RngStream depth_rng = sample_rng.child(0);
        RngStream read_rng = sample_rng.child(1);
        std::int64_t depth_n = spec.depth;
        if (spec.poisson_depth)
            depth_n = detail::poisson(depth_rng, static_cast<double>(spec.depth));
        const auto& cum = is_case ? case_cum : ctrl_cum;
        auto* col = out.table.counts.data() + static_cast<std::size_t>(n * D);
        for (std::int64_t r = 0; r < depth_n; ++r) col[pick_bucket(cum, read_rng.uniform())] += 1;
    }
    if (spec.case_load_multiplier != 1.0)
        out.warnings.push_back(
            "case_load_multiplier rescales true_loads only; truth records population "
            "composition effects");

    out.table.feature_ids.resize(static_cast<std::size_t>(D));
    for (std::int64_t d = 0; d < D; ++d)
        out.table.feature_ids[static_cast<std::size_t>(d)] = "f" + std::to_string(d + 1);
    out.table.sample_ids.resize(static_cast<std::size_t>(N));
    for (std::int64_t n = 0; n < N; ++n)
        out.table.sample_ids[static_cast<std::size_t>(n)] = "s" + std::to_string(n + 1);
    out.table.finalize();
    out.labels.x = std::move(labels);
    out.labels.validate(N);
    return out;
}

ConfusionCounts score_calls(const std::vector<bool>& called, const std::vector<double>& truth) {
    if (called.size() != truth.size())
        throw std::invalid_argument("score_calls: called and truth sizes differ");
    ConfusionCounts c;
    for (std::size_t d = 0; d < truth.size(); ++d) {
        bool real = truth[d] != 0.0;
        if (called[d] && real) ++c.tp;
        else if (called[d] && !real) ++c.fp;
        else if (!called[d] && real) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double fdr_of(const ConfusionCounts& c) {
    return static_cast<double>(c.fp) / static_cast<double>(std::max<std::int64_t>(1, c.fp + c.tp));
}

double tpr_of(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0) return 1.0;
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double f_half_of(const ConfusionCounts& c) {
    double denom = 1.25 * static_cast<double>(c.tp) + 0.25 * static_cast<double>(c.fn) +
                   static_cast<double>(c.fp);
    if (denom == 0.0) return 1.0;
    return 1.25 * static_cast<double>(c.tp) / denom;
}

}  // namespace ssrv
