#include "ssrv/types.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace ssrv {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) {
        throw std::invalid_argument(msg);
    }
}

void check_unique(const std::vector<std::string>& ids, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second) {
            throw std::invalid_argument(std::string("duplicate ") + what + " id: " + id);
        }
    }
}

}  // namespace

void CountTable::finalize() {
    const std::int64_t D = n_features();
    const std::int64_t N = n_samples();
    require(D >= 2, "count table needs at least 2 features, got " + std::to_string(D));
    require(N >= 2, "count table needs at least 2 samples, got " + std::to_string(N));
    require(static_cast<std::int64_t>(counts.size()) == D * N,
            "count matrix size does not match feature/sample ids");
    check_unique(feature_ids, "feature");
    check_unique(sample_ids, "sample");

    depths.assign(N, 0);
    for (std::int64_t n = 0; n < N; ++n) {
        std::int64_t sum = 0;
        for (std::int64_t d = 0; d < D; ++d) {
            const std::int64_t c = at(d, n);
            require(c >= 0, "negative count for feature " + feature_ids[d] + ", sample " + sample_ids[n]);
            sum += c;
        }
        require(sum > 0, "sample " + sample_ids[n] + " has zero total count");
        depths[n] = sum;
    }
}

std::int64_t ConditionLabels::n_case() const {
    std::int64_t k = 0;
    for (auto v : x) k += (v == 1);
    return k;
}

std::int64_t ConditionLabels::n_control() const {
    return n_samples() - n_case();
}

std::vector<std::int64_t> ConditionLabels::group_indices(int group) const {
    std::vector<std::int64_t> idx;
    for (std::int64_t n = 0; n < n_samples(); ++n) {
        if (static_cast<int>(x[n]) == group) idx.push_back(n);
    }
    return idx;
}

void ConditionLabels::validate(std::int64_t n_expected) const {
    require(n_samples() == n_expected,
            "labels cover " + std::to_string(n_samples()) + " samples, table has " +
                std::to_string(n_expected));
    for (auto v : x) {
        require(v == 0 || v == 1, "labels must be 0 or 1");
    }
    require(n_case() >= 1, "case group is empty");
    require(n_control() >= 1, "control group is empty");
}

void AnalysisConfig::validate() const {
    require(std::isfinite(alpha_prior) && alpha_prior > 0.0, "alpha_prior must be finite and > 0");
    require(num_draws >= 2, "num_draws must be >= 2");
    require(std::isfinite(target_fdr) && target_fdr > 0.0 && target_fdr < 1.0,
            "target_fdr must lie in (0, 1)");
    if (mode_search_interval) {
        const auto [lo, hi] = *mode_search_interval;
        require(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
                "mode_search_interval must be a finite ordered pair");
    }
    require(kde_grid_size >= 16, "kde_grid_size must be >= 16");
    require(std::isfinite(filter_min_mean_count) && filter_min_mean_count >= 0.0,
            "filter_min_mean_count must be >= 0");
    require(std::isfinite(filter_min_prevalence) && filter_min_prevalence >= 0.0 &&
                filter_min_prevalence <= 1.0,
            "filter_min_prevalence must lie in [0, 1]");
}

AnalysisContext validate_inputs(const CountTable& table, const ConditionLabels& labels,
                                const AnalysisConfig& config) {
    config.validate();

    CountTable checked = table;
    checked.finalize();
    labels.validate(checked.n_samples());

    const std::int64_t D = checked.n_features();
    const std::int64_t N = checked.n_samples();

    std::vector<std::int64_t> kept;
    kept.reserve(D);
    for (std::int64_t d = 0; d < D; ++d) {
        std::int64_t total = 0;
        std::int64_t present = 0;
        for (std::int64_t n = 0; n < N; ++n) {
            const std::int64_t c = checked.at(d, n);
            total += c;
            present += (c > 0);
        }
        const double mean_count = static_cast<double>(total) / static_cast<double>(N);
        const double prevalence = static_cast<double>(present) / static_cast<double>(N);
        if (mean_count < config.filter_min_mean_count) continue;
        if (prevalence < config.filter_min_prevalence) continue;
        kept.push_back(d);
    }

    if (kept.empty()) {
        throw std::invalid_argument("feature filters removed every feature");
    }
    if (static_cast<std::int64_t>(kept.size()) < 2) {
        throw std::invalid_argument("feature filters left fewer than 2 features");
    }

    AnalysisContext ctx;
    ctx.labels = labels;
    ctx.config = config;
    ctx.kept = kept;

    if (static_cast<std::int64_t>(kept.size()) == D) {
        ctx.table = std::move(checked);
    } else {
        CountTable sub;
        sub.sample_ids = checked.sample_ids;
        sub.feature_ids.reserve(kept.size());
        for (auto d : kept) sub.feature_ids.push_back(checked.feature_ids[d]);
        sub.counts.resize(kept.size() * static_cast<std::size_t>(N));
        for (std::int64_t n = 0; n < N; ++n) {
            for (std::size_t i = 0; i < kept.size(); ++i) {
                sub.counts[static_cast<std::size_t>(n) * kept.size() + i] = checked.at(kept[i], n);
            }
        }
        // Filtering drops reads from the depths; downstream normalization is
        // over retained features only.
        sub.finalize();
        ctx.warnings.push_back("filters removed " + std::to_string(D - static_cast<std::int64_t>(kept.size())) +
                               " of " + std::to_string(D) + " features");
        ctx.table = std::move(sub);
    }
    return ctx;
}

}  // namespace ssrv
