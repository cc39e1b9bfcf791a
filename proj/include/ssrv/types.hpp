#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ssrv {

// Dense column-major matrix of doubles. Used for compositions (columns on
// the probability simplex), CLR values, and draw collections.
struct MatrixD {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<double> data;  // column-major, size rows * cols

    MatrixD() = default;
    MatrixD(std::int64_t r, std::int64_t c) : rows(r), cols(c), data(static_cast<std::size_t>(r * c)) {}

    double& at(std::int64_t r, std::int64_t c) { return data[static_cast<std::size_t>(c * rows + r)]; }
    double at(std::int64_t r, std::int64_t c) const { return data[static_cast<std::size_t>(c * rows + r)]; }

    double* col(std::int64_t c) { return data.data() + c * rows; }
    const double* col(std::int64_t c) const { return data.data() + c * rows; }
};

// A matrix whose columns are compositions: strictly positive entries,
// each column summing to one.
using CompositionDraw = MatrixD;

// Feature-by-sample count matrix with identities. finalize() checks the
// invariants (D >= 2, N >= 2, unique ids, counts >= 0, every column sum
// positive) and fills depths; it throws std::invalid_argument otherwise.
struct CountTable {
    std::vector<std::string> feature_ids;  // size D
    std::vector<std::string> sample_ids;   // size N
    std::vector<std::int64_t> counts;      // size D * N, column-major
    std::vector<std::int64_t> depths;      // size N, column sums; set by finalize()

    std::int64_t n_features() const { return static_cast<std::int64_t>(feature_ids.size()); }
    std::int64_t n_samples() const { return static_cast<std::int64_t>(sample_ids.size()); }

    std::int64_t& at(std::int64_t d, std::int64_t n) {
        return counts[static_cast<std::size_t>(n * n_features() + d)];
    }
    std::int64_t at(std::int64_t d, std::int64_t n) const {
        return counts[static_cast<std::size_t>(n * n_features() + d)];
    }

    void finalize();
};

// Binary condition assignment aligned with CountTable::sample_ids.
// x[n] == 1 marks the case group. Both groups must be non-empty.
struct ConditionLabels {
    std::vector<std::uint8_t> x;

    std::int64_t n_samples() const { return static_cast<std::int64_t>(x.size()); }
    std::int64_t n_case() const;
    std::int64_t n_control() const;
    std::vector<std::int64_t> group_indices(int group) const;  // group 0 or 1

    void validate(std::int64_t n_expected) const;  // throws std::invalid_argument
};

// Analysis settings shared by the sparse scale-simulation pipeline and the
// baselines. validate() throws std::invalid_argument on violations.
struct AnalysisConfig {
    double alpha_prior = 0.5;  // Dirichlet pseudo-count, > 0
    int num_draws = 128;       // posterior draws S, >= 2
    std::uint64_t seed = 0;
    double target_fdr = 0.05;  // in (0, 1)

    // Mode search interval; when unset each draw uses
    // [min(values) - 3h, max(values) + 3h].
    std::optional<std::pair<double, double>> mode_search_interval;
    int kde_grid_size = 512;  // >= 16

    // Feature filters; 0 disables. Mean count is over all samples,
    // prevalence is the fraction of samples with a nonzero count.
    double filter_min_mean_count = 0.0;
    double filter_min_prevalence = 0.0;

    // Collect the LFC density diagnostic during the run (one extra KDE
    // pass per draw). Off for bulk benchmarking.
    bool density_diagnostic = true;

    void validate() const;
};

// Validated inputs: filtered table plus the surviving feature indices.
struct AnalysisContext {
    CountTable table;           // filtered copy
    ConditionLabels labels;
    AnalysisConfig config;
    std::vector<std::int64_t> kept;  // original row index per retained feature
    std::vector<std::string> warnings;
};

// Applies the config's feature filters and checks all cross-input
// invariants. Filtering is idempotent: running the result through again
// retains every feature. Throws std::invalid_argument when the filtered
// table would be empty or the inputs are inconsistent.
AnalysisContext validate_inputs(const CountTable& table, const ConditionLabels& labels,
                                const AnalysisConfig& config);

}  // namespace ssrv
