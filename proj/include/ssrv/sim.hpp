#pragma once

#include "ssrv/rng.hpp"
#include "ssrv/types.hpp"

namespace ssrv {

// Synthetic count generator: per-feature log-normal baseline abundances,
// multiplicative case-group effects drawn as (5 * Beta(1,3) + 1) with a
// configurable sign split, per-sample log-load jitter, multinomial counts.
// Deliberately simpler than real microbiome simulators; benchmark reports
// carry a note saying so.
struct GeneratorSpec {
    std::int64_t features = 150;
    std::int64_t samples = 60;
    std::int64_t depth = 250000;   // reads per sample; >= features
    bool poisson_depth = false;    // jitter depth_n ~ Poisson(depth)
    double prop_relevant = 0.2;    // fraction of features with an effect
    double pos_frac = 0.8;         // fraction of effects that are positive
    double mu0 = 0.0;              // baseline log-abundance mean
    double sigma0 = 1.5;           // baseline log-abundance sd
    double load_sd = 0.25;         // per-sample log-load jitter sd
    double case_load_multiplier = 1.0;  // scales case absolute abundance; counts unaffected
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument
};

struct SyntheticDataset {
    CountTable table;
    ConditionLabels labels;
    std::vector<double> truth;       // population log-fold change per feature; 0 for nulls
    std::vector<double> true_loads;  // total absolute abundance per sample
    std::vector<std::string> warnings;
};

SyntheticDataset generate(const GeneratorSpec& spec);

// Confusion counts against truth != 0.
struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;
};

ConfusionCounts score_calls(const std::vector<bool>& called, const std::vector<double>& truth);

double fdr_of(const ConfusionCounts& c);     // fp / max(1, fp + tp)
double tpr_of(const ConfusionCounts& c);     // 1 when no positives exist
double f_half_of(const ConfusionCounts& c);  // F_{0.5}; 1 when vacuous

namespace detail {

// Effect magnitude law 5 * Beta(1,3) + 1; values lie in [1, 6], mean 2.25.
double effect_magnitude(RngStream& rng);

std::int64_t poisson(RngStream& rng, double lambda);

}  // namespace detail

}  // namespace ssrv
