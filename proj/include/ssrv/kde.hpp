#pragma once

#include "ssrv/types.hpp"

namespace ssrv {

// Gaussian kernel density settings for one mode search.
struct KdeSpec {
    double bandwidth = 0.0;  // > 0
    double lo = 0.0;         // search interval, lo < hi
    double hi = 0.0;
    int grid_size = 512;     // >= 16
};

// Silverman's rule: 0.9 * min(sd, IQR / 1.34) * n^(-1/5), with the zero
// candidate dropped when only one of sd and IQR vanishes (heavy ties).
// Throws std::invalid_argument for fewer than 2 values or a point mass.
double default_bandwidth(const std::vector<double>& values);

// default_bandwidth, except a point mass yields 1e-6 * max(1, |mean|)
// so downstream mode searches stay well-defined.
double bandwidth_or_fallback(const std::vector<double>& values);

// Exact mixture density (1 / (n h)) * sum phi((t - v) / h).
double kde_density(const std::vector<double>& values, const KdeSpec& spec, double t);

// log p and its first two derivatives at t, from the closed-form Gaussian
// mixture expressions (no finite differences).
struct LogDensityDerivatives {
    double value = 0.0;
    double first = 0.0;
    double second = 0.0;
};
LogDensityDerivatives kde_log_density_derivatives(const std::vector<double>& values,
                                                  const KdeSpec& spec, double t);

// Density at many query points in one sorted-window sweep. Agrees with
// kde_density up to the dropped far-tail mass (below 1e-31 of a kernel
// peak). grid need not be sorted.
std::vector<double> kde_density_grid(const std::vector<double>& values, double bandwidth,
                                     const std::vector<double>& grid);

// Argmax of the KDE over [lo, hi]: dense grid scan, then golden-section
// refinement in the bracketing cells to tolerance 1e-8 * (hi - lo). Grid
// ties within 1e-12 resolve toward the candidate with the smallest |t|
// (no-shift preferred), then the smaller t.
double parzen_mode(const std::vector<double>& values, const KdeSpec& spec);

// Per-draw spec: fallback-safe bandwidth, the config's search interval or
// [min - 3h, max + 3h], and the config's grid size.
KdeSpec make_kde_spec(const std::vector<double>& values, const AnalysisConfig& config);

}  // namespace ssrv
