#include "ssrv/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ssrv {

namespace {

constexpr double inv_sqrt_2pi = 0.39894228040143267794;

// Contributions beyond z_cut bandwidths are below 1e-31 of the kernel peak;
// dropping them cannot move an argmax but turns the grid scan from
// O(grid * n) into O(grid + pairs-in-window).
constexpr double z_cut = 12.0;

void check_spec(const KdeSpec& spec) {
    if (!(spec.bandwidth > 0.0) || !std::isfinite(spec.bandwidth)) {
        throw std::invalid_argument("kde: bandwidth must be finite and > 0");
    }
    if (!(spec.lo < spec.hi) || !std::isfinite(spec.lo) || !std::isfinite(spec.hi)) {
        throw std::invalid_argument("kde: search interval must be a finite ordered pair");
    }
    if (spec.grid_size < 16) {
        throw std::invalid_argument("kde: grid_size must be >= 16");
    }
}

double sample_sd(const std::vector<double>& v) {
    const std::size_t n = v.size();
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

// Quantile with linear interpolation between order statistics (the common
// "type 7" definition). Input must be sorted.
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Windowed evaluation over sorted values. Both the grid scan and the
// golden-section refinement use this, with identical window boundaries and
// ascending summation order, so refinement sees the same function the scan
// maximized.
struct SortedKernel {
    const std::vector<double>& sorted;
    double h;
    double norm;  // 1 / (n h sqrt(2 pi))

    SortedKernel(const std::vector<double>& sorted_values, double bandwidth)
        : sorted(sorted_values), h(bandwidth),
          norm(inv_sqrt_2pi / (static_cast<double>(sorted_values.size()) * bandwidth)) {}

    double density(double t) const {
        const double cut = z_cut * h;
        auto lo = std::lower_bound(sorted.begin(), sorted.end(), t - cut);
        auto hi = std::upper_bound(lo, sorted.end(), t + cut);
        double s = 0.0;
        for (auto it = lo; it != hi; ++it) {
            const double z = (t - *it) / h;
            s += std::exp(-0.5 * z * z);
        }
        return s * norm;
    }
};

double golden_section_max(const SortedKernel& kern, double a, double b, double tol) {
    constexpr double invphi = 0.61803398874989484820;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = kern.density(x1);
    double f2 = kern.density(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = kern.density(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = kern.density(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double default_bandwidth(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) {
        throw std::invalid_argument("default_bandwidth: need at least 2 values");
    }
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());

    const double sd = sample_sd(sorted);
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    const double a = sd;
    const double b = iqr / 1.34;

    double scale;
    if (a > 0.0 && b > 0.0) {
        scale = std::min(a, b);
    } else if (a > 0.0 || b > 0.0) {
        scale = std::max(a, b);  // one candidate degenerate (heavy ties); use the other
    } else {
        throw std::invalid_argument("default_bandwidth: all values identical");
    }
    return 0.9 * scale * std::pow(static_cast<double>(n), -0.2);
}

double bandwidth_or_fallback(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) {
        throw std::invalid_argument("bandwidth_or_fallback: need at least 2 values");
    }
    const double first = values.front();
    bool identical = true;
    for (double v : values) {
        if (v != first) {
            identical = false;
            break;
        }
    }
    if (identical) {
        // Point mass: a token width keeps the search well-defined and the
        // mode lands on the common value.
        return 1e-6 * std::max(1.0, std::fabs(first));
    }
    return default_bandwidth(values);
}

double kde_density(const std::vector<double>& values, const KdeSpec& spec, double t) {
    check_spec(spec);
    if (values.empty()) {
        throw std::invalid_argument("kde_density: empty value set");
    }
    double s = 0.0;
    for (double v : values) {
        const double z = (t - v) / spec.bandwidth;
        s += std::exp(-0.5 * z * z);
    }
    return s * inv_sqrt_2pi / (static_cast<double>(values.size()) * spec.bandwidth);
}

std::vector<double> kde_density_grid(const std::vector<double>& values, double bandwidth,
                                     const std::vector<double>& grid) {
    if (values.empty()) {
        throw std::invalid_argument("kde_density_grid: empty value set");
    }
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw std::invalid_argument("kde_density_grid: bandwidth must be positive");
    }
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    const SortedKernel kern(sorted, bandwidth);
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i] = kern.density(grid[i]);
    }
    return out;
}

LogDensityDerivatives kde_log_density_derivatives(const std::vector<double>& values,
                                                  const KdeSpec& spec, double t) {
    check_spec(spec);
    if (values.empty()) {
        throw std::invalid_argument("kde_log_density_derivatives: empty value set");
    }
    // With z_d = (t - v_d) / h and S_k = sum z^k exp(-z^2/2):
    //   p    =  S_0 / (n h sqrt(2 pi))
    //   p'   = -S_1 / (n h^2 sqrt(2 pi))
    //   p''  = (S_2 - S_0) / (n h^3 sqrt(2 pi))
    //   (log p)'  = -S_1 / (h S_0)
    //   (log p)'' = ((S_2 - S_0) S_0 - S_1^2) / (h^2 S_0^2)
    const double h = spec.bandwidth;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double v : values) {
        const double z = (t - v) / h;
        const double k = std::exp(-0.5 * z * z);
        s0 += k;
        s1 += z * k;
        s2 += z * z * k;
    }
    LogDensityDerivatives out;
    if (s0 <= 0.0) {
        out.value = -std::numeric_limits<double>::infinity();
        out.first = 0.0;
        out.second = 0.0;
        return out;
    }
    out.value = std::log(s0 * inv_sqrt_2pi / (static_cast<double>(values.size()) * h));
    out.first = -s1 / (h * s0);
    out.second = ((s2 - s0) * s0 - s1 * s1) / (h * h * s0 * s0);
    return out;
}

double parzen_mode(const std::vector<double>& values, const KdeSpec& spec) {
    check_spec(spec);
    if (values.empty()) {
        throw std::invalid_argument("parzen_mode: empty value set");
    }

    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    const SortedKernel kern(sorted, spec.bandwidth);

    const int g = spec.grid_size;
    const double step = (spec.hi - spec.lo) / static_cast<double>(g - 1);

    // Dense scan with moving window bounds; boundaries match the binary
    // searches in SortedKernel::density.
    std::vector<double> dens(static_cast<std::size_t>(g));
    {
        const double cut = z_cut * spec.bandwidth;
        std::size_t lo = 0, hi = 0;
        const std::size_t n = sorted.size();
        for (int i = 0; i < g; ++i) {
            const double t = spec.lo + step * static_cast<double>(i);
            while (lo < n && sorted[lo] < t - cut) ++lo;
            if (hi < lo) hi = lo;
            while (hi < n && sorted[hi] <= t + cut) ++hi;
            double s = 0.0;
            for (std::size_t k = lo; k < hi; ++k) {
                const double z = (t - sorted[k]) / spec.bandwidth;
                s += std::exp(-0.5 * z * z);
            }
            dens[static_cast<std::size_t>(i)] = s * kern.norm;
        }
    }

    double best = dens[0];
    for (int i = 1; i < g; ++i) best = std::max(best, dens[static_cast<std::size_t>(i)]);

    // Tie rule: densities within 1e-12 of the maximum compete on |t|,
    // favoring "no shift"; exact |t| ties fall to the smaller t.
    int pick = -1;
    double pick_t = 0.0;
    for (int i = 0; i < g; ++i) {
        if (dens[static_cast<std::size_t>(i)] < best - 1e-12) continue;
        const double t = spec.lo + step * static_cast<double>(i);
        if (pick < 0 || std::fabs(t) < std::fabs(pick_t) ||
            (std::fabs(t) == std::fabs(pick_t) && t < pick_t)) {
            pick = i;
            pick_t = t;
        }
    }

    const double a = spec.lo + step * static_cast<double>(std::max(pick - 1, 0));
    const double b = spec.lo + step * static_cast<double>(std::min(pick + 1, g - 1));
    const double tol = 1e-8 * (spec.hi - spec.lo);
    const double refined = golden_section_max(kern, a, b, tol);

    return (kern.density(refined) > kern.density(pick_t)) ? refined : pick_t;
}

KdeSpec make_kde_spec(const std::vector<double>& values, const AnalysisConfig& config) {
    KdeSpec spec;
    spec.bandwidth = bandwidth_or_fallback(values);
    spec.grid_size = config.kde_grid_size;
    if (config.mode_search_interval) {
        spec.lo = config.mode_search_interval->first;
        spec.hi = config.mode_search_interval->second;
    } else {
        const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        spec.lo = *mn - 3.0 * spec.bandwidth;
        spec.hi = *mx + 3.0 * spec.bandwidth;
    }
    return spec;
}

}  // namespace ssrv
