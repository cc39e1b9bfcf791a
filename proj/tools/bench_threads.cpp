// Timing harness: the fused parallel pipeline at several thread counts
// against the serial reference composition of standalone operations, with
// an equality check on the resulting reports. Usage:
//   bench_threads [features samples depth draws]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "ssrv/inference.hpp"
#include "ssrv/reference.hpp"
#include "ssrv/sim.hpp"

namespace {

bool summaries_equal(const ssrv::DaReport& a, const ssrv::DaReport& b) {
    if (a.feature_ids != b.feature_ids || a.scale_model != b.scale_model) return false;
    if (a.summaries.size() != b.summaries.size()) return false;
    auto bits_differ = [](double x, double y) {
        return std::memcmp(&x, &y, sizeof x) != 0;
    };
    for (std::size_t i = 0; i < a.summaries.size(); ++i) {
        const auto& u = a.summaries[i];
        const auto& v = b.summaries[i];
        if (bits_differ(u.mean_lfc, v.mean_lfc) || bits_differ(u.sd_lfc, v.sd_lfc) ||
            bits_differ(u.ci_low, v.ci_low) || bits_differ(u.ci_high, v.ci_high) ||
            bits_differ(u.tail_p, v.tail_p) || bits_differ(u.q_value, v.q_value) ||
            u.significant != v.significant)
            return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    ssrv::GeneratorSpec spec;
    spec.features = argc > 1 ? std::atoll(argv[1]) : 100;
    spec.samples = argc > 2 ? std::atoll(argv[2]) : 40;
    spec.depth = argc > 3 ? std::atoll(argv[3]) : 20000;
    spec.seed = 7;

    ssrv::AnalysisConfig config;
    config.num_draws = argc > 4 ? std::atoll(argv[4]) : 64;
    config.seed = 7;
    config.density_diagnostic = false;

    const auto ds = ssrv::generate(spec);
    std::printf("dataset: %lld features, %lld samples, depth %lld, %lld draws\n",
                static_cast<long long>(spec.features), static_cast<long long>(spec.samples),
                static_cast<long long>(spec.depth), static_cast<long long>(config.num_draws));

    const auto t0 = std::chrono::steady_clock::now();
    const auto ref = ssrv::reference::run_sparse_ssrv(ds.table, ds.labels, config);
    const double ref_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-24s %8.3fs   (baseline)\n", "reference (serial ops)", ref_s);

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::vector<int> counts = {1, 2, 4};
    if (static_cast<int>(hw) > 4) counts.push_back(static_cast<int>(hw));

    bool all_match = true;
    for (int t : counts) {
        const auto t1 = std::chrono::steady_clock::now();
        const auto rep = ssrv::run_sparse_ssrv(ds.table, ds.labels, config, t);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
        const bool match = summaries_equal(ref, rep);
        all_match = all_match && match;
        std::printf("fused pipeline, %2d thr   %8.3fs   speedup %.2fx   %s\n", t, secs,
                    ref_s / secs, match ? "matches reference" : "MISMATCH");
    }
    return all_match ? 0 : 1;
}
