#include "ssrv/benchmark.hpp"

#include <atomic>
#include <stdexcept>
#include <unordered_map>

#include "ssrv/rng.hpp"
#include "ssrv/threading.hpp"

namespace ssrv {

std::string BenchMethod::name() const {
    switch (kind) {
        case MethodKind::sparse_ssrv: return "sparse-ssrv";
        case MethodKind::clr_degenerate: return "clr";
        case MethodKind::gaussian_clr: return "gaussian-clr";
        case MethodKind::informed_load: return "informed";
        case MethodKind::oracle: return "oracle";
        case MethodKind::flag_all: return "flag-all";
    }
    return "unknown";
}

BenchMethod BenchMethod::make(MethodKind kind) {
    BenchMethod m;
    m.kind = kind;
    if (kind == MethodKind::gaussian_clr) m.gamma2 = 0.25;
    if (kind == MethodKind::informed_load) m.gamma2 = 0.5;
    return m;
}

const std::string& generator_note() {
    static const std::string note =
        "synthetic data from a transparent log-normal/multinomial generator; "
        "directions and relative method orderings are meaningful, absolute "
        "metric values are not calibrated against trained ecosystem simulators";
    return note;
}

namespace {

// Map a report's significant calls back onto the full feature list; a
// feature the analysis filtered out is an implicit non-call.
std::vector<bool> calls_from_report(const DaReport& rep,
                                    const std::vector<std::string>& all_ids) {
    std::unordered_map<std::string, std::size_t> pos;
    pos.reserve(all_ids.size());
    for (std::size_t i = 0; i < all_ids.size(); ++i) pos.emplace(all_ids[i], i);
    std::vector<bool> called(all_ids.size(), false);
    for (std::size_t i = 0; i < rep.feature_ids.size(); ++i) {
        if (!rep.summaries[i].significant) continue;
        auto it = pos.find(rep.feature_ids[i]);
        if (it == pos.end()) throw std::runtime_error("benchmark: report feature not in dataset");
        called[it->second] = true;
    }
    return called;
}

ConfusionCounts score_method(const BenchMethod& method, const SyntheticDataset& ds,
                             const AnalysisConfig& config) {
    std::vector<bool> called;
    switch (method.kind) {
        case MethodKind::oracle: {
            called.resize(ds.truth.size());
            for (std::size_t d = 0; d < ds.truth.size(); ++d) called[d] = ds.truth[d] != 0.0;
            break;
        }
        case MethodKind::flag_all: {
            called.assign(ds.truth.size(), true);
            break;
        }
        case MethodKind::sparse_ssrv: {
            const DaReport rep = run_sparse_ssrv(ds.table, ds.labels, config, 1);
            called = calls_from_report(rep, ds.table.feature_ids);
            break;
        }
        default: {
            ScalePrior prior;
            prior.gamma2 = method.gamma2;
            if (method.kind == MethodKind::clr_degenerate) {
                prior.kind = ScalePriorKind::clr_degenerate;
            } else if (method.kind == MethodKind::gaussian_clr) {
                prior.kind = ScalePriorKind::gaussian_clr;
            } else {
                prior.kind = ScalePriorKind::informed_load;
                prior.loads = ds.true_loads;
            }
            const DaReport rep = run_baseline(ds.table, ds.labels, config, prior, 1);
            called = calls_from_report(rep, ds.table.feature_ids);
            break;
        }
    }
    return score_calls(called, ds.truth);
}

}  // namespace

BenchmarkResult run_benchmark(const std::vector<GeneratorSpec>& scenarios,
                              const std::vector<BenchMethod>& methods, int replicates,
                              const AnalysisConfig& config, int threads) {
    if (scenarios.empty()) throw std::invalid_argument("run_benchmark: no scenarios");
    if (methods.empty()) throw std::invalid_argument("run_benchmark: no methods");
    if (replicates < 1) throw std::invalid_argument("run_benchmark: replicates must be >= 1");
    for (const auto& s : scenarios) s.validate();
    config.validate();

    BenchmarkResult result;
    result.scenarios = scenarios;
    for (const auto& m : methods) result.methods.push_back(m.name());
    result.replicates = replicates;
    result.generator_note = generator_note();

    const auto n_sc = scenarios.size();
    const auto n_m = methods.size();
    result.cells.resize(n_sc * n_m);
    for (std::size_t i = 0; i < n_sc; ++i) {
        for (std::size_t j = 0; j < n_m; ++j) {
            auto& cell = result.cells[i * n_m + j];
            cell.scenario = i;
            cell.method = methods[j].name();
            cell.replicates.resize(static_cast<std::size_t>(replicates));
        }
    }

    // Tasks are (scenario, replicate); methods run back to back on the
    // same dataset inside one task, each analysis pinned to one thread.
    const auto n_tasks = static_cast<std::int64_t>(n_sc) * replicates;
    const int nt = resolve_threads(threads);

#pragma omp parallel for num_threads(nt) schedule(dynamic)
    for (std::int64_t t = 0; t < n_tasks; ++t) {
        const auto i = static_cast<std::size_t>(t / replicates);
        const auto r = static_cast<std::size_t>(t % replicates);

        GeneratorSpec spec = scenarios[i];
        spec.seed = derive_stream(spec.seed, static_cast<std::uint64_t>(r));
        AnalysisConfig cfg = config;
        cfg.seed = spec.seed;
        cfg.density_diagnostic = false;

        SyntheticDataset ds;
        std::string gen_error;
        try {
            ds = generate(spec);
        } catch (const std::exception& e) {
            gen_error = e.what();
        }

        for (std::size_t j = 0; j < n_m; ++j) {
            auto& slot = result.cells[i * n_m + j].replicates[r];
            if (!gen_error.empty()) {
                slot.ok = false;
                slot.error = "generate: " + gen_error;
                continue;
            }
            try {
                slot.counts = score_method(methods[j], ds, cfg);
                slot.ok = true;
            } catch (const std::exception& e) {
                slot.ok = false;
                slot.error = e.what();
            }
        }
    }

    for (auto& cell : result.cells) {
        double fdr = 0.0, tpr = 0.0, fh = 0.0;
        int done = 0;
        for (const auto& rep : cell.replicates) {
            if (!rep.ok) continue;
            fdr += fdr_of(rep.counts);
            tpr += tpr_of(rep.counts);
            fh += f_half_of(rep.counts);
            ++done;
        }
        cell.completed = done;
        if (done > 0) {
            cell.mean_fdr = fdr / done;
            cell.mean_tpr = tpr / done;
            cell.mean_f_half = fh / done;
        }
    }
    return result;
}

BenchmarkResult sparsity_sweep(const GeneratorSpec& base, const std::vector<double>& prop_levels,
                               const std::vector<BenchMethod>& methods, int replicates,
                               const AnalysisConfig& config, int threads) {
    if (prop_levels.empty()) throw std::invalid_argument("sparsity_sweep: no levels");
    std::vector<GeneratorSpec> scenarios;
    scenarios.reserve(prop_levels.size());
    for (double level : prop_levels) {
        GeneratorSpec s = base;
        s.prop_relevant = level;
        scenarios.push_back(s);
    }
    return run_benchmark(scenarios, methods, replicates, config, threads);
}

}  // namespace ssrv
