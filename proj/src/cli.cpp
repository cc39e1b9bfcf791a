#include "ssrv/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ssrv/baselines.hpp"
#include "ssrv/benchmark.hpp"
#include "ssrv/inference.hpp"
#include "ssrv/io.hpp"
#include "ssrv/sim.hpp"

namespace ssrv {

namespace {

std::string join_args(int argc, const char* const* argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += ' ';
        out += argv[i];
    }
    return out;
}

char delimiter_from_flag(const std::string& flag) {
    if (flag.empty()) return '\0';
    if (flag == "tab") return '\t';
    if (flag == "comma") return ',';
    if (flag.size() == 1) return flag[0];
    throw std::invalid_argument("--delimiter expects a single character, \"tab\", or \"comma\"");
}

double log_base_from_flag(const std::string& flag) {
    if (flag == "e") return 0.0;
    if (flag == "2") return 2.0;
    throw std::invalid_argument("--log-base expects \"e\" or \"2\"");
}

BenchMethod method_from_name(const std::string& name) {
    if (name == "sparse-ssrv") return BenchMethod::make(MethodKind::sparse_ssrv);
    if (name == "clr") return BenchMethod::make(MethodKind::clr_degenerate);
    if (name == "gaussian-clr") return BenchMethod::make(MethodKind::gaussian_clr);
    if (name == "informed") return BenchMethod::make(MethodKind::informed_load);
    if (name == "oracle") return BenchMethod::make(MethodKind::oracle);
    if (name == "flag-all") return BenchMethod::make(MethodKind::flag_all);
    throw std::invalid_argument("unknown method \"" + name + "\"");
}

GeneratorSpec spec_from_json(const nlohmann::json& j) {
    GeneratorSpec s;
    if (j.contains("features")) s.features = j.at("features").get<std::int64_t>();
    if (j.contains("samples")) s.samples = j.at("samples").get<std::int64_t>();
    if (j.contains("depth")) s.depth = j.at("depth").get<std::int64_t>();
    if (j.contains("poisson_depth")) s.poisson_depth = j.at("poisson_depth").get<bool>();
    if (j.contains("prop_relevant")) s.prop_relevant = j.at("prop_relevant").get<double>();
    if (j.contains("pos_frac")) s.pos_frac = j.at("pos_frac").get<double>();
    if (j.contains("mu0")) s.mu0 = j.at("mu0").get<double>();
    if (j.contains("sigma0")) s.sigma0 = j.at("sigma0").get<double>();
    if (j.contains("load_sd")) s.load_sd = j.at("load_sd").get<double>();
    if (j.contains("case_load_multiplier"))
        s.case_load_multiplier = j.at("case_load_multiplier").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

std::vector<GeneratorSpec> read_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    if (!j.is_array() || j.empty())
        throw std::invalid_argument(path + ": expected a non-empty JSON array of scenarios");
    std::vector<GeneratorSpec> out;
    for (const auto& item : j) out.push_back(spec_from_json(item));
    return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> parse_ladder(const std::string& text) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    std::stringstream ss(text);
    std::string rung;
    while (std::getline(ss, rung, ',')) {
        const auto colon = rung.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("--ladder rungs are depth:features pairs, got \"" + rung +
                                        "\"");
        try {
            out.emplace_back(std::stoll(rung.substr(0, colon)), std::stoll(rung.substr(colon + 1)));
        } catch (const std::exception&) {
            throw std::invalid_argument("--ladder rung \"" + rung + "\" is not numeric");
        }
    }
    if (out.empty()) throw std::invalid_argument("--ladder is empty");
    return out;
}

void add_generator_flags(CLI::App* cmd, GeneratorSpec& spec) {
    cmd->add_option("--features", spec.features, "feature count")->capture_default_str();
    cmd->add_option("--samples", spec.samples, "sample count")->capture_default_str();
    cmd->add_option("--depth", spec.depth, "reads per sample")->capture_default_str();
    cmd->add_flag("--poisson-depth", spec.poisson_depth, "Poisson-jitter the per-sample depth");
    cmd->add_option("--prop-relevant", spec.prop_relevant, "fraction of features with effects")
        ->capture_default_str();
    cmd->add_option("--pos-frac", spec.pos_frac, "fraction of effects that are positive")
        ->capture_default_str();
    cmd->add_option("--mu0", spec.mu0, "baseline log-abundance mean")->capture_default_str();
    cmd->add_option("--sigma0", spec.sigma0, "baseline log-abundance sd")->capture_default_str();
    cmd->add_option("--load-sd", spec.load_sd, "per-sample log-load jitter sd")
        ->capture_default_str();
    cmd->add_option("--case-load-multiplier", spec.case_load_multiplier,
                    "case-group absolute load multiplier (counts unaffected)")
        ->capture_default_str();
}

struct AnalyzeArgs {
    std::string counts;
    std::string metadata;
    std::string method = "sparse-ssrv";
    std::string out;
    std::string case_override;
    std::string delimiter;
    std::string log_base = "e";
    bool transpose = false;
    bool no_density = false;
    double gamma2 = -1.0;  // resolved per method after parse
    int threads = 0;
    AnalysisConfig config;
};

void add_analyze_flags(CLI::App* cmd, AnalyzeArgs& a, bool with_method) {
    cmd->add_option("--counts", a.counts, "count table (features x samples)")->required();
    cmd->add_option("--metadata", a.metadata, "sample metadata (sample_id, condition[, load])")
        ->required();
    cmd->add_option("--out", a.out, "output directory")->required();
    if (with_method) {
        cmd->add_option("--method", a.method, "sparse-ssrv | clr | gaussian-clr | informed")
            ->check(CLI::IsMember({"sparse-ssrv", "clr", "gaussian-clr", "informed"}))
            ->capture_default_str();
        cmd->add_option("--gamma2", a.gamma2,
                        "scale-prior variance (default 0.25 gaussian-clr, 0.5 informed)");
    }
    cmd->add_option("--alpha", a.config.alpha_prior, "Dirichlet prior mass per feature")
        ->capture_default_str();
    cmd->add_option("--draws", a.config.num_draws, "posterior draws")->capture_default_str();
    cmd->add_option("--seed", a.config.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--fdr", a.config.target_fdr, "target false discovery rate")
        ->capture_default_str();
    cmd->add_option("--min-mean-count", a.config.filter_min_mean_count,
                    "drop features with mean count below this")
        ->capture_default_str();
    cmd->add_option("--min-prevalence", a.config.filter_min_prevalence,
                    "drop features present in fewer than this fraction of samples")
        ->capture_default_str();
    cmd->add_option("--grid", a.config.kde_grid_size, "mode-search grid size")
        ->capture_default_str();
    cmd->add_option("--case", a.case_override, "condition value to treat as the case group");
    cmd->add_option("--delimiter", a.delimiter, "field delimiter override (char, tab, comma)");
    cmd->add_flag("--transpose", a.transpose, "input file has samples as rows");
    cmd->add_option("--log-base", a.log_base, "display base for LFC columns (e or 2)")
        ->check(CLI::IsMember({"e", "2"}))
        ->capture_default_str();
    cmd->add_option("--threads", a.threads, "worker threads (0 = automatic)")
        ->capture_default_str();
}

int do_analyze(const AnalyzeArgs& a, const std::string& command_line, bool diagnose_only) {
    TableReadOptions read_opts;
    read_opts.delimiter = delimiter_from_flag(a.delimiter);
    read_opts.transpose = a.transpose;
    const CountTable table = read_count_table(a.counts, read_opts);
    TableReadOptions meta_opts;
    meta_opts.delimiter = read_opts.delimiter;
    const Metadata meta = read_metadata(a.metadata, table.sample_ids, a.case_override, meta_opts);

    AnalysisConfig config = a.config;
    config.density_diagnostic = diagnose_only || !a.no_density;

    DaReport report;
    if (a.method == "sparse-ssrv") {
        report = run_sparse_ssrv(table, meta.labels, config, a.threads);
    } else {
        ScalePrior prior;
        if (a.method == "clr") {
            prior.kind = ScalePriorKind::clr_degenerate;
        } else if (a.method == "gaussian-clr") {
            prior.kind = ScalePriorKind::gaussian_clr;
            prior.gamma2 = a.gamma2 < 0.0 ? 0.25 : a.gamma2;
        } else {
            prior.kind = ScalePriorKind::informed_load;
            prior.gamma2 = a.gamma2 < 0.0 ? 0.5 : a.gamma2;
            if (meta.loads.empty())
                throw std::invalid_argument(
                    "--method informed requires a load column in the metadata");
            prior.loads = meta.loads;
        }
        report = run_baseline(table, meta.labels, config, prior, a.threads);
    }

    WriteReportOptions write_opts;
    write_opts.display_log_base = log_base_from_flag(a.log_base);
    write_opts.command_line = command_line;
    write_opts.input_paths = {a.counts, a.metadata};
    write_opts.write_results = !diagnose_only;
    write_report(report, a.out, write_opts);

    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    if (diagnose_only) {
        std::cout << "wrote " << a.out << "/diagnostics/lfc_density.tsv ("
                  << report.density.grid.size() << " grid points, " << report.config.num_draws
                  << " mode draws)\n";
    } else {
        std::size_t sig = 0;
        for (const auto& s : report.summaries) sig += s.significant;
        std::cout << "wrote " << a.out << "/results.tsv (" << sig << " significant of "
                  << report.feature_ids.size() << " features, scale model " << report.scale_model
                  << ")\n";
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    const std::string command_line = join_args(argc, argv);

    CLI::App app{"Sparse SSRV differential abundance analysis for sequence count data"};
    app.require_subcommand(1);

    // analyze
    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "analyze a count table against two conditions");
    add_analyze_flags(analyze, an, true);

    // diagnose
    AnalyzeArgs di;
    auto* diagnose = app.add_subcommand("diagnose", "emit the LFC density diagnostic only");
    add_analyze_flags(diagnose, di, false);

    // simulate
    GeneratorSpec sim_spec;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset with truth");
    add_generator_flags(simulate, sim_spec);
    simulate->add_option("--seed", sim_spec.seed, "generator seed")->capture_default_str();
    simulate->add_option("--out", sim_out, "output directory")->required();

    // benchmark
    GeneratorSpec bench_base;
    std::string bench_out;
    std::string bench_scenarios;
    std::string bench_sweep;
    std::vector<double> bench_levels;
    std::string bench_methods = "sparse-ssrv,clr";
    int bench_replicates = 5;
    int bench_threads = 0;
    AnalysisConfig bench_config;
    auto* benchmark =
        app.add_subcommand("benchmark", "replicate FDR/TPR/F0.5 harness on synthetic data");
    add_generator_flags(benchmark, bench_base);
    benchmark->add_option("--seed", bench_base.seed, "scenario seed")->capture_default_str();
    benchmark->add_option("--scenarios", bench_scenarios,
                          "JSON file with an array of generator scenarios");
    benchmark->add_option("--sweep", bench_sweep, "sweep parameter (sparsity)")
        ->check(CLI::IsMember({"sparsity"}));
    benchmark->add_option("--levels", bench_levels, "sweep levels, comma separated")
        ->delimiter(',');
    benchmark->add_option("--methods", bench_methods,
                          "comma list: sparse-ssrv,clr,gaussian-clr,informed,oracle,flag-all")
        ->capture_default_str();
    benchmark->add_option("--replicates", bench_replicates, "replicates per scenario")
        ->capture_default_str();
    benchmark->add_option("--draws", bench_config.num_draws, "posterior draws per analysis")
        ->capture_default_str();
    benchmark->add_option("--alpha", bench_config.alpha_prior, "Dirichlet prior mass")
        ->capture_default_str();
    benchmark->add_option("--fdr", bench_config.target_fdr, "target false discovery rate")
        ->capture_default_str();
    benchmark->add_option("--threads", bench_threads, "worker threads (0 = automatic)")
        ->capture_default_str();
    benchmark->add_option("--out", bench_out, "output directory")->required();

    // probe-consistency
    GeneratorSpec probe_base;
    probe_base.samples = 40;
    probe_base.prop_relevant = 0.1;
    probe_base.load_sd = 0.0;
    std::string probe_ladder = "1000:100,10000:400,100000:1600";
    std::string probe_out;
    int probe_seeds = 10;
    int probe_threads = 0;
    AnalysisConfig probe_config;
    auto* probe = app.add_subcommand("probe-consistency",
                                     "estimator error along a depth/dimension ladder");
    add_generator_flags(probe, probe_base);
    probe->add_option("--seed", probe_base.seed, "base seed")->capture_default_str();
    probe->add_option("--ladder", probe_ladder, "comma list of depth:features rungs")
        ->capture_default_str();
    probe->add_option("--seeds", probe_seeds, "seeds per rung")->capture_default_str();
    probe->add_option("--draws", probe_config.num_draws, "posterior draws per analysis")
        ->capture_default_str();
    probe->add_option("--alpha", probe_config.alpha_prior, "Dirichlet prior mass")
        ->capture_default_str();
    probe->add_option("--threads", probe_threads, "worker threads (0 = automatic)")
        ->capture_default_str();
    probe->add_option("--out", probe_out, "write the convergence table to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(analyze)) return do_analyze(an, command_line, false);
        if (app.got_subcommand(diagnose)) return do_analyze(di, command_line, true);

        if (app.got_subcommand(simulate)) {
            const SyntheticDataset ds = generate(sim_spec);
            write_dataset(ds, sim_spec, sim_out, command_line);
            for (const auto& w : ds.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << "wrote " << sim_out << " (counts.tsv, metadata.tsv, truth.tsv)\n";
            return 0;
        }

        if (app.got_subcommand(benchmark)) {
            std::vector<BenchMethod> methods;
            {
                std::stringstream ss(bench_methods);
                std::string name;
                while (std::getline(ss, name, ',')) {
                    if (!name.empty()) methods.push_back(method_from_name(name));
                }
            }
            BenchmarkResult result;
            if (!bench_scenarios.empty()) {
                result = run_benchmark(read_scenarios(bench_scenarios), methods, bench_replicates,
                                       bench_config, bench_threads);
            } else if (bench_sweep == "sparsity") {
                if (bench_levels.empty())
                    throw std::invalid_argument("--sweep sparsity requires --levels");
                result = sparsity_sweep(bench_base, bench_levels, methods, bench_replicates,
                                        bench_config, bench_threads);
            } else {
                result = run_benchmark({bench_base}, methods, bench_replicates, bench_config,
                                       bench_threads);
            }
            write_benchmark(result, bench_out, command_line);
            std::cout << "scenario\tmethod\tfdr\ttpr\tf_half\tcompleted\n";
            for (const auto& cell : result.cells) {
                std::printf("%zu\t%s\t%.4f\t%.4f\t%.4f\t%d/%d\n", cell.scenario,
                            cell.method.c_str(), cell.mean_fdr, cell.mean_tpr, cell.mean_f_half,
                            cell.completed, result.replicates);
            }
            std::cout << "wrote " << bench_out << " (benchmark.tsv, curves.csv, benchmark.json)\n";
            return 0;
        }

        if (app.got_subcommand(probe)) {
            const auto rows = consistency_probe(probe_base, parse_ladder(probe_ladder),
                                                probe_seeds, probe_config, probe_threads);
            std::cout << "depth\tfeatures\tmedian_rmse\tmedian_mean_sd\n";
            for (const auto& r : rows)
                std::printf("%lld\t%lld\t%.6g\t%.6g\n", static_cast<long long>(r.depth),
                            static_cast<long long>(r.features), r.median_rmse, r.median_mean_sd);
            if (!probe_out.empty()) write_convergence(rows, probe_out);
            return 0;
        }
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace ssrv
