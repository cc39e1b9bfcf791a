#include "ssrv/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace fs = std::filesystem;
using nlohmann::json;

namespace ssrv {

const char* version() {
#ifdef SSRV_VERSION
    return SSRV_VERSION;
#else
    return "0.0.0";
#endif
}

namespace {

char pick_delim(const std::string& path, char requested) {
    if (requested != '\0') return requested;
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0 ? ',' : '\t';
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw io_error("read failure on " + path);
    std::vector<std::string> lines;
    std::string text = buf.str();
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    for (auto& line : lines) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

[[noreturn]] void cell_error(const std::string& path, const std::string& what,
                             const std::string& cell, std::size_t row, std::size_t col) {
    throw std::invalid_argument(path + ": " + what + " \"" + cell + "\" at row " +
                                std::to_string(row) + ", column " + std::to_string(col));
}

// Strict base-10 integer; row/col are 1-based file coordinates.
std::int64_t parse_count(const std::string& path, const std::string& cell, std::size_t row,
                         std::size_t col) {
    std::int64_t v = 0;
    const char* b = cell.data();
    const char* e = b + cell.size();
    auto res = std::from_chars(b, e, v);
    if (cell.empty() || res.ec != std::errc{} || res.ptr != e)
        cell_error(path, "non-integer count", cell, row, col);
    if (v < 0) cell_error(path, "negative count", cell, row, col);
    return v;
}

double parse_real(const std::string& path, const std::string& cell, std::size_t row,
                  std::size_t col) {
    double v = 0.0;
    const char* b = cell.data();
    const char* e = b + cell.size();
    auto res = std::from_chars(b, e, v);
    if (cell.empty() || res.ec != std::errc{} || res.ptr != e)
        cell_error(path, "non-numeric value", cell, row, col);
    return v;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw io_error("cannot create directory " + path.parent_path().string());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path.string());
    return out;
}

void finish_out(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw io_error("write failure on " + path.string());
}

std::string iso_utc(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json config_to_json(const AnalysisConfig& c) {
    json j;
    j["alpha_prior"] = c.alpha_prior;
    j["num_draws"] = c.num_draws;
    j["seed"] = c.seed;
    j["target_fdr"] = c.target_fdr;
    j["kde_grid_size"] = c.kde_grid_size;
    if (c.mode_search_interval) {
        j["mode_search_interval"] = {c.mode_search_interval->first, c.mode_search_interval->second};
    } else {
        j["mode_search_interval"] = nullptr;
    }
    j["filter_min_mean_count"] = c.filter_min_mean_count;
    j["filter_min_prevalence"] = c.filter_min_prevalence;
    j["density_diagnostic"] = c.density_diagnostic;
    return j;
}

json spec_to_json(const GeneratorSpec& s) {
    json j;
    j["features"] = s.features;
    j["samples"] = s.samples;
    j["depth"] = s.depth;
    j["poisson_depth"] = s.poisson_depth;
    j["prop_relevant"] = s.prop_relevant;
    j["pos_frac"] = s.pos_frac;
    j["mu0"] = s.mu0;
    j["sigma0"] = s.sigma0;
    j["load_sd"] = s.load_sd;
    j["case_load_multiplier"] = s.case_load_multiplier;
    j["seed"] = s.seed;
    return j;
}

void write_json(const json& j, const fs::path& path) {
    auto out = open_out(path);
    out << j.dump(2) << "\n";
    finish_out(out, path);
}

}  // namespace

CountTable read_count_table(const std::string& path, const TableReadOptions& options) {
    const char delim = pick_delim(path, options.delimiter);
    const auto lines = read_lines(path);
    if (lines.empty()) throw std::invalid_argument(path + ": empty file");
    const auto header = split(lines[0], delim);
    if (header.size() < 2)
        throw std::invalid_argument(path + ": header must name at least one data column");
    const std::vector<std::string> col_ids(header.begin() + 1, header.end());
    if (lines.size() < 2) throw std::invalid_argument(path + ": no data rows");

    const std::size_t n_rows = lines.size() - 1;
    const std::size_t n_cols = col_ids.size();
    std::vector<std::string> row_ids(n_rows);
    std::vector<std::int64_t> body(n_rows * n_cols);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const auto fields = split(lines[r + 1], delim);
        if (fields.size() != header.size())
            throw std::invalid_argument(path + ": ragged row " + std::to_string(r + 2) +
                                        ": expected " + std::to_string(header.size()) +
                                        " fields, found " + std::to_string(fields.size()));
        row_ids[r] = fields[0];
        for (std::size_t c = 0; c < n_cols; ++c)
            body[r * n_cols + c] = parse_count(path, fields[c + 1], r + 2, c + 2);
    }

    CountTable table;
    if (!options.transpose) {
        table.feature_ids = std::move(row_ids);
        table.sample_ids = col_ids;
        table.counts.resize(body.size());
        const std::size_t D = n_rows;
        for (std::size_t n = 0; n < n_cols; ++n)
            for (std::size_t d = 0; d < D; ++d) table.counts[n * D + d] = body[d * n_cols + n];
    } else {
        table.feature_ids = col_ids;
        table.sample_ids = std::move(row_ids);
        // File rows are samples, so the row-major body is already the
        // feature-major column layout.
        table.counts = std::move(body);
    }
    try {
        table.finalize();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return table;
}

void write_count_table(const CountTable& table, const std::string& path, char delimiter) {
    const char delim = pick_delim(path, delimiter);
    auto out = open_out(path);
    out << "feature_id";
    for (const auto& s : table.sample_ids) out << delim << s;
    out << "\n";
    const auto D = table.n_features();
    const auto N = table.n_samples();
    for (std::int64_t d = 0; d < D; ++d) {
        out << table.feature_ids[static_cast<std::size_t>(d)];
        for (std::int64_t n = 0; n < N; ++n) out << delim << table.at(d, n);
        out << "\n";
    }
    finish_out(out, path);
}

Metadata read_metadata(const std::string& path, const std::vector<std::string>& sample_ids,
                       const std::string& case_override, const TableReadOptions& options) {
    const char delim = pick_delim(path, options.delimiter);
    const auto lines = read_lines(path);
    if (lines.empty()) throw std::invalid_argument(path + ": empty file");
    const auto header = split(lines[0], delim);

    auto find_col = [&](const std::string& name) -> std::ptrdiff_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
        return -1;
    };
    const auto id_col = find_col("sample_id");
    const auto cond_col = find_col("condition");
    const auto load_col = find_col("load");
    if (id_col < 0) throw std::invalid_argument(path + ": missing required column \"sample_id\"");
    if (cond_col < 0) throw std::invalid_argument(path + ": missing required column \"condition\"");

    struct Row {
        std::string condition;
        double load = 0.0;
    };
    std::unordered_map<std::string, Row> rows;
    std::vector<std::string> levels;  // distinct conditions, file order
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split(lines[r], delim);
        if (fields.size() != header.size())
            throw std::invalid_argument(path + ": ragged row " + std::to_string(r + 1) +
                                        ": expected " + std::to_string(header.size()) +
                                        " fields, found " + std::to_string(fields.size()));
        const auto& sid = fields[static_cast<std::size_t>(id_col)];
        if (rows.count(sid))
            throw std::invalid_argument(path + ": duplicate sample_id \"" + sid + "\"");
        Row row;
        row.condition = fields[static_cast<std::size_t>(cond_col)];
        if (std::find(levels.begin(), levels.end(), row.condition) == levels.end())
            levels.push_back(row.condition);
        if (load_col >= 0) {
            row.load = parse_real(path, fields[static_cast<std::size_t>(load_col)], r + 1,
                                  static_cast<std::size_t>(load_col) + 1);
            if (!(row.load > 0.0) || !std::isfinite(row.load))
                cell_error(path, "non-positive load", fields[static_cast<std::size_t>(load_col)],
                           r + 1, static_cast<std::size_t>(load_col) + 1);
        }
        rows.emplace(sid, std::move(row));
    }

    if (levels.size() != 2)
        throw std::invalid_argument(path + ": need exactly 2 condition values, found " +
                                    std::to_string(levels.size()));

    Metadata meta;
    if (case_override.empty()) {
        meta.control_level = levels[0];
        meta.case_level = levels[1];
    } else if (case_override == levels[0]) {
        meta.case_level = levels[0];
        meta.control_level = levels[1];
    } else if (case_override == levels[1]) {
        meta.case_level = levels[1];
        meta.control_level = levels[0];
    } else {
        throw std::invalid_argument(path + ": --case value \"" + case_override +
                                    "\" does not match any condition value");
    }

    if (rows.size() != sample_ids.size())
        throw std::invalid_argument(path + ": metadata lists " + std::to_string(rows.size()) +
                                    " samples, count table has " +
                                    std::to_string(sample_ids.size()));
    meta.labels.x.resize(sample_ids.size());
    if (load_col >= 0) meta.loads.resize(sample_ids.size());
    for (std::size_t n = 0; n < sample_ids.size(); ++n) {
        auto it = rows.find(sample_ids[n]);
        if (it == rows.end())
            throw std::invalid_argument(path + ": no metadata row for sample \"" + sample_ids[n] +
                                        "\"");
        meta.labels.x[n] = it->second.condition == meta.case_level ? 1 : 0;
        if (load_col >= 0) meta.loads[n] = it->second.load;
    }
    meta.labels.validate(static_cast<std::int64_t>(sample_ids.size()));
    return meta;
}

void write_report(const DaReport& report, const std::string& dir,
                  const WriteReportOptions& options) {
    const fs::path base(dir);
    std::error_code ec;
    fs::create_directories(base, ec);
    if (ec) throw io_error("cannot create directory " + base.string());

    const double scale =
        options.display_log_base > 0.0 ? 1.0 / std::log(options.display_log_base) : 1.0;

    if (options.write_results) {
        const auto path = base / "results.tsv";
        auto out = open_out(path);
        out << "feature_id\tmean_lfc\tsd_lfc\tci_low\tci_high\ttail_p\tq_value\tsignificant\n";
        for (std::size_t d = 0; d < report.feature_ids.size(); ++d) {
            const auto& s = report.summaries[d];
            out << report.feature_ids[d] << "\t" << fmt(s.mean_lfc * scale) << "\t"
                << fmt(s.sd_lfc * scale) << "\t" << fmt(s.ci_low * scale) << "\t"
                << fmt(s.ci_high * scale) << "\t" << fmt(s.tail_p) << "\t" << fmt(s.q_value)
                << "\t" << (s.significant ? "true" : "false") << "\n";
        }
        finish_out(out, path);
    }

    if (!report.density.grid.empty()) {
        const auto path = base / "diagnostics" / "lfc_density.tsv";
        auto out = open_out(path);
        out << "t\tmean_density\tmode_draw\n";
        const auto n_rows = std::max(report.density.grid.size(), report.density.mode_draws.size());
        for (std::size_t i = 0; i < n_rows; ++i) {
            if (i < report.density.grid.size())
                out << fmt(report.density.grid[i]) << "\t" << fmt(report.density.mean_density[i]);
            else
                out << "\t";
            out << "\t";
            if (i < report.density.mode_draws.size()) out << fmt(report.density.mode_draws[i]);
            out << "\n";
        }
        finish_out(out, path);
    }

    json manifest;
    manifest["software"] = "sparse-ssrv";
    manifest["version"] = version();
    manifest["command_line"] = options.command_line;
    manifest["inputs"] = options.input_paths;
    manifest["scale_model"] = report.scale_model;
    manifest["scale_variance"] = report.scale_variance;
    manifest["laplace_variance"] = report.laplace_variance;
    manifest["bootstrap_variance"] = report.bootstrap_variance;
    manifest["config"] = config_to_json(report.config);
    manifest["display_log_base"] =
        options.display_log_base > 0.0 ? fmt(options.display_log_base) : "e";
    manifest["n_features"] = report.feature_ids.size();
    manifest["threads_used"] = report.threads_used;
    manifest["elapsed_seconds"] = report.elapsed_seconds;
    const auto now = std::chrono::system_clock::now();
    manifest["started_at"] =
        iso_utc(now - std::chrono::duration_cast<std::chrono::system_clock::duration>(
                          std::chrono::duration<double>(report.elapsed_seconds)));
    manifest["finished_at"] = iso_utc(now);
    manifest["warnings"] = report.warnings;
    write_json(manifest, base / "manifest.json");
}

void write_benchmark(const BenchmarkResult& result, const std::string& dir,
                     const std::string& command_line) {
    const fs::path base(dir);
    std::error_code ec;
    fs::create_directories(base, ec);
    if (ec) throw io_error("cannot create directory " + base.string());

    const auto n_m = result.methods.size();
    {
        const auto path = base / "benchmark.tsv";
        auto out = open_out(path);
        out << "# " << result.generator_note << "\n";
        out << "scenario\tmethod\tmetric\tvalue\n";
        for (const auto& cell : result.cells) {
            const auto tag = std::to_string(cell.scenario);
            out << tag << "\t" << cell.method << "\tfdr\t" << fmt(cell.mean_fdr) << "\n";
            out << tag << "\t" << cell.method << "\ttpr\t" << fmt(cell.mean_tpr) << "\n";
            out << tag << "\t" << cell.method << "\tf_half\t" << fmt(cell.mean_f_half) << "\n";
            out << tag << "\t" << cell.method << "\tcompleted\t" << cell.completed << "\n";
        }
        finish_out(out, path);
    }
    {
        const auto path = base / "curves.csv";
        auto out = open_out(path);
        out << "# " << result.generator_note << "\n";
        out << "scenario,features,samples,depth,prop_relevant,pos_frac";
        for (const auto& m : result.methods)
            out << "," << m << ".fdr," << m << ".tpr," << m << ".f_half";
        out << "\n";
        for (std::size_t i = 0; i < result.scenarios.size(); ++i) {
            const auto& s = result.scenarios[i];
            out << i << "," << s.features << "," << s.samples << "," << s.depth << ","
                << fmt(s.prop_relevant) << "," << fmt(s.pos_frac);
            for (std::size_t j = 0; j < n_m; ++j) {
                const auto& cell = result.cells[i * n_m + j];
                out << "," << fmt(cell.mean_fdr) << "," << fmt(cell.mean_tpr) << ","
                    << fmt(cell.mean_f_half);
            }
            out << "\n";
        }
        finish_out(out, path);
    }

    json j;
    j["generator_note"] = result.generator_note;
    j["command_line"] = command_line;
    j["version"] = version();
    j["replicates"] = result.replicates;
    j["methods"] = result.methods;
    j["scenarios"] = json::array();
    for (const auto& s : result.scenarios) j["scenarios"].push_back(spec_to_json(s));
    j["cells"] = json::array();
    for (const auto& cell : result.cells) {
        json c;
        c["scenario"] = cell.scenario;
        c["method"] = cell.method;
        c["completed"] = cell.completed;
        c["mean_fdr"] = cell.mean_fdr;
        c["mean_tpr"] = cell.mean_tpr;
        c["mean_f_half"] = cell.mean_f_half;
        c["replicates"] = json::array();
        for (const auto& r : cell.replicates) {
            json rr;
            rr["ok"] = r.ok;
            if (r.ok) {
                rr["tp"] = r.counts.tp;
                rr["fp"] = r.counts.fp;
                rr["fn"] = r.counts.fn;
                rr["tn"] = r.counts.tn;
            } else {
                rr["error"] = r.error;
            }
            c["replicates"].push_back(std::move(rr));
        }
        j["cells"].push_back(std::move(c));
    }
    write_json(j, base / "benchmark.json");
}

void write_dataset(const SyntheticDataset& dataset, const GeneratorSpec& spec,
                   const std::string& dir, const std::string& command_line) {
    const fs::path base(dir);
    std::error_code ec;
    fs::create_directories(base, ec);
    if (ec) throw io_error("cannot create directory " + base.string());

    write_count_table(dataset.table, (base / "counts.tsv").string());
    {
        const auto path = base / "metadata.tsv";
        auto out = open_out(path);
        out << "sample_id\tcondition\tload\n";
        for (std::size_t n = 0; n < dataset.table.sample_ids.size(); ++n) {
            out << dataset.table.sample_ids[n] << "\t"
                << (dataset.labels.x[n] ? "case" : "ctrl") << "\t" << fmt(dataset.true_loads[n])
                << "\n";
        }
        finish_out(out, path);
    }
    {
        const auto path = base / "truth.tsv";
        auto out = open_out(path);
        out << "feature_id\ttrue_lfc\n";
        for (std::size_t d = 0; d < dataset.table.feature_ids.size(); ++d)
            out << dataset.table.feature_ids[d] << "\t" << fmt(dataset.truth[d]) << "\n";
        finish_out(out, path);
    }
    json manifest;
    manifest["software"] = "sparse-ssrv";
    manifest["version"] = version();
    manifest["command_line"] = command_line;
    manifest["generator"] = spec_to_json(spec);
    manifest["warnings"] = dataset.warnings;
    manifest["written_at"] = iso_utc(std::chrono::system_clock::now());
    write_json(manifest, base / "manifest.json");
}

void write_convergence(const std::vector<ConvergenceRow>& rows, const std::string& path) {
    auto out = open_out(path);
    out << "depth\tfeatures\tmedian_rmse\tmedian_mean_sd\n";
    for (const auto& r : rows)
        out << r.depth << "\t" << r.features << "\t" << fmt(r.median_rmse) << "\t"
            << fmt(r.median_mean_sd) << "\n";
    finish_out(out, path);
}

}  // namespace ssrv
