#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ssrv/benchmark.hpp"
#include "ssrv/inference.hpp"
#include "ssrv/types.hpp"

namespace ssrv {

// Filesystem-level failure (missing file, unwritable directory). The CLI
// maps this to exit code 2; std::invalid_argument (malformed content,
// invalid values) maps to exit code 1.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TableReadOptions {
    char delimiter = '\0';   // '\0' sniffs: .csv reads commas, anything else tabs
    bool transpose = false;  // set when the file has samples as rows
};

// Header row carries sample ids (first cell is a corner label and is
// ignored); first column carries feature ids; body cells are base-10
// non-negative integers. Errors name the offending cell.
CountTable read_count_table(const std::string& path, const TableReadOptions& options = {});

void write_count_table(const CountTable& table, const std::string& path, char delimiter = '\0');

struct Metadata {
    ConditionLabels labels;      // aligned with the count table's sample order
    std::vector<double> loads;   // aligned; empty when the file has no load column
    std::string control_level;   // condition string mapped to 0
    std::string case_level;      // condition string mapped to 1
};

// Columns sample_id and condition are required (any order, extra columns
// ignored), load is optional. The two condition values map to {0, 1} in
// first-seen file order unless case_override names the level meaning 1.
// The sample set must match sample_ids exactly.
Metadata read_metadata(const std::string& path, const std::vector<std::string>& sample_ids,
                       const std::string& case_override = "", const TableReadOptions& options = {});

struct WriteReportOptions {
    double display_log_base = 0.0;  // 0 = natural log; e.g. 2 rescales displayed LFC columns
    std::string command_line;       // recorded in the manifest
    std::vector<std::string> input_paths;
    bool write_results = true;  // diagnose runs turn this off and emit only the density file
};

// Emits results.tsv, manifest.json, and (when the report carries a density
// diagnostic) diagnostics/lfc_density.tsv under dir. The density file stays
// in natural-log units regardless of the display base.
void write_report(const DaReport& report, const std::string& dir,
                  const WriteReportOptions& options = {});

// Long-format benchmark.tsv (scenario, method, metric, value), full
// benchmark.json, and plot-ready curves.csv (one row per scenario, one
// column per method x metric).
void write_benchmark(const BenchmarkResult& result, const std::string& dir,
                     const std::string& command_line = "");

// simulate output: counts.tsv, metadata.tsv (with true loads), truth.tsv,
// manifest.json.
void write_dataset(const SyntheticDataset& dataset, const GeneratorSpec& spec,
                   const std::string& dir, const std::string& command_line = "");

void write_convergence(const std::vector<ConvergenceRow>& rows, const std::string& path);

// Library version string recorded in manifests.
const char* version();

}  // namespace ssrv
