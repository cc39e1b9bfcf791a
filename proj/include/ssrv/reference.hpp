#pragma once

#include "ssrv/inference.hpp"
#include "ssrv/types.hpp"

namespace ssrv::reference {

// Serial pipeline composed of the standalone operations (sample_composition,
// comp_lfc, laplace_scale_fit, bootstrap_scale_fit, rank1_update, summarize)
// with the same stream keys as the fused parallel loop. Kept as the test
// anchor: apart from elapsed_seconds and threads_used, its DaReport must be
// identical to run_sparse_ssrv's on any input, at any thread count.
DaReport run_sparse_ssrv(const CountTable& table, const ConditionLabels& labels,
                         const AnalysisConfig& config);

}  // namespace ssrv::reference
