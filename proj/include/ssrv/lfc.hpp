#pragma once

#include "ssrv/types.hpp"

namespace ssrv {

// Per-feature log-fold change of the compositional part:
// mean over case columns of log w minus mean over control columns.
std::vector<double> comp_lfc(const CompositionDraw& comp, const ConditionLabels& labels);

// General per-feature linear functional of the log composition:
// out[d] = sum_n weights[n] * log comp[d][n]. comp_lfc is the special case
// with weights +1/N1 on case columns and -1/N0 on control columns; other
// weightings (dose contrasts, regression scores) slot in here without
// touching the rest of the pipeline.
std::vector<double> linear_contrast(const CompositionDraw& comp, const std::vector<double>& weights);

// theta = theta_par + shift * 1. The rank-one structure of the scale
// update is the whole trick: one scalar per draw moves every feature.
std::vector<double> rank1_update(std::vector<double> comp_lfc_values, double shift);

namespace detail {

// Elementwise log of a composition (column-major, same shape).
MatrixD log_matrix(const CompositionDraw& comp);

// comp_lfc evaluated on a precomputed log matrix.
std::vector<double> contrast_from_logs(const MatrixD& logs, const ConditionLabels& labels);

// Same contrast over an explicit multiset of column indices per group
// (used by the bootstrap resampler).
std::vector<double> contrast_from_log_columns(const MatrixD& logs,
                                              const std::vector<std::int64_t>& case_cols,
                                              const std::vector<std::int64_t>& control_cols);

}  // namespace detail

}  // namespace ssrv
