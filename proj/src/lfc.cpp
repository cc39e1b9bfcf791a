#include "ssrv/lfc.hpp"

#include <cmath>
#include <stdexcept>

namespace ssrv {

namespace detail {

MatrixD log_matrix(const CompositionDraw& comp) {
    MatrixD logs(comp.rows, comp.cols);
    const std::size_t total = comp.data.size();
    for (std::size_t i = 0; i < total; ++i) {
        logs.data[i] = std::log(comp.data[i]);
    }
    return logs;
}

std::vector<double> contrast_from_log_columns(const MatrixD& logs,
                                              const std::vector<std::int64_t>& case_cols,
                                              const std::vector<std::int64_t>& control_cols) {
    if (case_cols.empty() || control_cols.empty()) {
        throw std::invalid_argument("comp_lfc: both condition groups must be non-empty");
    }
    const std::int64_t D = logs.rows;
    std::vector<double> out(static_cast<std::size_t>(D), 0.0);

    for (auto n : case_cols) {
        const double* c = logs.col(n);
        for (std::int64_t d = 0; d < D; ++d) out[d] += c[d];
    }
    const double inv1 = 1.0 / static_cast<double>(case_cols.size());
    for (std::int64_t d = 0; d < D; ++d) out[d] *= inv1;

    std::vector<double> ctrl(static_cast<std::size_t>(D), 0.0);
    for (auto n : control_cols) {
        const double* c = logs.col(n);
        for (std::int64_t d = 0; d < D; ++d) ctrl[d] += c[d];
    }
    const double inv0 = 1.0 / static_cast<double>(control_cols.size());
    for (std::int64_t d = 0; d < D; ++d) out[d] -= ctrl[d] * inv0;

    return out;
}

std::vector<double> contrast_from_logs(const MatrixD& logs, const ConditionLabels& labels) {
    return contrast_from_log_columns(logs, labels.group_indices(1), labels.group_indices(0));
}

}  // namespace detail

std::vector<double> comp_lfc(const CompositionDraw& comp, const ConditionLabels& labels) {
    labels.validate(comp.cols);
    return detail::contrast_from_logs(detail::log_matrix(comp), labels);
}

std::vector<double> linear_contrast(const CompositionDraw& comp, const std::vector<double>& weights) {
    if (static_cast<std::int64_t>(weights.size()) != comp.cols) {
        throw std::invalid_argument("linear_contrast: one weight per sample required");
    }
    const MatrixD logs = detail::log_matrix(comp);
    std::vector<double> out(static_cast<std::size_t>(comp.rows), 0.0);
    for (std::int64_t n = 0; n < comp.cols; ++n) {
        const double w = weights[n];
        if (w == 0.0) continue;
        const double* c = logs.col(n);
        for (std::int64_t d = 0; d < comp.rows; ++d) {
            out[d] += w * c[d];
        }
    }
    return out;
}

std::vector<double> rank1_update(std::vector<double> comp_lfc_values, double shift) {
    for (auto& v : comp_lfc_values) v += shift;
    return comp_lfc_values;
}

}  // namespace ssrv
