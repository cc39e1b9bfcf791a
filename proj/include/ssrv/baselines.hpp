#pragma once

#include <vector>

#include "ssrv/inference.hpp"
#include "ssrv/types.hpp"

namespace ssrv {

// Comparison scale models. All three keep the measurement stage (Dirichlet
// composition draws on the shared stream keys) and replace the mode-based
// scale shift with a fixed or sampled one:
//   clr_degenerate  theta_perp = the CLR shift, no randomness
//   gaussian_clr    per-sample log scale ~ Normal(-clr column mean, gamma2)
//   informed_load   per-sample log scale ~ Normal(log load_n, gamma2)
enum class ScalePriorKind { clr_degenerate, gaussian_clr, informed_load };

struct ScalePrior {
    ScalePriorKind kind = ScalePriorKind::clr_degenerate;
    double gamma2 = 0.0;        // ignored for clr_degenerate
    std::vector<double> loads;  // informed_load only; length N, positive

    void validate(std::int64_t n_samples) const;
};

// theta_perp under the degenerate CLR scale model: with phi_n the mean of
// log proportions in column n, returns mean over control columns of phi
// minus mean over case columns.
double clr_shift(const CompositionDraw& comp, const ConditionLabels& labels);

// Same contract as run_sparse_ssrv but with the prior's scale shift per
// draw. clr_degenerate runs the gaussian_clr code path at gamma2 = 0 and
// consumes no noise stream, so the two match bit for bit.
DaReport run_baseline(const CountTable& table, const ConditionLabels& labels,
                      const AnalysisConfig& config, const ScalePrior& prior, int threads = 0);

}  // namespace ssrv
