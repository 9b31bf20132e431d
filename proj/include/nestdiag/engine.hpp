#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nestdiag/core.hpp"
#include "nestdiag/diagnostics.hpp"
#include "nestdiag/record.hpp"
#include "nestdiag/sampler.hpp"

namespace nestdiag {

/// Completed nested sampling run: the dead-point trace, the evidence with
/// its information-based uncertainty, and the RJD summary.
struct RunResult {
    std::vector<IterationRecord> records;
    double logz = kNegInf;
    double logz_err = 0.0;
    /// Contribution of the final live points, already folded into logz.
    double logz_remainder = kNegInf;
    int num_live = 0;
    int num_steps = 0;
    std::string problem_name;
    std::uint64_t seed = 0;
    int radius_update_interval = 0;
    double wall_time_s = 0.0;
    DiagnosticSummary summary;
};

/// Observer invoked at the top of every iteration with the current live
/// set, before the worst point is replaced.
using IterationObserver =
    std::function<void(long iter, std::span<const UnitPoint> live)>;

RunResult run(const ProblemDefinition& problem, const RunConfig& config);

RunResult run(const ProblemDefinition& problem, const RunConfig& config,
              const StepSampler& sampler,
              const IterationObserver& observer = nullptr);

/// Count of entries in a sorted log-likelihood sequence strictly below
/// new_logl; the position at which a new live point slots in.
int insertion_rank(std::span<const double> sorted_logls, double new_logl);

/// Information-based evidence uncertainty sqrt(H / K), with H the KL
/// divergence of the posterior from the prior computed from the records'
/// normalized weights.
double logz_uncertainty(const std::vector<IterationRecord>& records,
                        int num_live);

}  // namespace nestdiag
