#pragma once

#include <optional>
#include <vector>

#include "nestdiag/record.hpp"

namespace nestdiag {

enum class Verdict { trustworthy, rerun_with_doubled_steps };

enum class Recommendation { accept, rerun_doubled, accept_with_caution };

/// Summary of the relative jump distances of a run. The run is considered
/// trustworthy when the majority of jumps exceed the reference distance
/// and their geometric mean is above 1.
struct DiagnosticSummary {
    double geometric_mean_rjd = 0.0;
    double frac_rjd_above_1 = 0.0;
    long num_jumps = 0;
    double esjd = 0.0;
    Verdict verdict = Verdict::rerun_with_doubled_steps;
    /// Walks that returned to their start point exactly; these are clamped
    /// to the smallest positive double in the geometric mean.
    long num_zero_jumps = 0;
};

/// One-sample KS test of the insertion ranks against uniformity.
struct InsertionOrderTest {
    double ks_statistic = 0.0;
    double p_value = 1.0;
};

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    long count = 0;
};

/// Histogram over log10(rjd) with bin edges aligned to multiples of
/// 1/bins_per_decade. Zero jumps are folded into the lowest bin so the
/// total count is conserved.
struct RjdHistogram {
    std::vector<HistogramBin> bins;
    int bins_per_decade = 0;
    long total = 0;
};

DiagnosticSummary summarize(const std::vector<IterationRecord>& records);

RjdHistogram rjd_histogram(const std::vector<IterationRecord>& records,
                           int bins_per_decade);

InsertionOrderTest insertion_order_ks(
    const std::vector<IterationRecord>& records, int num_live);

/// Survival function of the Kolmogorov distribution at sqrt(n)*D
/// (asymptotic one-sample KS p-value).
double ks_p_value(double statistic, long n);

struct PreviousRun {
    DiagnosticSummary summary;
    double logz = 0.0;
    double logz_err = 0.0;
};

/// The rerun rule: accept a trustworthy summary outright; otherwise demand
/// a rerun with doubled steps unless a previous run exists whose evidence
/// and RJD distribution both match the current one.
Recommendation decision_rule(const DiagnosticSummary& current,
                             const std::optional<PreviousRun>& previous,
                             double logz, double logz_err);

const char* to_string(Verdict v);
const char* to_string(Recommendation r);

}  // namespace nestdiag
