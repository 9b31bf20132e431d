#include "nestdiag/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nestdiag/core.hpp"

namespace nestdiag {

DiagnosticSummary summarize(const std::vector<IterationRecord>& records) {
    if (records.empty())
        throw PreconditionError("summarize: no records");

    DiagnosticSummary out;
    double sum_log_rjd = 0.0;
    double sum_jd_sq = 0.0;
    long above = 0;
    for (const auto& rec : records) {
        sum_jd_sq += rec.jd * rec.jd;
        if (!(rec.r > 0.0)) continue;
        ++out.num_jumps;
        if (rec.rjd > 1.0) ++above;
        if (rec.jd > 0.0) {
            sum_log_rjd += std::log(rec.rjd);
        } else {
            ++out.num_zero_jumps;
            sum_log_rjd += std::log(std::numeric_limits<double>::min());
        }
    }
    if (out.num_jumps == 0)
        throw PreconditionError("summarize: no records with a positive radius");

    out.geometric_mean_rjd =
        std::exp(sum_log_rjd / static_cast<double>(out.num_jumps));
    out.frac_rjd_above_1 =
        static_cast<double>(above) / static_cast<double>(out.num_jumps);
    out.esjd = sum_jd_sq / static_cast<double>(records.size());
    out.verdict = (out.frac_rjd_above_1 > 0.5 && out.geometric_mean_rjd > 1.0)
                      ? Verdict::trustworthy
                      : Verdict::rerun_with_doubled_steps;
    return out;
}

RjdHistogram rjd_histogram(const std::vector<IterationRecord>& records,
                           int bins_per_decade) {
    if (bins_per_decade < 1)
        throw PreconditionError("rjd_histogram: bins_per_decade must be >= 1");

    RjdHistogram hist;
    hist.bins_per_decade = bins_per_decade;

    double lo_log = std::numeric_limits<double>::infinity();
    double hi_log = -std::numeric_limits<double>::infinity();
    long zero_jumps = 0;
    for (const auto& rec : records) {
        if (!(rec.r > 0.0)) continue;
        if (!(rec.rjd > 0.0)) {
            ++zero_jumps;
            continue;
        }
        const double lg = std::log10(rec.rjd);
        lo_log = std::min(lo_log, lg);
        hi_log = std::max(hi_log, lg);
    }
    if (!std::isfinite(lo_log)) {
        if (zero_jumps > 0) {
            hist.bins.push_back({0.0, 0.0, zero_jumps});
            hist.total = zero_jumps;
        }
        return hist;
    }

    const double step = 1.0 / bins_per_decade;
    const long first = static_cast<long>(std::floor(lo_log / step));
    long last = static_cast<long>(std::floor(hi_log / step));
    // A value exactly on the top edge belongs to the final bin.
    if (hi_log == static_cast<double>(last) * step && last > first) --last;
    const long nbins = last - first + 1;
    hist.bins.resize(static_cast<std::size_t>(nbins));
    for (long b = 0; b < nbins; ++b) {
        hist.bins[static_cast<std::size_t>(b)].lo =
            std::pow(10.0, static_cast<double>(first + b) * step);
        hist.bins[static_cast<std::size_t>(b)].hi =
            std::pow(10.0, static_cast<double>(first + b + 1) * step);
    }
    for (const auto& rec : records) {
        if (!(rec.r > 0.0)) continue;
        long b = 0;
        if (rec.rjd > 0.0) {
            b = static_cast<long>(std::floor(std::log10(rec.rjd) / step)) -
                first;
            b = std::clamp(b, 0L, nbins - 1);
        }
        ++hist.bins[static_cast<std::size_t>(b)].count;
        ++hist.total;
    }
    return hist;
}

double ks_p_value(double statistic, long n) {
    const double lambda = std::sqrt(static_cast<double>(n)) * statistic;
    if (lambda < 1e-10) return 1.0;
    // Kolmogorov survival function, alternating series.
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

InsertionOrderTest insertion_order_ks(
    const std::vector<IterationRecord>& records, int num_live) {
    if (num_live < 2)
        throw PreconditionError("insertion_order_ks: num_live must be >= 2");
    if (records.empty())
        throw PreconditionError("insertion_order_ks: no records");

    std::vector<double> values;
    values.reserve(records.size());
    for (const auto& rec : records)
        values.push_back((rec.insertion_rank + 0.5) /
                         static_cast<double>(num_live));
    std::sort(values.begin(), values.end());

    const double n = static_cast<double>(values.size());
    double d_stat = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        d_stat = std::max({d_stat, values[i] - static_cast<double>(i) / n,
                           static_cast<double>(i + 1) / n - values[i]});
    }
    InsertionOrderTest out;
    out.ks_statistic = d_stat;
    out.p_value = ks_p_value(d_stat, static_cast<long>(values.size()));
    return out;
}

Recommendation decision_rule(const DiagnosticSummary& current,
                             const std::optional<PreviousRun>& previous,
                             double logz, double logz_err) {
    if (current.verdict == Verdict::trustworthy) return Recommendation::accept;
    if (!previous) return Recommendation::rerun_doubled;

    const double combined_err = std::sqrt(logz_err * logz_err +
                                          previous->logz_err * previous->logz_err);
    const bool logz_stable = std::abs(logz - previous->logz) <= 2.0 * combined_err;
    const bool rjd_stable =
        previous->summary.geometric_mean_rjd > 0.0 &&
        std::abs(current.geometric_mean_rjd / previous->summary.geometric_mean_rjd -
                 1.0) <= 0.1;
    return (logz_stable && rjd_stable) ? Recommendation::accept_with_caution
                                       : Recommendation::rerun_doubled;
}

const char* to_string(Verdict v) {
    return v == Verdict::trustworthy ? "trustworthy"
                                     : "rerun-with-doubled-steps";
}

const char* to_string(Recommendation r) {
    switch (r) {
        case Recommendation::accept: return "accept";
        case Recommendation::rerun_doubled: return "rerun-doubled";
        case Recommendation::accept_with_caution: return "accept-with-caution";
    }
    return "unknown";
}

}  // namespace nestdiag
