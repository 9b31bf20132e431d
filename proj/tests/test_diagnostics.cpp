#include <doctest.h>

#include <cmath>

#include "nestdiag/diagnostics.hpp"
#include "nestdiag/core.hpp"

using namespace nestdiag;

namespace {

std::vector<IterationRecord> records_from_rjd(const std::vector<double>& rjds,
                                              double r = 1.0) {
    std::vector<IterationRecord> records;
    for (std::size_t i = 0; i < rjds.size(); ++i) {
        IterationRecord rec;
        rec.iter = static_cast<long>(i);
        rec.r = r;
        rec.jd = rjds[i] * r;
        rec.rjd = rjds[i];
        records.push_back(rec);
    }
    return records;
}

}  // namespace

TEST_CASE("summarize boundary semantics") {
    const auto summary = summarize(records_from_rjd({1.0, 1.0, 1.0}));
    CHECK(summary.geometric_mean_rjd == doctest::Approx(1.0));
    CHECK(summary.frac_rjd_above_1 == 0.0);  // strictly greater only
    CHECK(summary.num_jumps == 3);
    CHECK(summary.verdict == Verdict::rerun_with_doubled_steps);
}

TEST_CASE("summarize arithmetic") {
    const auto summary = summarize(records_from_rjd({0.5, 2.0, 2.0}));
    CHECK(summary.geometric_mean_rjd ==
          doctest::Approx(std::pow(2.0, 1.0 / 3.0)));
    CHECK(summary.frac_rjd_above_1 == doctest::Approx(2.0 / 3.0));
    CHECK(summary.verdict == Verdict::trustworthy);
    // esjd is the mean of jd^2 = (0.25 + 4 + 4) / 3.
    CHECK(summary.esjd == doctest::Approx((0.25 + 4.0 + 4.0) / 3.0));
}

TEST_CASE("summarize clamps zero jumps without dropping them") {
    auto records = records_from_rjd({2.0, 2.0, 2.0, 2.0});
    records[1].jd = 0.0;
    records[1].rjd = 0.0;
    const auto summary = summarize(records);
    CHECK(summary.num_jumps == 4);
    CHECK(summary.num_zero_jumps == 1);
    CHECK(summary.frac_rjd_above_1 == doctest::Approx(0.75));
    // ln(DBL_MIN) drags the geometric mean far below 1.
    CHECK(summary.geometric_mean_rjd < 1e-30);
    CHECK(summary.verdict == Verdict::rerun_with_doubled_steps);
}

TEST_CASE("summarize rejects empty and radius-free input") {
    CHECK_THROWS_AS(summarize({}), PreconditionError);
    auto records = records_from_rjd({1.0, 2.0});
    records[0].r = records[1].r = 0.0;
    CHECK_THROWS_AS(summarize(records), PreconditionError);
}

TEST_CASE("summary is invariant under a common distance rescaling") {
    const std::vector<double> rjds{0.3, 0.9, 1.4, 2.5, 7.0};
    auto scaled = records_from_rjd(rjds, 1.0);
    for (auto& rec : scaled) {
        rec.r *= 42.0;
        rec.jd *= 42.0;
    }
    const auto a = summarize(records_from_rjd(rjds, 1.0));
    const auto b = summarize(scaled);
    CHECK(a.geometric_mean_rjd == doctest::Approx(b.geometric_mean_rjd));
    CHECK(a.frac_rjd_above_1 == b.frac_rjd_above_1);
    CHECK(a.num_jumps == b.num_jumps);
    CHECK(a.verdict == b.verdict);
    // esjd is intentionally in raw jump-distance units and scales.
    CHECK(b.esjd == doctest::Approx(42.0 * 42.0 * a.esjd));
}

TEST_CASE("geometric mean never exceeds the arithmetic mean") {
    Rng rng(300);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> rjds;
        double arith = 0.0;
        const int n = 2 + static_cast<int>(rng.uniform_index(40));
        for (int i = 0; i < n; ++i) {
            rjds.push_back(std::exp(rng.uniform(-3.0, 3.0)));
            arith += rjds.back();
        }
        arith /= n;
        const auto summary = summarize(records_from_rjd(rjds));
        CHECK(summary.geometric_mean_rjd <= arith * (1.0 + 1e-12));
    }
}

TEST_CASE("rjd histogram") {
    SUBCASE("point mass occupies a single bin") {
        const auto hist = rjd_histogram(records_from_rjd({1.0, 1.0, 1.0}), 10);
        long occupied = 0;
        for (const auto& bin : hist.bins)
            if (bin.count > 0) {
                ++occupied;
                CHECK(bin.lo <= 1.0);
                CHECK(bin.hi > 1.0);
                CHECK(bin.count == 3);
            }
        CHECK(occupied == 1);
        CHECK(hist.total == 3);
    }

    SUBCASE("conservation and contiguous edges") {
        Rng rng(301);
        std::vector<double> rjds;
        for (int i = 0; i < 500; ++i) rjds.push_back(std::exp(rng.uniform(-2, 3)));
        const auto hist = rjd_histogram(records_from_rjd(rjds), 5);
        long total = 0;
        for (std::size_t b = 0; b < hist.bins.size(); ++b) {
            total += hist.bins[b].count;
            if (b > 0)
                CHECK(hist.bins[b].lo ==
                      doctest::Approx(hist.bins[b - 1].hi).epsilon(1e-12));
        }
        CHECK(total == 500);
        CHECK(hist.total == 500);
    }

    SUBCASE("bins_per_decade must be positive") {
        CHECK_THROWS_AS(rjd_histogram(records_from_rjd({1.0}), 0),
                        PreconditionError);
    }
}

TEST_CASE("insertion order KS test") {
    SUBCASE("calibration under the null") {
        Rng rng(303);
        const int num_live = 1000;
        int passes = 0;
        for (int repeat = 0; repeat < 100; ++repeat) {
            std::vector<IterationRecord> records(10000);
            for (auto& rec : records)
                rec.insertion_rank = static_cast<int>(
                    rng.uniform_index(static_cast<std::uint64_t>(num_live)));
            if (insertion_order_ks(records, num_live).p_value > 0.01) ++passes;
        }
        CHECK(passes >= 95);
    }

    SUBCASE("all-zero ranks are rejected decisively") {
        std::vector<IterationRecord> records(2000);
        for (auto& rec : records) rec.insertion_rank = 0;
        CHECK(insertion_order_ks(records, 400).p_value < 1e-6);
    }

    SUBCASE("preconditions") {
        CHECK_THROWS_AS(insertion_order_ks({}, 400), PreconditionError);
        std::vector<IterationRecord> one(1);
        CHECK_THROWS_AS(insertion_order_ks(one, 1), PreconditionError);
    }
}

TEST_CASE("ks p-value endpoints") {
    CHECK(ks_p_value(0.0, 100) == doctest::Approx(1.0));
    CHECK(ks_p_value(0.9, 10000) < 1e-12);
    // lambda = 1.0 gives the canonical Kolmogorov value.
    CHECK(ks_p_value(0.01, 10000) == doctest::Approx(0.26999967).epsilon(1e-4));
}

TEST_CASE("decision rule") {
    DiagnosticSummary good;
    good.verdict = Verdict::trustworthy;
    good.geometric_mean_rjd = 1.5;
    DiagnosticSummary bad;
    bad.verdict = Verdict::rerun_with_doubled_steps;
    bad.geometric_mean_rjd = 0.8;

    CHECK(decision_rule(good, std::nullopt, 0.0, 0.1) ==
          Recommendation::accept);
    CHECK(decision_rule(bad, std::nullopt, 0.0, 0.1) ==
          Recommendation::rerun_doubled);

    PreviousRun prev;
    prev.summary = bad;
    prev.logz = 0.0;
    prev.logz_err = 0.1;

    // 5 sigma evidence shift: keep doubling.
    CHECK(decision_rule(bad, prev, 5.0 * std::sqrt(0.02), 0.1) ==
          Recommendation::rerun_doubled);
    // Stable evidence and stable RJD distribution: accept with caution.
    CHECK(decision_rule(bad, prev, 0.01, 0.1) ==
          Recommendation::accept_with_caution);
    // Stable evidence but a shifted RJD distribution: keep doubling.
    DiagnosticSummary shifted = bad;
    shifted.geometric_mean_rjd = 1.0;
    CHECK(decision_rule(shifted, prev, 0.01, 0.1) ==
          Recommendation::rerun_doubled);
}
