#include "nestdiag/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nestdiag/geometry.hpp"

namespace nestdiag {

int insertion_rank(std::span<const double> sorted_logls, double new_logl) {
    if (std::isnan(new_logl))
        throw PreconditionError("insertion_rank: new_logl is NaN");
    const auto it =
        std::lower_bound(sorted_logls.begin(), sorted_logls.end(), new_logl);
    return static_cast<int>(it - sorted_logls.begin());
}

double logz_uncertainty(const std::vector<IterationRecord>& records,
                        int num_live) {
    if (records.empty())
        throw PreconditionError("logz_uncertainty: no records");
    double total = kNegInf;
    for (const auto& rec : records) total = log_sum_exp(total, rec.logw);
    if (total == kNegInf) return 0.0;
    double information = 0.0;
    for (const auto& rec : records) {
        const double p = std::exp(rec.logw - total);
        if (p > 0.0) information += p * rec.logl;
    }
    information -= total;
    return std::sqrt(std::max(information, 0.0) /
                     static_cast<double>(num_live));
}

RunResult run(const ProblemDefinition& problem, const RunConfig& config) {
    return run(problem, config, AxisSliceSampler{});
}

RunResult run(const ProblemDefinition& problem, const RunConfig& config,
              const StepSampler& sampler, const IterationObserver& observer) {
    config.validate(problem.dim);
    const auto t_start = std::chrono::steady_clock::now();

    const int num_live = config.num_live;
    const double log_delta = -std::log(static_cast<double>(num_live));
    const double log_shrink = std::log1p(-1.0 / num_live);
    const double log_term_frac = std::log(config.termination_frac);
    const int radius_interval = config.effective_radius_interval(problem.dim);

    Rng rng_init = Rng(config.seed).substream(1);
    Rng rng_walk = Rng(config.seed).substream(2);
    Rng rng_radius = Rng(config.seed).substream(3);

    std::vector<UnitPoint> live;
    live.reserve(static_cast<std::size_t>(num_live));
    for (int i = 0; i < num_live; ++i)
        live.push_back(evaluate(problem, sample_unit_cube(rng_init, problem.dim)));

    RunResult result;
    result.num_live = num_live;
    result.num_steps = config.num_steps;
    result.problem_name = problem.name;
    result.seed = config.seed;
    result.radius_update_interval = radius_interval;

    MLFriendsRadius radius;
    WhitenedSpace space;
    std::vector<double> sorted_logls(static_cast<std::size_t>(num_live) - 1);
    std::vector<std::size_t> eligible;
    eligible.reserve(static_cast<std::size_t>(num_live));

    double logz_dead = kNegInf;
    for (long iter = 0;; ++iter) {
        if (config.max_iterations > 0 && iter >= config.max_iterations) break;
        if (observer) observer(iter, std::span<const UnitPoint>(live));

        std::size_t worst = 0;
        double max_logl = live[0].logl;
        for (std::size_t i = 1; i < live.size(); ++i) {
            if (live[i].logl < live[worst].logl) worst = i;
            max_logl = std::max(max_logl, live[i].logl);
        }
        const double threshold = live[worst].logl;
        // A full likelihood plateau cannot shrink further; close the run on
        // the remainder.
        if (threshold >= max_logl) break;

        // Prior volume still enclosed by the current threshold.
        const double logv_remaining = static_cast<double>(iter) * log_shrink;
        if (logz_dead != kNegInf &&
            max_logl + logv_remaining - logz_dead < log_term_frac)
            break;

        if (iter % radius_interval == 0) {
            try {
                std::tie(radius, space) = compute_reference_radius(
                    stack_points(live), config.bootstrap_rounds, rng_radius);
            } catch (const DegenerateGeometryError& e) {
                throw DegenerateGeometryError(std::string(e.what()) +
                                              " (NS iteration " +
                                              std::to_string(iter) + ")");
            }
        }

        IterationRecord rec;
        rec.iter = iter;
        rec.logl = threshold;
        rec.logv = log_delta + static_cast<double>(iter) * log_shrink;
        rec.logw = rec.logl + rec.logv;
        logz_dead = log_sum_exp(logz_dead, rec.logw);

        // Walk start: uniform among the surviving live points. Points tied
        // with the threshold are ineligible (the walk requires a strict
        // improvement); for continuous likelihoods this is all K-1 survivors.
        eligible.clear();
        for (std::size_t i = 0; i < live.size(); ++i)
            if (i != worst && live[i].logl > threshold) eligible.push_back(i);
        const std::size_t start =
            eligible[rng_walk.uniform_index(eligible.size())];

        WalkResult walk;
        try {
            walk = sampler.advance(problem, live[start], threshold,
                                   config.num_steps, rng_walk);
        } catch (const StuckWalkError& e) {
            throw StuckWalkError(std::string(e.what()) + " (NS iteration " +
                                 std::to_string(iter) + ")");
        }

        rec.jd = mahalanobis_distance(space, walk.start.u, walk.end.u);
        rec.r = radius.r;
        rec.rjd = radius.r > 0.0 ? rec.jd / radius.r : 0.0;

        std::size_t pos = 0;
        for (std::size_t i = 0; i < live.size(); ++i)
            if (i != worst) sorted_logls[pos++] = live[i].logl;
        std::sort(sorted_logls.begin(), sorted_logls.end());
        rec.insertion_rank = insertion_rank(sorted_logls, walk.end.logl);

        live[worst] = walk.end;
        result.records.push_back(rec);
    }

    // Remainder: the K final live points share the leftover volume equally.
    const double logv_final =
        static_cast<double>(result.records.size()) * log_shrink;
    double remainder = kNegInf;
    const double log_live_share = logv_final - std::log(static_cast<double>(num_live));
    for (const auto& point : live)
        remainder = log_sum_exp(remainder, point.logl + log_live_share);
    result.logz_remainder = remainder;
    result.logz = log_sum_exp(logz_dead, remainder);
    result.logz_err = result.records.empty()
                          ? 0.0
                          : logz_uncertainty(result.records, num_live);
    if (!result.records.empty()) result.summary = summarize(result.records);

    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return result;
}

}  // namespace nestdiag
