#include "nestdiag/sampler.hpp"

#include <algorithm>
#include <string>

namespace nestdiag {

namespace {
constexpr double kInitialWidth = 1.0;
constexpr double kMinSliceWidth = 1e-30;
}  // namespace

UnitPoint slice_step(const ProblemDefinition& problem, const UnitPoint& current,
                     double threshold, int axis, Rng& rng,
                     long* likelihood_calls) {
    if (!(current.logl > threshold))
        throw PreconditionError(
            "slice_step: current point does not satisfy the constraint");
    if (axis < 0 || axis >= problem.dim)
        throw PreconditionError("slice_step: axis " + std::to_string(axis) +
                                " out of range");

    long calls = 0;
    Eigen::VectorXd probe = current.u;
    const auto logl_at = [&](double x) {
        probe[axis] = x;
        ++calls;
        return evaluate(problem, probe).logl;
    };

    const double x0 = current.u[axis];
    const double offset = rng.uniform();
    double lo = std::max(0.0, x0 - offset * kInitialWidth);
    double hi = std::min(1.0, x0 + (1.0 - offset) * kInitialWidth);

    // Step out until both ends are below the threshold or at the boundary.
    while (lo > 0.0 && logl_at(lo) > threshold)
        lo = std::max(0.0, lo - kInitialWidth);
    while (hi < 1.0 && logl_at(hi) > threshold)
        hi = std::min(1.0, hi + kInitialWidth);

    while (true) {
        const double x = lo + rng.uniform() * (hi - lo);
        const double logl = logl_at(x);
        if (logl > threshold) {
            UnitPoint next = current;
            next.u[axis] = x;
            next.logl = logl;
            if (likelihood_calls) *likelihood_calls += calls;
            return next;
        }
        if (x < x0)
            lo = x;
        else if (x > x0)
            hi = x;
        else
            throw StuckWalkError(
                "slice_step: shrinkage collapsed onto the start point on axis " +
                std::to_string(axis));
        if (hi - lo < kMinSliceWidth)
            throw StuckWalkError("slice_step: interval width underflow on axis " +
                                 std::to_string(axis));
    }
}

WalkResult random_walk(const ProblemDefinition& problem, const UnitPoint& start,
                       double threshold, int num_steps, Rng& rng) {
    if (num_steps < 1)
        throw PreconditionError("random_walk: num_steps must be >= 1");
    if (!(start.logl > threshold))
        throw PreconditionError(
            "random_walk: start point does not satisfy the constraint");

    WalkResult result;
    result.start = start;
    result.end = start;
    for (int step = 0; step < num_steps; ++step) {
        const int axis = static_cast<int>(
            rng.uniform_index(static_cast<std::uint64_t>(problem.dim)));
        result.end = slice_step(problem, result.end, threshold, axis, rng,
                                &result.likelihood_calls);
        ++result.steps_taken;
    }
    return result;
}

}  // namespace nestdiag
