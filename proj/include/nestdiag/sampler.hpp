#pragma once

#include "nestdiag/core.hpp"

namespace nestdiag {

/// Outcome of one likelihood-constrained random walk.
struct WalkResult {
    UnitPoint start;
    UnitPoint end;
    int steps_taken = 0;
    long likelihood_calls = 0;
};

/// One slice-sampling update along a single coordinate axis.
///
/// The slice is {x : logl(x) > threshold} restricted to [0, 1]. The initial
/// interval of width 1 is placed uniformly at random around the current
/// coordinate, stepped out until both ends fall below the threshold or hit
/// the cube boundary, then sampled with shrinkage on rejection.
UnitPoint slice_step(const ProblemDefinition& problem, const UnitPoint& current,
                     double threshold, int axis, Rng& rng,
                     long* likelihood_calls = nullptr);

/// M slice steps, each along an axis drawn uniformly at random.
WalkResult random_walk(const ProblemDefinition& problem, const UnitPoint& start,
                       double threshold, int num_steps, Rng& rng);

/// Strategy for advancing a live point under a likelihood constraint.
/// The default is the axis slice walk; calibration tests substitute exact
/// samplers.
class StepSampler {
public:
    virtual ~StepSampler() = default;
    virtual WalkResult advance(const ProblemDefinition& problem,
                               const UnitPoint& start, double threshold,
                               int num_steps, Rng& rng) const = 0;
};

class AxisSliceSampler final : public StepSampler {
public:
    WalkResult advance(const ProblemDefinition& problem, const UnitPoint& start,
                       double threshold, int num_steps,
                       Rng& rng) const override {
        return random_walk(problem, start, threshold, num_steps, rng);
    }
};

}  // namespace nestdiag
