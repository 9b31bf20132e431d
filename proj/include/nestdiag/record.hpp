#pragma once

namespace nestdiag {

/// One dead point of a nested sampling run, with the walk diagnostics of
/// the replacement drawn at the same iteration. logw = logl + logv exactly,
/// rjd = jd / r whenever r > 0.
struct IterationRecord {
    long iter = 0;
    double logl = 0.0;
    double logv = 0.0;
    double logw = 0.0;
    int insertion_rank = 0;
    double jd = 0.0;
    double r = 0.0;
    double rjd = 0.0;
};

}  // namespace nestdiag
