#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nestdiag/rng.hpp"

namespace nestdiag {

class Error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Violated operation precondition (bad arguments, invalid config).
class PreconditionError : public Error {
    using Error::Error;
};

/// Covariance of a point set could not be factorized even after
/// regularization.
class DegenerateGeometryError : public Error {
    using Error::Error;
};

/// Slice shrinkage collapsed without finding an acceptable point.
class StuckWalkError : public Error {
    using Error::Error;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Position in the unit hypercube with its cached log-likelihood.
/// logl is always the problem's log-likelihood at the prior transform of u.
struct UnitPoint {
    Eigen::VectorXd u;
    double logl = kNegInf;
};

/// A d-dimensional inference problem: prior expressed as a transform from
/// the unit cube to physical parameters, plus a log-likelihood over those
/// parameters. log_likelihood must never return NaN; -inf encodes zero
/// likelihood.
struct ProblemDefinition {
    int dim = 0;
    std::string name;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> prior_transform;
    std::function<double(const Eigen::VectorXd&)> log_likelihood;
    std::optional<double> true_logz;
};

struct RunConfig {
    int num_live = 400;
    int num_steps = 1;
    double termination_frac = 0.01;
    int bootstrap_rounds = 30;
    std::uint64_t seed = 1;
    /// Iterations between radius recomputations; 0 picks a default from the
    /// problem size (every iteration while K*d <= 1e4, else ceil(K/10)).
    int radius_update_interval = 0;
    /// Hard cap on iterations, 0 = none. Intended for calibration
    /// experiments that control the loop length directly.
    long max_iterations = 0;

    void validate(int dim) const {
        if (num_live < 2 * dim)
            throw PreconditionError("num_live must be at least 2*dim (got " +
                                    std::to_string(num_live) + " for dim " +
                                    std::to_string(dim) + ")");
        if (num_steps < 1) throw PreconditionError("num_steps must be >= 1");
        if (!(termination_frac > 0.0 && termination_frac < 1.0))
            throw PreconditionError("termination_frac must be in (0, 1)");
        if (bootstrap_rounds < 1)
            throw PreconditionError("bootstrap_rounds must be >= 1");
        if (radius_update_interval < 0)
            throw PreconditionError("radius_update_interval must be >= 0");
    }

    int effective_radius_interval(int dim) const {
        if (radius_update_interval > 0) return radius_update_interval;
        if (static_cast<long>(num_live) * dim <= 10000) return 1;
        return (num_live + 9) / 10;
    }
};

/// Evaluate the problem at a unit-cube position. Every coordinate must lie
/// in [0, 1]; a NaN or +inf log-likelihood is a model bug and throws.
UnitPoint evaluate(const ProblemDefinition& problem, const Eigen::VectorXd& u);

/// d i.i.d. uniform coordinates.
Eigen::VectorXd sample_unit_cube(Rng& rng, int d);

/// log(exp(a) + exp(b)) without overflow; -inf identities hold.
inline double log_sum_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(const std::vector<double>& vals);

}  // namespace nestdiag
