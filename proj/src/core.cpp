#include "nestdiag/core.hpp"

#include <algorithm>

namespace nestdiag {

UnitPoint evaluate(const ProblemDefinition& problem, const Eigen::VectorXd& u) {
    if (u.size() != problem.dim)
        throw PreconditionError("evaluate: point has dimension " +
                                std::to_string(u.size()) + ", problem has " +
                                std::to_string(problem.dim));
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (!(u[i] >= 0.0 && u[i] <= 1.0))
            throw PreconditionError("evaluate: coordinate " + std::to_string(i) +
                                    " = " + std::to_string(u[i]) +
                                    " outside the unit cube");
    }
    const Eigen::VectorXd theta = problem.prior_transform(u);
    const double logl = problem.log_likelihood(theta);
    if (std::isnan(logl))
        throw Error("log-likelihood returned NaN in problem '" + problem.name +
                    "'");
    if (logl == std::numeric_limits<double>::infinity())
        throw Error("log-likelihood returned +inf in problem '" + problem.name +
                    "'");
    return UnitPoint{u, logl};
}

Eigen::VectorXd sample_unit_cube(Rng& rng, int d) {
    if (d < 1) throw PreconditionError("sample_unit_cube: d must be >= 1");
    Eigen::VectorXd u(d);
    for (int i = 0; i < d; ++i) u[i] = rng.uniform();
    return u;
}

double log_sum_exp(const std::vector<double>& vals) {
    double hi = kNegInf;
    for (double v : vals) hi = std::max(hi, v);
    if (hi == kNegInf) return kNegInf;
    double acc = 0.0;
    for (double v : vals) acc += std::exp(v - hi);
    return hi + std::log(acc);
}

}  // namespace nestdiag
