#include <doctest.h>

#include <cmath>

#include "nestdiag/diagnostics.hpp"
#include "nestdiag/problems.hpp"
#include "nestdiag/sampler.hpp"

using namespace nestdiag;

namespace {

ProblemDefinition flat_problem(int d) {
    ProblemDefinition problem;
    problem.dim = d;
    problem.name = "flat";
    problem.prior_transform = [](const Eigen::VectorXd& u) { return u; };
    problem.log_likelihood = [](const Eigen::VectorXd&) { return 0.0; };
    return problem;
}

double uniform_ks_statistic(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d_stat = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        d_stat = std::max({d_stat, samples[i] - i / n, (i + 1) / n - samples[i]});
    return d_stat;
}

}  // namespace

TEST_CASE("slice step on a flat likelihood is uniform") {
    const auto problem = flat_problem(1);
    Rng rng(101);
    UnitPoint current = evaluate(problem, Eigen::VectorXd::Constant(1, 0.3));

    const int n = 10000;
    std::vector<double> samples;
    samples.reserve(n);
    for (int i = 0; i < n; ++i) {
        current = slice_step(problem, current, kNegInf, 0, rng);
        samples.push_back(current.u[0]);
    }
    const double d_stat = uniform_ks_statistic(samples);
    CHECK(ks_p_value(d_stat, n) > 0.01);
}

TEST_CASE("slice step respects a box constraint exactly") {
    ProblemDefinition problem;
    problem.dim = 2;
    problem.name = "band";
    problem.prior_transform = [](const Eigen::VectorXd& u) { return u; };
    problem.log_likelihood = [](const Eigen::VectorXd& u) {
        return (u[0] >= 0.4 && u[0] <= 0.6) ? 0.0 : -100.0;
    };

    Rng rng(103);
    UnitPoint current = evaluate(problem, Eigen::VectorXd::Constant(2, 0.5));
    for (int i = 0; i < 1000; ++i) {
        current = slice_step(problem, current, -50.0, 0, rng);
        CHECK(current.u[0] >= 0.4);
        CHECK(current.u[0] <= 0.6);
        CHECK(current.u[1] == 0.5);
        CHECK(current.logl > -50.0);
    }
}

TEST_CASE("slice chain reproduces a standard normal prior") {
    ProblemDefinition problem;
    problem.dim = 1;
    problem.name = "normal-prior";
    problem.prior_transform = [](const Eigen::VectorXd& u) {
        Eigen::VectorXd theta(1);
        theta[0] = problems::inverse_normal_cdf(u[0]);
        return theta;
    };
    problem.log_likelihood = [](const Eigen::VectorXd& theta) {
        return -0.5 * theta[0] * theta[0];
    };

    Rng rng(107);
    UnitPoint current = evaluate(problem, Eigen::VectorXd::Constant(1, 0.5));
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        current = slice_step(problem, current, kNegInf, 0, rng);
        sum += problems::inverse_normal_cdf(current.u[0]);
    }
    CHECK(std::abs(sum / n) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("slice step precondition checks") {
    const auto problem = flat_problem(2);
    Rng rng(109);
    const UnitPoint point = evaluate(problem, Eigen::VectorXd::Constant(2, 0.5));
    CHECK_THROWS_AS(slice_step(problem, point, 1.0, 0, rng),
                    PreconditionError);  // constraint not satisfied
    CHECK_THROWS_AS(slice_step(problem, point, kNegInf, 2, rng),
                    PreconditionError);  // axis out of range
}

TEST_CASE("stuck shrinkage raises a stuck-walk error") {
    // A likelihood spike exactly at the boundary start point: every
    // proposal is rejected and the interval collapses.
    ProblemDefinition problem;
    problem.dim = 1;
    problem.name = "spike";
    problem.prior_transform = [](const Eigen::VectorXd& u) { return u; };
    problem.log_likelihood = [](const Eigen::VectorXd& u) {
        return u[0] == 0.0 ? 0.0 : -1.0;
    };
    Rng rng(113);
    const UnitPoint start = evaluate(problem, Eigen::VectorXd::Zero(1));
    CHECK_THROWS_AS(slice_step(problem, start, -0.5, 0, rng), StuckWalkError);
}

TEST_CASE("random walk structure") {
    const auto problem = flat_problem(3);
    Rng rng(127);
    const UnitPoint start = evaluate(problem, sample_unit_cube(rng, 3));

    SUBCASE("single step changes at most one axis") {
        const auto walk = random_walk(problem, start, kNegInf, 1, rng);
        int changed = 0;
        for (int k = 0; k < 3; ++k)
            if (walk.end.u[k] != start.u[k]) ++changed;
        CHECK(changed <= 1);
        CHECK(walk.steps_taken == 1);
        CHECK(walk.likelihood_calls >= walk.steps_taken);
    }

    SUBCASE("zero steps rejected") {
        CHECK_THROWS_AS(random_walk(problem, start, kNegInf, 0, rng),
                        PreconditionError);
    }
}

TEST_CASE("long walks decorrelate from the start") {
    const auto problem = flat_problem(3);
    Rng rng(131);
    const int walks = 1000;
    const int steps = 30;  // 10 * d
    Eigen::MatrixXd starts(walks, 3), ends(walks, 3);
    for (int i = 0; i < walks; ++i) {
        const UnitPoint start = evaluate(problem, sample_unit_cube(rng, 3));
        const auto walk = random_walk(problem, start, kNegInf, steps, rng);
        CHECK(walk.end.logl > kNegInf);
        CHECK(walk.steps_taken == steps);
        CHECK(walk.likelihood_calls >= walk.steps_taken);
        starts.row(i) = start.u.transpose();
        ends.row(i) = walk.end.u.transpose();
    }
    for (int k = 0; k < 3; ++k) {
        const auto a = starts.col(k).array() - starts.col(k).mean();
        const auto b = ends.col(k).array() - ends.col(k).mean();
        const double corr =
            (a * b).sum() /
            std::sqrt((a * a).sum() * (b * b).sum());
        CHECK(std::abs(corr) < 0.1);
    }
}
