#include "nestdiag/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nestdiag {
namespace problems {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // ln(sqrt(2*pi))

Eigen::VectorXd identity_transform(const Eigen::VectorXd& u) { return u; }

}  // namespace

double inverse_normal_cdf(double p) {
    // Acklam's rational approximation refined with one Halley step.
    p = std::clamp(p, 1e-300, 1.0 - 1e-16);
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
            q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement against the exact CDF.
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double log_gamma_logpdf(double x, double loc, double scale) {
    const double z = (x - loc) / scale;
    return z - std::exp(z) - std::log(scale);
}

double normal_logpdf(double x, double loc, double scale) {
    const double z = (x - loc) / scale;
    return -0.5 * z * z - std::log(scale) - kLogSqrt2Pi;
}

ProblemDefinition gaussian(int d) {
    if (d < 1) throw PreconditionError("gaussian: d must be >= 1");
    Eigen::VectorXd sigma(d), mu(d);
    for (int i = 0; i < d; ++i) {
        // Log-uniform spacing anchored at 1e-1 (i=1) and, for the d=4
        // benchmark, 1e-9 (i=d).
        const double frac = d > 1 ? static_cast<double>(i) / (d - 1) : 0.0;
        sigma[i] = 0.1 * std::pow(10.0, (-9.0 + std::sqrt(static_cast<double>(d)) / 2.0) * frac);
        mu[i] = 0.5 + 0.5 * (1.0 - 5.0 * sigma[i]) *
                          std::sin(static_cast<double>(i) / (2.0 * d));
    }
    ProblemDefinition problem;
    problem.dim = d;
    problem.name = "gauss-" + std::to_string(d);
    problem.true_logz = 0.0;
    problem.prior_transform = identity_transform;
    problem.log_likelihood = [sigma, mu](const Eigen::VectorXd& theta) {
        double logl = 0.0;
        for (Eigen::Index i = 0; i < theta.size(); ++i)
            logl += normal_logpdf(theta[i], mu[i], sigma[i]);
        return logl;
    };
    return problem;
}

ProblemDefinition box(int d) {
    if (d < 1) throw PreconditionError("box: d must be >= 1");
    ProblemDefinition problem;
    problem.dim = d;
    problem.name = "box-" + std::to_string(d);
    problem.prior_transform = [](const Eigen::VectorXd& u) {
        return Eigen::VectorXd(u.array() - 0.5);
    };
    problem.log_likelihood = [](const Eigen::VectorXd& theta) {
        const double quad = (theta / 0.1).squaredNorm();
        const double worst = theta.cwiseAbs().maxCoeff();
        return -0.5 * quad + (worst < 0.1 ? 100.0 : 0.0);
    };
    return problem;
}

ProblemDefinition rosenbrock(int d) {
    if (d < 2) throw PreconditionError("rosenbrock: d must be >= 2");
    ProblemDefinition problem;
    problem.dim = d;
    problem.name = "rosenbrock-" + std::to_string(d);
    problem.prior_transform = [](const Eigen::VectorXd& u) {
        return Eigen::VectorXd(20.0 * u.array() - 10.0);
    };
    problem.log_likelihood = [](const Eigen::VectorXd& theta) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i + 1 < theta.size(); ++i) {
            const double a = theta[i + 1] - theta[i] * theta[i];
            const double b = 1.0 - theta[i];
            sum += 100.0 * a * a + b * b;
        }
        return -2.0 * sum;
    };
    return problem;
}

ProblemDefinition eggbox() {
    ProblemDefinition problem;
    problem.dim = 2;
    problem.name = "eggbox";
    problem.prior_transform = [](const Eigen::VectorXd& u) {
        return Eigen::VectorXd(10.0 * kPi * u.array());
    };
    problem.log_likelihood = [](const Eigen::VectorXd& theta) {
        const double base =
            2.0 + std::cos(0.5 * theta[0]) * std::cos(0.5 * theta[1]);
        return std::pow(base, 5.0);
    };
    return problem;
}

ProblemDefinition loggamma(int d) {
    if (d < 2) throw PreconditionError("loggamma: d must be >= 2");
    ProblemDefinition problem;
    problem.dim = d;
    problem.name = "loggamma-" + std::to_string(d);
    problem.true_logz = 0.0;
    problem.prior_transform = identity_transform;
    problem.log_likelihood = [d](const Eigen::VectorXd& x) {
        constexpr double third = 1.0 / 3.0;
        constexpr double two_thirds = 2.0 / 3.0;
        constexpr double s = 1.0 / 30.0;
        constexpr double ln_half = -0.69314718055994530942;
        double logl =
            ln_half + log_sum_exp(log_gamma_logpdf(x[0], third, s),
                                  log_gamma_logpdf(x[0], two_thirds, s));
        logl += ln_half + log_sum_exp(normal_logpdf(x[1], third, s),
                                      normal_logpdf(x[1], two_thirds, s));
        for (int i = 3; i <= d; ++i) {
            if (2 * i <= d + 2)
                logl += log_gamma_logpdf(x[i - 1], two_thirds, s);
            else
                logl += normal_logpdf(x[i - 1], two_thirds, s);
        }
        return logl;
    };
    return problem;
}

ProblemDefinition funnel(int d) {
    if (d < 2) throw PreconditionError("funnel: d must be >= 2");
    const int m = d - 1;
    const double gamma = 0.95;
    // M = (1-gamma) I + gamma 11^T; positive definite for gamma in (0, 1).
    const double diag_term = 1.0 - gamma;
    const double ones_term = 1.0 + (m - 1) * gamma;
    const double logdet_m =
        (m - 1) * std::log(diag_term) + std::log(ones_term);

    ProblemDefinition problem;
    problem.dim = d;
    problem.name = "funnel-" + std::to_string(d);
    problem.prior_transform = [](const Eigen::VectorXd& u) {
        Eigen::VectorXd theta(u.size());
        theta[0] = inverse_normal_cdf(u[0]);
        for (Eigen::Index i = 1; i < u.size(); ++i)
            theta[i] = 20.0 * u[i] - 10.0;
        return theta;
    };
    problem.log_likelihood = [m, gamma, diag_term, ones_term,
                              logdet_m](const Eigen::VectorXd& theta) {
        const double sigma_sq = std::exp(theta[0]);
        const auto mu = theta.tail(m);
        const double sum = mu.sum();
        const double quad =
            (mu.squaredNorm() - gamma * sum * sum / ones_term) / diag_term;
        return -0.5 * quad / sigma_sq -
               0.5 * (m * std::log(2.0 * kPi * sigma_sq) + logdet_m);
    };
    return problem;
}

ProblemDefinition eight_schools() {
    static const Eigen::VectorXd y =
        (Eigen::VectorXd(8) << 28, 8, -3, 7, -1, 1, 18, 12).finished();
    static const Eigen::VectorXd sigma =
        (Eigen::VectorXd(8) << 15, 10, 16, 11, 9, 11, 10, 18).finished();

    ProblemDefinition problem;
    problem.dim = 10;
    problem.name = "eightschools";
    problem.prior_transform = [](const Eigen::VectorXd& u) {
        Eigen::VectorXd theta(10);
        for (int i = 0; i < 8; ++i) theta[i] = inverse_normal_cdf(u[i]);
        theta[8] = 5.0 * inverse_normal_cdf(u[8]);
        theta[9] = 5.0 * std::tan(0.5 * kPi * std::min(u[9], 1.0 - 1e-12));
        return theta;
    };
    problem.log_likelihood = [](const Eigen::VectorXd& theta) {
        const double mu = theta[8];
        const double tau = theta[9];
        double logl = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double resid = theta[i] * tau + mu - y[i];
            logl -= resid * resid / (2.0 * sigma[i] * sigma[i]);
        }
        return logl;
    };
    return problem;
}

ProblemDefinition by_name(const std::string& name) {
    const auto dash = name.rfind('-');
    std::string family = name;
    int d = -1;
    if (dash != std::string::npos) {
        const std::string tail = name.substr(dash + 1);
        if (!tail.empty() &&
            std::all_of(tail.begin(), tail.end(),
                        [](unsigned char ch) { return std::isdigit(ch); })) {
            family = name.substr(0, dash);
            d = std::stoi(tail);
        }
    }
    if (family == "gauss" && d > 0) return gaussian(d);
    if (family == "box" && d > 0) return box(d);
    if (family == "rosenbrock" && d > 0) return rosenbrock(d);
    if (family == "loggamma" && d > 0) return loggamma(d);
    if (family == "funnel" && d > 0) return funnel(d);
    if (name == "eggbox") return eggbox();
    if (name == "eightschools") return eight_schools();
    throw PreconditionError("unknown problem '" + name + "'");
}

std::vector<std::string> catalog_names() {
    return {"gauss-4",    "box-5",       "rosenbrock-2",
            "rosenbrock-20", "eggbox",   "loggamma-2",
            "loggamma-10",   "funnel-10", "eightschools"};
}

}  // namespace problems
}  // namespace nestdiag
