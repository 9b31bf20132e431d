#pragma once

#include <string>
#include <vector>

#include "nestdiag/core.hpp"

namespace nestdiag {
namespace problems {

/// Product of independent Gaussians with per-dimension widths spanning
/// 1e-1 down to 1e-9 and means placed off-center; standard uniform priors.
/// The evidence is 1 up to prior truncation.
ProblemDefinition gaussian(int d);

/// Sharply truncated Gaussian: a +100 log-likelihood bonus inside the
/// |theta_i| < 0.1 box, on a centered unit-cube prior.
ProblemDefinition box(int d);

/// Rosenbrock valley, uniform priors on [-10, 10]^d.
ProblemDefinition rosenbrock(int d);

/// Two-dimensional eggbox, uniform priors on [0, 10*pi]^2.
ProblemDefinition eggbox();

/// Beaujean & Caldwell multi-modal mixture of LogGamma and Normal
/// components, standard uniform priors; evidence 1.
ProblemDefinition loggamma(int d);

/// Correlated funnel: standard normal prior on ln sigma^2, uniform priors
/// on the d-1 location parameters, Gaussian likelihood with correlation
/// 0.95 between all pairs.
ProblemDefinition funnel(int d);

/// Eight-schools treatment-effect inference, non-centered
/// parameterization: 8 standardized effects, mean mu ~ Normal(0, 5),
/// scale tau ~ half-Cauchy(0, 5).
ProblemDefinition eight_schools();

/// Resolve a CLI problem name such as "gauss-4", "rosenbrock-20",
/// "eggbox" or "eightschools". Throws PreconditionError for unknown names.
ProblemDefinition by_name(const std::string& name);

/// Canonical benchmark names accepted by the CLI.
std::vector<std::string> catalog_names();

/// Inverse standard normal CDF, clamped to finite values at p = 0 and 1.
double inverse_normal_cdf(double p);

/// Shape-1 log-gamma log-density with location and scale.
double log_gamma_logpdf(double x, double loc, double scale);

/// Normal log-density.
double normal_logpdf(double x, double loc, double scale);

}  // namespace problems
}  // namespace nestdiag
