#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace netmon {

struct WeibullFit {
  double k = 1.0;
  double lambda = 1.0;
  double log_likelihood = 0.0;
  std::uint64_t n_samples = 0;
  double ks_statistic = 0.0;
};

struct PowerLawFit {
  double alpha = 2.0;
  std::uint64_t xmin = 1;
  double log_likelihood = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t n_tail = 0;
};

/// Discrete exponential (geometric) law on x >= xmin, used as the
/// light-tailed alternative when judging a power-law tail.
struct ExponentialFit {
  double rate = 1.0;
  std::uint64_t xmin = 1;
  double log_likelihood = 0.0;
  std::uint64_t n_tail = 0;
};

double weibull_pdf(double x, double k, double lambda);
double weibull_cdf(double x, double k, double lambda);
/// Inverse CDF for p in [0, 1).
double weibull_quantile(double p, double k, double lambda);

/// Left side of the shape equation; its root in k is the MLE shape.
double weibull_shape_residual(std::span<const double> samples, double k);

/// Maximum-likelihood Weibull fit.
///
/// The shape is the root of the profile score, found with damped Newton steps
/// from k0 = 1.2 / sd(ln x) and guarded by a bisection bracket [1e-3, 1e3];
/// the scale follows in closed form. Requires at least 10 strictly positive
/// samples (InputError otherwise). A sample without a finite root, such as a
/// constant one, raises ConvergenceError carrying the last iterate.
WeibullFit fit_weibull_mle(std::span<const double> samples, double tol = 1e-9, int max_iter = 200);

double weibull_log_likelihood(std::span<const double> samples, double k, double lambda);

/// Hurwitz zeta sum_{n>=0} (n + q)^-s for s > 1, q > 0.
double hurwitz_zeta(double s, double q);

/// Discrete power-law fit with fixed lower cutoff, using the continuous
/// approximation alpha = 1 + n / sum ln(x / (xmin - 1/2)). The reported
/// log-likelihood is the exact discrete one, -n ln zeta(alpha, xmin) - alpha sum ln x.
PowerLawFit fit_powerlaw_mle(std::span<const std::uint64_t> samples, std::uint64_t xmin = 1);

/// P(X <= x) of the discrete power law.
double powerlaw_cdf(double x, double alpha, std::uint64_t xmin);

ExponentialFit fit_exponential_tail(std::span<const std::uint64_t> samples, std::uint64_t xmin = 1);

/// Log-likelihood ratio ln L_powerlaw - ln L_exponential over the tail x >= xmin.
/// Positive values favour the power law.
double powerlaw_vs_exponential_llr(std::span<const std::uint64_t> samples, std::uint64_t xmin = 1);

/// Kolmogorov distance for a continuous CDF:
/// max_i max(|i/n - F(x_(i))|, |(i-1)/n - F(x_(i))|) over the sorted sample.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Evenly spaced (x, pdf) pairs on [0, x_max]; n_points >= 2.
std::vector<std::pair<double, double>> emit_pdf_points(const WeibullFit& fit, double x_max, int n_points);

}  // namespace netmon
