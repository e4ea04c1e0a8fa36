#include "netmon/distfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "netmon/errors.hpp"

namespace netmon {

double weibull_pdf(double x, double k, double lambda) {
  if (x < 0.0) return 0.0;
  const double z = x / lambda;
  if (x == 0.0) {
    if (k < 1.0) return std::numeric_limits<double>::infinity();
    return k == 1.0 ? 1.0 / lambda : 0.0;
  }
  return (k / lambda) * std::pow(z, k - 1.0) * std::exp(-std::pow(z, k));
}

double weibull_cdf(double x, double k, double lambda) {
  if (x <= 0.0) return 0.0;
  return -std::expm1(-std::pow(x / lambda, k));
}

double weibull_quantile(double p, double k, double lambda) {
  return lambda * std::pow(-std::log1p(-p), 1.0 / k);
}

namespace {

// Power sums of x^k shifted by the largest log so x^k cannot overflow.
struct ShapeSums {
  double s0 = 0.0;  // sum w_i
  double s1 = 0.0;  // sum w_i y_i
  double s2 = 0.0;  // sum w_i y_i^2
};

struct LogSample {
  std::vector<double> logs;
  double max_log = 0.0;
  double mean_log = 0.0;
};

LogSample log_sample(std::span<const double> samples) {
  LogSample ls;
  ls.logs.reserve(samples.size());
  for (double x : samples) ls.logs.push_back(std::log(x));
  ls.max_log = *std::max_element(ls.logs.begin(), ls.logs.end());
  ls.mean_log = std::accumulate(ls.logs.begin(), ls.logs.end(), 0.0) / static_cast<double>(ls.logs.size());
  return ls;
}

ShapeSums shape_sums(const LogSample& ls, double k) {
  ShapeSums s;
  for (double y : ls.logs) {
    const double w = std::exp(k * (y - ls.max_log));
    s.s0 += w;
    s.s1 += w * y;
    s.s2 += w * y * y;
  }
  return s;
}

double residual(const LogSample& ls, double k) {
  const ShapeSums s = shape_sums(ls, k);
  return s.s1 / s.s0 - 1.0 / k - ls.mean_log;
}

void require_positive(std::span<const double> samples, std::size_t min_count) {
  if (samples.size() < min_count)
    throw InputError("need at least " + std::to_string(min_count) + " samples, got " +
                     std::to_string(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i] > 0.0) || !std::isfinite(samples[i]))
      throw InputError("sample " + std::to_string(i) + " is not a finite positive number");
  }
}

}  // namespace

double weibull_shape_residual(std::span<const double> samples, double k) {
  return residual(log_sample(samples), k);
}

double weibull_log_likelihood(std::span<const double> samples, double k, double lambda) {
  const double n = static_cast<double>(samples.size());
  double sum_log = 0.0;
  double sum_pow = 0.0;
  for (double x : samples) {
    sum_log += std::log(x);
    sum_pow += std::pow(x / lambda, k);
  }
  return n * std::log(k) - n * k * std::log(lambda) + (k - 1.0) * sum_log - sum_pow;
}

WeibullFit fit_weibull_mle(std::span<const double> samples, double tol, int max_iter) {
  require_positive(samples, 10);
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be positive");

  const LogSample ls = log_sample(samples);
  const double n = static_cast<double>(samples.size());

  double lo = 1e-3;
  double hi = 1e3;
  const double g_hi = residual(ls, hi);
  if (!(g_hi > 0.0)) throw ConvergenceError("Weibull shape has no finite root (degenerate sample)", hi, g_hi);
  const double g_lo = residual(ls, lo);
  if (!(g_lo < 0.0)) throw ConvergenceError("Weibull shape residual does not change sign", lo, g_lo);

  double var = 0.0;
  for (double y : ls.logs) var += (y - ls.mean_log) * (y - ls.mean_log);
  const double sd = std::sqrt(var / n);
  double k = sd > 0.0 ? std::clamp(1.2 / sd, lo * 10.0, hi / 10.0) : 1.0;

  double g = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    const ShapeSums s = shape_sums(ls, k);
    const double mean_y = s.s1 / s.s0;
    g = mean_y - 1.0 / k - ls.mean_log;
    if (std::abs(g) < tol) {
      const double lambda = std::exp(ls.max_log + std::log(s.s0 / n) / k);
      WeibullFit fit;
      fit.k = k;
      fit.lambda = lambda;
      fit.n_samples = samples.size();
      fit.log_likelihood = weibull_log_likelihood(samples, k, lambda);
      fit.ks_statistic = ks_statistic(samples, [&](double x) { return weibull_cdf(x, k, lambda); });
      return fit;
    }
    // g is increasing in k, so the sign tells which side of the root we are on.
    if (g < 0.0) lo = k; else hi = k;

    const double slope = (s.s2 / s.s0 - mean_y * mean_y) + 1.0 / (k * k);
    double next = k - g / slope;
    if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
    if (next == k) break;
    k = next;
  }
  throw ConvergenceError("Weibull shape iteration did not converge", k, g);
}

double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0)) throw std::invalid_argument("hurwitz_zeta requires s > 1");
  if (!(q > 0.0)) throw std::invalid_argument("hurwitz_zeta requires q > 0");
  // Direct sum over the first terms, Euler-Maclaurin correction for the rest.
  constexpr int kDirect = 16;
  constexpr double kBernoulli[] = {1.0 / 6.0,     -1.0 / 30.0,     1.0 / 42.0, -1.0 / 30.0,
                                   5.0 / 66.0,    -691.0 / 2730.0, 7.0 / 6.0,  -3617.0 / 510.0};
  double sum = 0.0;
  for (int n = 0; n < kDirect; ++n) sum += std::pow(q + n, -s);
  const double a = q + kDirect;
  sum += std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);

  // term_j = B_2j / (2j)! * s (s+1) ... (s+2j-2) * a^(-s-2j+1)
  double rising = s;           // s (s+1) ... (s+2j-2)
  double factorial = 2.0;      // (2j)!
  double power = std::pow(a, -s - 1.0);
  for (int j = 1; j <= 8; ++j) {
    sum += kBernoulli[j - 1] / factorial * rising * power;
    rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
    factorial *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    power /= a * a;
  }
  return sum;
}

PowerLawFit fit_powerlaw_mle(std::span<const std::uint64_t> samples, std::uint64_t xmin) {
  if (xmin < 1) throw InputError("xmin must be a positive integer");
  if (samples.size() < 10)
    throw InputError("need at least 10 samples, got " + std::to_string(samples.size()));
  const double shift = static_cast<double>(xmin) - 0.5;
  std::uint64_t n_tail = 0;
  double sum_log_ratio = 0.0;
  double sum_log = 0.0;
  for (std::uint64_t x : samples) {
    if (x < xmin) continue;
    ++n_tail;
    sum_log_ratio += std::log(static_cast<double>(x) / shift);
    sum_log += std::log(static_cast<double>(x));
  }
  if (n_tail < 2) throw InputError("fewer than 2 samples at or above xmin");

  PowerLawFit fit;
  fit.xmin = xmin;
  fit.n_samples = samples.size();
  fit.n_tail = n_tail;
  fit.alpha = 1.0 + static_cast<double>(n_tail) / sum_log_ratio;
  fit.log_likelihood = -static_cast<double>(n_tail) * std::log(hurwitz_zeta(fit.alpha, static_cast<double>(xmin))) -
                       fit.alpha * sum_log;
  return fit;
}

double powerlaw_cdf(double x, double alpha, std::uint64_t xmin) {
  const double lo = static_cast<double>(xmin);
  if (x < lo) return 0.0;
  const double upper = std::floor(x) + 1.0;
  return 1.0 - hurwitz_zeta(alpha, upper) / hurwitz_zeta(alpha, lo);
}

ExponentialFit fit_exponential_tail(std::span<const std::uint64_t> samples, std::uint64_t xmin) {
  if (xmin < 1) throw InputError("xmin must be a positive integer");
  std::uint64_t n_tail = 0;
  double excess = 0.0;
  for (std::uint64_t x : samples) {
    if (x < xmin) continue;
    ++n_tail;
    excess += static_cast<double>(x - xmin);
  }
  if (n_tail < 2) throw InputError("fewer than 2 samples at or above xmin");

  ExponentialFit fit;
  fit.xmin = xmin;
  fit.n_tail = n_tail;
  const double n = static_cast<double>(n_tail);
  const double mean_excess = excess / n;
  if (mean_excess == 0.0) {
    fit.rate = std::numeric_limits<double>::infinity();
    fit.log_likelihood = 0.0;
    return fit;
  }
  fit.rate = std::log1p(1.0 / mean_excess);
  fit.log_likelihood = n * std::log(-std::expm1(-fit.rate)) - fit.rate * excess;
  return fit;
}

double powerlaw_vs_exponential_llr(std::span<const std::uint64_t> samples, std::uint64_t xmin) {
  return fit_powerlaw_mle(samples, xmin).log_likelihood - fit_exponential_tail(samples, xmin).log_likelihood;
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InputError("ks_statistic needs at least one sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, std::abs(above), std::abs(below)});
  }
  return std::min(1.0, d);
}

std::vector<std::pair<double, double>> emit_pdf_points(const WeibullFit& fit, double x_max, int n_points) {
  if (n_points < 2) throw InputError("n_points must be >= 2");
  if (!(x_max > 0.0)) throw InputError("x_max must be positive");
  std::vector<std::pair<double, double>> points;
  points.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double x = i == n_points - 1 ? x_max : x_max * static_cast<double>(i) / (n_points - 1);
    points.emplace_back(x, weibull_pdf(x, fit.k, fit.lambda));
  }
  return points;
}

}  // namespace netmon
