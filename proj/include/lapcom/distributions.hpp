#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "lapcom/common.hpp"
#include "lapcom/multiplex.hpp"
#include "lapcom/rng.hpp"

namespace lapcom {

/// Parameters of a translated beta-negative-binomial prior on a count with
/// support {1, 2, ...}.
struct BnbParams {
  double a = 8.0;
  double b = 18.0;
  double c = 10.0;
};

inline double log_beta_fn(double x, double y) {
  return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
}

/// Edge log-pmf at linear predictor eta. Bernoulli-logit is evaluated via
/// log1p in the appropriate branch so large |eta| stays finite.
inline double edge_logpmf(long y, double eta, EdgeFamily family) {
  require(y >= 0, "edge_logpmf: y must be non-negative");
  if (family == EdgeFamily::bernoulli_logit) {
    require(y <= 1, "edge_logpmf: bernoulli requires y in {0,1}");
    if (eta <= 0.0) return static_cast<double>(y) * eta - std::log1p(std::exp(eta));
    return (static_cast<double>(y) - 1.0) * eta - std::log1p(std::exp(-eta));
  }
  return static_cast<double>(y) * eta - std::exp(eta) - std::lgamma(static_cast<double>(y) + 1.0);
}

/// Bivariate normal log-density with diagonal covariance.
inline double logpdf_mvn_diag(const Vec2& x, const Vec2& mu, const Vec2& sigma2) {
  require(sigma2.x > 0.0 && sigma2.y > 0.0, "logpdf_mvn_diag: variances must be positive");
  const double dx = x.x - mu.x, dy = x.y - mu.y;
  return -kLogTwoPi - 0.5 * std::log(sigma2.x * sigma2.y) -
         0.5 * (dx * dx / sigma2.x + dy * dy / sigma2.y);
}

/// Spherical case: both coordinates share one variance.
inline double logpdf_mvn_spherical(const Vec2& x, const Vec2& mu, double sigma2) {
  return logpdf_mvn_diag(x, mu, {sigma2, sigma2});
}

/// Translated BNB log-pmf on k = 1, 2, ...:
///   P(k) = Gamma(a + k - 1) B(a + b, k - 1 + c) / [Gamma(a) Gamma(k) B(b, c)].
inline double logpmf_translated_bnb(long k, const BnbParams& p) {
  require(k >= 1, "logpmf_translated_bnb: support starts at 1");
  require(p.a > 0.0 && p.b > 0.0 && p.c > 0.0, "logpmf_translated_bnb: parameters must be positive");
  const double kd = static_cast<double>(k);
  return std::lgamma(p.a + kd - 1.0) + log_beta_fn(p.a + p.b, kd - 1.0 + p.c) -
         std::lgamma(p.a) - std::lgamma(kd) - log_beta_fn(p.b, p.c);
}

/// Fisher-Snedecor F(l, r) log-density.
inline double logpdf_fisher_f(double x, double l, double r) {
  require(x > 0.0, "logpdf_fisher_f: x must be positive");
  require(l > 0.0 && r > 0.0, "logpdf_fisher_f: degrees of freedom must be positive");
  return 0.5 * (l * std::log(l * x) + r * std::log(r) - (l + r) * std::log(l * x + r)) -
         std::log(x) - log_beta_fn(0.5 * l, 0.5 * r);
}

inline double logpdf_normal(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * kLogTwoPi - std::log(sd) - 0.5 * z * z;
}

inline double logpdf_invgamma(double x, double u, double v) {
  require(x > 0.0, "logpdf_invgamma: x must be positive");
  require(u > 0.0 && v > 0.0, "logpdf_invgamma: parameters must be positive");
  return u * std::log(v) - std::lgamma(u) - (u + 1.0) * std::log(x) - v / x;
}

inline double sample_invgamma(double u, double v, Rng& rng) {
  require(u > 0.0 && v > 0.0, "sample_invgamma: parameters must be positive");
  return v / rng.gamma(u);
}

/// Dirichlet draw; normalization happens in log space so very small
/// concentrations degrade gracefully instead of producing 0/0.
inline std::vector<double> sample_dirichlet(std::span<const double> conc, Rng& rng) {
  require(!conc.empty(), "sample_dirichlet: empty concentration vector");
  std::vector<double> logg(conc.size());
  for (std::size_t i = 0; i < conc.size(); ++i) {
    require(conc[i] > 0.0, "sample_dirichlet: concentrations must be positive");
    if (conc[i] < 0.2) {
      // log of the small-shape boost G(a) = G(a+1) U^{1/a}
      logg[i] = std::log(rng.gamma(conc[i] + 1.0)) + std::log(rng.uniform()) / conc[i];
    } else {
      logg[i] = std::log(rng.gamma(conc[i]));
    }
  }
  const double lse = log_sum_exp(logg);
  std::vector<double> out(conc.size());
  for (std::size_t i = 0; i < conc.size(); ++i) out[i] = std::exp(logg[i] - lse);
  return out;
}

inline Vec2 sample_mvn_spherical(const Vec2& mu, double sigma2, Rng& rng) {
  const double sd = std::sqrt(sigma2);
  return rng.normal2(mu, sd, sd);
}

/// Draws from the translated BNB restricted to {1, ..., truncate_at}
/// (untruncated when truncate_at == 0) by pmf inversion.
inline long sample_translated_bnb(const BnbParams& p, Rng& rng, long truncate_at = 0) {
  std::vector<double> pmf;
  double total = 0.0;
  const long hard_cap = truncate_at > 0 ? truncate_at : 100000;
  for (long k = 1; k <= hard_cap; ++k) {
    const double pk = std::exp(logpmf_translated_bnb(k, p));
    pmf.push_back(pk);
    total += pk;
    if (truncate_at == 0 && 1.0 - total < 1e-14) break;
  }
  const double u = rng.uniform() * total;
  double cum = 0.0;
  for (std::size_t idx = 0; idx < pmf.size(); ++idx) {
    cum += pmf[idx];
    if (u <= cum) return static_cast<long>(idx) + 1;
  }
  return static_cast<long>(pmf.size());
}

}  // namespace lapcom
