#pragma once

#include <vector>

namespace svct {

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
// Series expansion for x < a+1, Lentz continued fraction otherwise;
// absolute accuracy ~1e-14.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Chi-square survival function P(X > x) and quantile for integer df >= 1.
// The quantile inverts the cdf with a guarded Newton iteration seeded by the
// Wilson-Hilferty approximation; accuracy well inside 1e-10.
double chi2_sf(int df, double x);
double chi2_cdf(int df, double x);
double chi2_quantile(int df, double p);

// Standard normal density, cdf, and quantile (Wichura's AS241, full double
// precision).
double norm_pdf(double x);
double norm_cdf(double x);
double norm_quantile(double p);

// Standard bivariate normal cdf P(X <= h, Y <= k) with correlation rho,
// Drezner-Wesolowsky/Genz algorithm (Gauss-Legendre on the angular form,
// asymptotic expansion for |rho| > 0.925). Absolute accuracy ~1e-14.
double bvn_cdf(double h, double k, double rho);

// First Debye function D1(x) = (1/x) * integral_0^x t/(e^t - 1) dt for
// x != 0, extended by D1(-x) = D1(x) + x/2. Gauss-Legendre quadrature.
double debye1(double x);

// Gauss-Legendre nodes and weights on (-1, 1), cached per order.
const std::vector<double>& gauss_legendre_nodes(int n);
const std::vector<double>& gauss_legendre_weights(int n);

} // namespace svct
