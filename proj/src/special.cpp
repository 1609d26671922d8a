#include "svct/special.hpp"

#include "svct/errors.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace svct {

namespace {

constexpr double kGammaEps = 1e-16;
constexpr int kGammaMaxIter = 500;

// Series representation of P(a,x), valid/fast for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kGammaMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kGammaEps) {
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw numeric_error("regularized_gamma_p: series did not converge (a=" +
                        std::to_string(a) + ", x=" + std::to_string(x) + ")");
}

// Lentz continued fraction for Q(a,x), valid/fast for x >= a+1.
double gamma_q_cf(double a, double x) {
    constexpr double kFpMin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kGammaMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kGammaEps) {
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
        }
    }
    throw numeric_error("regularized_gamma_q: continued fraction did not converge (a=" +
                        std::to_string(a) + ", x=" + std::to_string(x) + ")");
}

} // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || std::isnan(x)) {
        throw std::domain_error("regularized_gamma_p: need a > 0 and finite x");
    }
    if (x <= 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || std::isnan(x)) {
        throw std::domain_error("regularized_gamma_q: need a > 0 and finite x");
    }
    if (x <= 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_sf(int df, double x) {
    if (df < 1) throw std::domain_error("chi2_sf: df must be >= 1");
    if (x <= 0.0) return 1.0;
    return regularized_gamma_q(0.5 * df, 0.5 * x);
}

double chi2_cdf(int df, double x) {
    if (df < 1) throw std::domain_error("chi2_cdf: df must be >= 1");
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * df, 0.5 * x);
}

double chi2_quantile(int df, double p) {
    if (df < 1) throw std::domain_error("chi2_quantile: df must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("chi2_quantile: p must be in (0,1)");

    const double a = 0.5 * df;

    // Wilson-Hilferty starting point, clipped away from zero.
    const double z = norm_quantile(p);
    const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
    double x = df * t * t * t;
    if (!(x > 0.0)) x = 0.5;

    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    const double log_norm = a * std::log(0.5) - std::lgamma(a); // log chi2 pdf constant
    for (int it = 0; it < 200; ++it) {
        const double f = chi2_cdf(df, x) - p;
        if (f > 0.0) hi = x; else lo = x;
        const double logpdf = log_norm + (a - 1.0) * std::log(x) - 0.5 * x;
        double step = f / std::exp(logpdf);
        double xn = x - step;
        if (!(xn > lo && (xn < hi))) {
            xn = std::isinf(hi) ? 2.0 * x : 0.5 * (lo + hi); // bisect when Newton leaves the bracket
        }
        if (std::fabs(xn - x) <= 1e-12 * std::max(1.0, x)) return xn;
        x = xn;
    }
    throw numeric_error("chi2_quantile: no convergence (df=" + std::to_string(df) +
                        ", p=" + std::to_string(p) + ")");
}

double norm_pdf(double x) {
    return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

double norm_quantile(double p) {
    // Wichura (1988), algorithm AS241 PPND16.
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_quantile: p must be in (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

double bvn_cdf(double h, double k, double rho) {
    // Port of the Drezner-Wesolowsky/Genz BVND routine. BVND computes
    // P(X > dh, Y > dk); the cdf is obtained by negating the arguments.
    if (std::isnan(h) || std::isnan(k) || !(rho > -1.0 && rho < 1.0)) {
        throw std::domain_error("bvn_cdf: need finite h,k and rho in (-1,1)");
    }
    const double dh = -h;
    const double dk = -k;
    const double twopi = 6.283185307179586477;

    const auto& gx = gauss_legendre_nodes(20);
    const auto& gw = gauss_legendre_weights(20);

    double bvn = 0.0;
    double hh = dh, kk = dk;
    double hk = hh * kk;
    if (std::fabs(rho) < 0.925) {
        if (std::fabs(rho) > 0.0) {
            const double hs = (hh * hh + kk * kk) / 2.0;
            const double asr = std::asin(rho);
            for (std::size_t i = 0; i < gx.size(); ++i) {
                const double sn = std::sin(asr * (gx[i] + 1.0) / 2.0);
                bvn += gw[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
            bvn = bvn * asr / (2.0 * twopi);
        }
        bvn += norm_cdf(-hh) * norm_cdf(-kk);
    } else {
        if (rho < 0.0) {
            kk = -kk;
            hk = -hk;
        }
        const double as = (1.0 - rho) * (1.0 + rho);
        double a = std::sqrt(as);
        const double bs = (hh - kk) * (hh - kk);
        const double c = (4.0 - hk) / 8.0;
        const double d = (12.0 - hk) / 16.0;
        double asr = -(bs / as + hk) / 2.0;
        if (asr > -100.0) {
            bvn = a * std::exp(asr) *
                  (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
        }
        if (-hk < 100.0) {
            const double b = std::sqrt(bs);
            bvn -= std::exp(-hk / 2.0) * std::sqrt(twopi) * norm_cdf(-b / a) * b *
                   (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for (std::size_t i = 0; i < gx.size(); ++i) {
            const double x = a * (gx[i] + 1.0);
            const double xs = x * x;
            const double rs = std::sqrt(1.0 - xs);
            asr = -(bs / xs + hk) / 2.0;
            if (asr > -100.0) {
                bvn += a * gw[i] * std::exp(asr) *
                       (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                        (1.0 + c * xs * (1.0 + d * xs)));
            }
        }
        bvn = -bvn / twopi;
        if (rho > 0.0) {
            bvn += norm_cdf(-std::max(hh, kk));
        } else {
            bvn = -bvn;
            if (kk > hh) bvn += norm_cdf(kk) - norm_cdf(hh);
        }
    }
    return std::min(1.0, std::max(0.0, bvn));
}

double debye1(double x) {
    if (x == 0.0) return 1.0; // limit of (1/x) * integral
    if (x < 0.0) return debye1(-x) - x / 2.0;
    const auto& gx = gauss_legendre_nodes(64);
    const auto& gw = gauss_legendre_weights(64);
    double sum = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double t = 0.5 * x * (gx[i] + 1.0);
        // t/(e^t - 1), series near zero to dodge 0/0
        const double f = (t < 1e-8) ? 1.0 - t / 2.0 : t / std::expm1(t);
        sum += gw[i] * f;
    }
    return 0.5 * sum; // (1/x) * (x/2) * sum
}

namespace {

void gauss_legendre_build(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(3.141592653589793238 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

struct GlTable {
    std::vector<double> x, w;
};

std::map<int, GlTable>& gl_cache() {
    static std::map<int, GlTable> cache;
    return cache;
}

std::mutex& gl_mutex() {
    static std::mutex m;
    return m;
}

const GlTable& gl_table(int n) {
    if (n < 2) throw std::domain_error("gauss_legendre: order must be >= 2");
    std::lock_guard<std::mutex> lock(gl_mutex());
    auto& cache = gl_cache();
    auto it = cache.find(n);
    if (it == cache.end()) {
        GlTable t;
        gauss_legendre_build(n, t.x, t.w);
        it = cache.emplace(n, std::move(t)).first;
    }
    return it->second;
}

} // namespace

const std::vector<double>& gauss_legendre_nodes(int n) { return gl_table(n).x; }
const std::vector<double>& gauss_legendre_weights(int n) { return gl_table(n).w; }

} // namespace svct
