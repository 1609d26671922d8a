#include "svct/bivcop.hpp"

#include "svct/errors.hpp"
#include "svct/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace svct {

namespace {

double clamp_unit(double x, const char* what) {
    if (std::isnan(x) || x < 0.0 || x > 1.0) {
        throw std::domain_error(std::string(what) + ": argument " + std::to_string(x) +
                                " outside [0,1]");
    }
    return std::min(kUMax, std::max(kUMin, x));
}

//
// Clayton, evaluated in log space so that theta up to kClaytonThetaMax
// survives u near the clamp boundary (u^-theta can reach 1e280).
// With a = -theta*ln u, b = -theta*ln v the generator sum is
// S = e^a + e^b - 1, handled as M + log(e^(a-M) + e^(b-M) - e^(-M)).
//

struct ClaytonParts {
    double a, b, m, d, log_s; // d = e^(a-m) + e^(b-m) - e^(-m)
};

ClaytonParts clayton_parts(double theta, double u, double v) {
    ClaytonParts p;
    p.a = -theta * std::log(u);
    p.b = -theta * std::log(v);
    p.m = std::max(p.a, p.b);
    p.d = std::exp(p.a - p.m) + std::exp(p.b - p.m) - std::exp(-p.m);
    p.log_s = p.m + std::log(p.d);
    return p;
}

double clayton_cdf(double theta, double u, double v) {
    return std::exp(-clayton_parts(theta, u, v).log_s / theta);
}

double clayton_log_density(double theta, double u, double v) {
    const ClaytonParts p = clayton_parts(theta, u, v);
    return std::log1p(theta) - (theta + 1.0) * (std::log(u) + std::log(v)) -
           (2.0 + 1.0 / theta) * p.log_s;
}

double clayton_h2(double theta, double u, double v) {
    const ClaytonParts p = clayton_parts(theta, u, v);
    return std::exp(-(theta + 1.0) * std::log(v) - (1.0 + 1.0 / theta) * p.log_s);
}

double clayton_h2inv(double theta, double p, double v) {
    // h2(u|v) = p  =>  S = (p * v^(theta+1))^(-theta/(theta+1)),
    // u = (S - v^-theta + 1)^(-1/theta), all in logs.
    const double b = -theta * std::log(v);
    const double log_s = -theta / (theta + 1.0) * std::log(p) + b;
    const double arg = 1.0 + std::exp(-log_s) - std::exp(b - log_s);
    const double log_x = log_s + std::log(arg);
    return std::exp(-log_x / theta);
}

double clayton_score(double theta, double u, double v) {
    const ClaytonParts p = clayton_parts(theta, u, v);
    const double lu = std::log(u), lv = std::log(v);
    // dS/dtheta = (a e^a + b e^b)/theta, so (dS/dtheta)/S in shifted exponents:
    const double ds_over_s = (p.a * std::exp(p.a - p.m) + p.b * std::exp(p.b - p.m)) /
                             (theta * p.d);
    return 1.0 / (1.0 + theta) - (lu + lv) + p.log_s / (theta * theta) -
           (2.0 + 1.0 / theta) * ds_over_s;
}

//
// Frank. A = e^(-theta u), B = e^(-theta v), E = e^(-theta); the density
// denominator is computed as D = A + B - A*B - E which stays relatively
// accurate for |theta| up to kFrankThetaMax where the naive
// (1-E) - (1-A)(1-B) cancels catastrophically.
//

double frank_cdf(double theta, double u, double v) {
    const double a = std::exp(-theta * u), b = std::exp(-theta * v), e = std::exp(-theta);
    const double d = a + b - a * b - e;
    return -std::log(d / (1.0 - e)) / theta;
}

double frank_log_density(double theta, double u, double v) {
    const double a = std::exp(-theta * u), b = std::exp(-theta * v), e = std::exp(-theta);
    const double d = a + b - a * b - e;
    return std::log(theta * (1.0 - e)) - theta * (u + v) - 2.0 * std::log(std::fabs(d));
}

double frank_h2(double theta, double u, double v) {
    const double a = std::exp(-theta * u), b = std::exp(-theta * v), e = std::exp(-theta);
    const double d = a + b - a * b - e;
    return b * (1.0 - a) / d;
}

double frank_h2inv(double theta, double p, double v) {
    // 1 + p(e^-theta - 1)/(b(1-p) + p) rewritten as a ratio of positive sums,
    // so the subtraction never cancels (it would lose ~8 digits for large
    // theta near the (1,1) corner).
    const double b = std::exp(-theta * v), e = std::exp(-theta);
    const double num = b * (1.0 - p) + p * e;
    const double den = b * (1.0 - p) + p;
    return (std::log(den) - std::log(num)) / theta;
}

double frank_score(double theta, double u, double v) {
    const double a = std::exp(-theta * u), b = std::exp(-theta * v), e = std::exp(-theta);
    const double d = a + b - a * b - e;
    const double dd = -u * a - v * b + (u + v) * a * b + e;
    return 1.0 / theta + e / (1.0 - e) - (u + v) - 2.0 * dd / d;
}

//
// Gumbel. x = -ln u, y = -ln v, S = x^theta + y^theta, w = S^(1/theta); the
// sum is factored over max(x,y) so x^theta never overflows.
//

struct GumbelParts {
    double x, y, log_s, w, sx, sy; // sx = (x/max)^theta, sy = (y/max)^theta
};

GumbelParts gumbel_parts(double theta, double u, double v) {
    GumbelParts p;
    p.x = -std::log(u);
    p.y = -std::log(v);
    const double xm = std::max(p.x, p.y);
    p.sx = std::pow(p.x / xm, theta);
    p.sy = std::pow(p.y / xm, theta);
    p.log_s = theta * std::log(xm) + std::log(p.sx + p.sy);
    p.w = std::exp(p.log_s / theta);
    return p;
}

double gumbel_cdf(double theta, double u, double v) {
    return std::exp(-gumbel_parts(theta, u, v).w);
}

double gumbel_log_density(double theta, double u, double v) {
    const GumbelParts p = gumbel_parts(theta, u, v);
    return -p.w + (theta - 1.0) * (std::log(p.x) + std::log(p.y)) +
           (2.0 / theta - 2.0) * p.log_s + std::log(p.w + theta - 1.0) - p.log_s / theta +
           p.x + p.y;
}

double gumbel_h2(double theta, double u, double v) {
    const GumbelParts p = gumbel_parts(theta, u, v);
    return std::exp(-p.w + (theta - 1.0) * std::log(p.y) + (1.0 / theta - 1.0) * p.log_s + p.y);
}

double gumbel_score(double theta, double u, double v) {
    const GumbelParts p = gumbel_parts(theta, u, v);
    const double lx = std::log(p.x), ly = std::log(p.y);
    const double ds_over_s = (p.sx * lx + p.sy * ly) / (p.sx + p.sy);
    const double dw = p.w * (-p.log_s / (theta * theta) + ds_over_s / theta);
    return -dw + (lx + ly) - 2.0 * p.log_s / (theta * theta) +
           (2.0 / theta - 2.0) * ds_over_s + (dw + 1.0) / (p.w + theta - 1.0) - dw / p.w;
}

double gumbel_h2inv(double theta, double p, double v) {
    // No closed form: bracketed Newton on u with the copula density as the
    // derivative of h2 in u. h2(.|v) is increasing, so the bracket shrinks
    // monotonically.
    double lo = kUMin, hi = kUMax;
    double u = std::min(std::max(p, lo), hi); // independence would give u = p
    for (int it = 0; it < 200; ++it) {
        const double f = gumbel_h2(theta, u, v) - p;
        // Converge on the residual in p-space: a step-size criterion would
        // leave errors of density * step where the density is large.
        if (std::fabs(f) <= 1e-12) return u;
        if (f > 0.0) hi = u; else lo = u;
        const double dens = std::exp(gumbel_log_density(theta, u, v));
        double un = u - f / dens;
        if (!(un > lo && un < hi)) un = 0.5 * (lo + hi);
        if (std::fabs(un - u) < 4e-16 * u) return un; // bracket exhausted
        u = un;
    }
    throw numeric_error("gumbel hinv: no convergence (theta=" + std::to_string(theta) +
                        ", p=" + std::to_string(p) + ", v=" + std::to_string(v) + ")");
}

//
// Gaussian, parameterized by rho.
//

double gaussian_log_density(double rho, double u, double v) {
    const double z1 = norm_quantile(u), z2 = norm_quantile(v);
    const double s2 = 1.0 - rho * rho;
    const double q = rho * rho * (z1 * z1 + z2 * z2) - 2.0 * rho * z1 * z2;
    return -0.5 * std::log(s2) - q / (2.0 * s2);
}

double gaussian_h2(double rho, double u, double v) {
    const double z1 = norm_quantile(u), z2 = norm_quantile(v);
    return norm_cdf((z1 - rho * z2) / std::sqrt(1.0 - rho * rho));
}

double gaussian_h2inv(double rho, double p, double v) {
    const double z2 = norm_quantile(v);
    return norm_cdf(norm_quantile(p) * std::sqrt(1.0 - rho * rho) + rho * z2);
}

double gaussian_score(double rho, double u, double v) {
    const double z1 = norm_quantile(u), z2 = norm_quantile(v);
    const double s2 = 1.0 - rho * rho;
    const double q = rho * rho * (z1 * z1 + z2 * z2) - 2.0 * rho * z1 * z2;
    const double dq = 2.0 * rho * (z1 * z1 + z2 * z2) - 2.0 * z1 * z2;
    return rho / s2 - (dq * s2 + 2.0 * rho * q) / (2.0 * s2 * s2);
}

// Dispatch helpers on the base (unrotated) family.

double base_cdf(Family f, double theta, double u, double v) {
    switch (f) {
        case Family::Clayton: return clayton_cdf(theta, u, v);
        case Family::Frank: return frank_cdf(theta, u, v);
        case Family::Gumbel: return gumbel_cdf(theta, u, v);
        case Family::Gaussian: return bvn_cdf(norm_quantile(u), norm_quantile(v), theta);
        default: return u * v;
    }
}

double base_log_density(Family f, double theta, double u, double v) {
    switch (f) {
        case Family::Clayton: return clayton_log_density(theta, u, v);
        case Family::Frank: return frank_log_density(theta, u, v);
        case Family::Gumbel: return gumbel_log_density(theta, u, v);
        case Family::Gaussian: return gaussian_log_density(theta, u, v);
        default: return 0.0;
    }
}

double base_h2(Family f, double theta, double u, double v) {
    switch (f) {
        case Family::Clayton: return clayton_h2(theta, u, v);
        case Family::Frank: return frank_h2(theta, u, v);
        case Family::Gumbel: return gumbel_h2(theta, u, v);
        case Family::Gaussian: return gaussian_h2(theta, u, v);
        default: return u;
    }
}

double base_h2inv(Family f, double theta, double p, double v) {
    switch (f) {
        case Family::Clayton: return clayton_h2inv(theta, p, v);
        case Family::Frank: return frank_h2inv(theta, p, v);
        case Family::Gumbel: return gumbel_h2inv(theta, p, v);
        case Family::Gaussian: return gaussian_h2inv(theta, p, v);
        default: return p;
    }
}

double base_score(Family f, double theta, double u, double v) {
    switch (f) {
        case Family::Clayton: return clayton_score(theta, u, v);
        case Family::Frank: return frank_score(theta, u, v);
        case Family::Gumbel: return gumbel_score(theta, u, v);
        case Family::Gaussian: return gaussian_score(theta, u, v);
        default:
            throw unsupported_operation("score: independence copula has no parameter");
    }
}

} // namespace

BivCopula::BivCopula(FamilyTag tag, double theta) : tag_(tag), theta_(theta) {
    if (std::isnan(theta)) throw std::domain_error("BivCopula: parameter is NaN");
    switch (tag.family) {
        case Family::Independence:
            if (tag.rotation != Rotation::None) {
                throw std::domain_error("BivCopula: independence admits no rotation");
            }
            theta_ = 0.0;
            break;
        case Family::Clayton:
            if (theta < 0.0 || theta > kClaytonThetaMax) {
                throw std::domain_error("BivCopula: Clayton theta " + std::to_string(theta) +
                                        " outside [0, " + std::to_string(kClaytonThetaMax) + "]");
            }
            break;
        case Family::Frank:
            if (std::fabs(theta) > kFrankThetaMax) {
                throw std::domain_error("BivCopula: Frank theta " + std::to_string(theta) +
                                        " outside [-35, 35]");
            }
            break;
        case Family::Gumbel:
            if (theta < 1.0 || theta > kGumbelThetaMax) {
                throw std::domain_error("BivCopula: Gumbel theta " + std::to_string(theta) +
                                        " outside [1, " + std::to_string(kGumbelThetaMax) + "]");
            }
            break;
        case Family::Gaussian:
            if (std::fabs(theta) > kGaussianRhoMax) {
                throw std::domain_error("BivCopula: Gaussian rho " + std::to_string(theta) +
                                        " outside [-0.999, 0.999]");
            }
            break;
    }
}

bool BivCopula::is_independence() const {
    switch (tag_.family) {
        case Family::Independence: return true;
        case Family::Clayton: return theta_ < kClaytonIndepEps;
        case Family::Frank: return std::fabs(theta_) < kFrankIndepEps;
        case Family::Gumbel: return theta_ - 1.0 < kGumbelIndepEps;
        case Family::Gaussian: return std::fabs(theta_) < kGaussianIndepEps;
    }
    return false;
}

double cdf(const BivCopula& c, double u, double v) {
    u = clamp_unit(u, "cdf");
    v = clamp_unit(v, "cdf");
    if (c.is_independence()) return u * v;
    if (c.tag().rotation == Rotation::Half) {
        return u + v - 1.0 + base_cdf(c.tag().family, c.theta(), 1.0 - u, 1.0 - v);
    }
    return base_cdf(c.tag().family, c.theta(), u, v);
}

double log_density(const BivCopula& c, double u, double v) {
    u = clamp_unit(u, "log_density");
    v = clamp_unit(v, "log_density");
    if (c.is_independence()) return 0.0;
    if (c.tag().rotation == Rotation::Half) {
        return base_log_density(c.tag().family, c.theta(), 1.0 - u, 1.0 - v);
    }
    return base_log_density(c.tag().family, c.theta(), u, v);
}

double density(const BivCopula& c, double u, double v) {
    return std::exp(log_density(c, u, v));
}

double hfunc(const BivCopula& c, double u, double v, CondOn on) {
    u = clamp_unit(u, "hfunc");
    v = clamp_unit(v, "hfunc");
    if (c.is_independence()) return on == CondOn::Second ? u : v;
    // All supported families are exchangeable, so dC/du (u,v) = dC/dv (v,u).
    const double free_arg = (on == CondOn::Second) ? u : v;
    const double cond_arg = (on == CondOn::Second) ? v : u;
    if (c.tag().rotation == Rotation::Half) {
        return 1.0 - base_h2(c.tag().family, c.theta(), 1.0 - free_arg, 1.0 - cond_arg);
    }
    return base_h2(c.tag().family, c.theta(), free_arg, cond_arg);
}

double hinv(const BivCopula& c, double p, double w, CondOn on) {
    p = clamp_unit(p, "hinv");
    w = clamp_unit(w, "hinv");
    if (c.is_independence()) return p;
    double out;
    if (c.tag().rotation == Rotation::Half) {
        out = 1.0 - base_h2inv(c.tag().family, c.theta(), 1.0 - p, 1.0 - w);
    } else {
        out = base_h2inv(c.tag().family, c.theta(), p, w);
    }
    (void)on; // exchangeability: the inverse has the same form for both sides
    return std::min(kUMax, std::max(kUMin, out));
}

double score(const BivCopula& c, double u, double v) {
    u = clamp_unit(u, "score");
    v = clamp_unit(v, "score");
    if (c.tag().family == Family::Independence) {
        throw unsupported_operation("score: independence copula has no parameter");
    }
    if (c.is_independence()) {
        throw unsupported_operation("score: copula pinned at the independence limit");
    }
    if (c.tag().rotation == Rotation::Half) {
        return base_score(c.tag().family, c.theta(), 1.0 - u, 1.0 - v);
    }
    return base_score(c.tag().family, c.theta(), u, v);
}

double tau_to_param(FamilyTag tag, double tau) {
    if (std::isnan(tau)) throw std::domain_error("tau_to_param: tau is NaN");
    switch (tag.family) {
        case Family::Independence:
            throw unsupported_operation("tau_to_param: independence has no parameter");
        case Family::Clayton: {
            if (tau <= 0.0 || tau >= 1.0) {
                throw std::domain_error("tau_to_param: Clayton needs tau in (0,1)");
            }
            const double theta = 2.0 * tau / (1.0 - tau);
            if (theta > kClaytonThetaMax) {
                throw std::domain_error("tau_to_param: Clayton theta out of admissible range");
            }
            return theta;
        }
        case Family::Gumbel: {
            if (tau <= 0.0 || tau >= 1.0) {
                throw std::domain_error("tau_to_param: Gumbel needs tau in (0,1)");
            }
            const double theta = 1.0 / (1.0 - tau);
            if (theta > kGumbelThetaMax) {
                throw std::domain_error("tau_to_param: Gumbel theta out of admissible range");
            }
            return theta;
        }
        case Family::Gaussian: {
            if (tau <= -1.0 || tau >= 1.0) {
                throw std::domain_error("tau_to_param: Gaussian needs tau in (-1,1)");
            }
            const double rho = std::sin(1.5707963267948966 * tau);
            if (std::fabs(rho) > kGaussianRhoMax) {
                throw std::domain_error("tau_to_param: Gaussian rho out of admissible range");
            }
            return rho;
        }
        case Family::Frank: {
            const double sign = (tau < 0.0) ? -1.0 : 1.0;
            const double at = std::fabs(tau);
            if (at < param_to_tau({Family::Frank, Rotation::None}, kFrankIndepEps)) {
                return 0.0; // below the independence epsilon: snap to the limit
            }
            if (at >= param_to_tau({Family::Frank, Rotation::None}, kFrankThetaMax)) {
                throw std::domain_error("tau_to_param: Frank tau out of attainable range");
            }
            double lo = kFrankIndepEps, hi = kFrankThetaMax;
            for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (param_to_tau({Family::Frank, Rotation::None}, mid) < at) lo = mid;
                else hi = mid;
            }
            return sign * 0.5 * (lo + hi);
        }
    }
    throw std::domain_error("tau_to_param: unknown family");
}

double param_to_tau(FamilyTag tag, double theta) {
    switch (tag.family) {
        case Family::Independence: return 0.0;
        case Family::Clayton: return theta / (theta + 2.0);
        case Family::Gumbel: return 1.0 - 1.0 / theta;
        case Family::Gaussian: return 2.0 / 3.141592653589793238 * std::asin(theta);
        case Family::Frank:
            if (std::fabs(theta) < 1e-12) return 0.0;
            return 1.0 - 4.0 / theta * (1.0 - debye1(theta));
    }
    throw std::domain_error("param_to_tau: unknown family");
}

std::string family_name(FamilyTag tag) {
    std::string base;
    switch (tag.family) {
        case Family::Independence: return "independence";
        case Family::Clayton: base = "clayton"; break;
        case Family::Frank: base = "frank"; break;
        case Family::Gumbel: base = "gumbel"; break;
        case Family::Gaussian: base = "gaussian"; break;
    }
    return tag.rotation == Rotation::Half ? "survival-" + base : base;
}

FamilyTag family_from_name(const std::string& name) {
    FamilyTag tag;
    std::string base = name;
    if (base.rfind("survival-", 0) == 0) {
        tag.rotation = Rotation::Half;
        base = base.substr(9);
    }
    if (base == "independence") tag.family = Family::Independence;
    else if (base == "clayton") tag.family = Family::Clayton;
    else if (base == "frank") tag.family = Family::Frank;
    else if (base == "gumbel") tag.family = Family::Gumbel;
    else if (base == "gaussian") tag.family = Family::Gaussian;
    else throw std::domain_error("family_from_name: unknown family '" + name + "'");
    if (tag.family == Family::Independence && tag.rotation == Rotation::Half) {
        throw std::domain_error("family_from_name: independence admits no rotation");
    }
    return tag;
}

} // namespace svct
