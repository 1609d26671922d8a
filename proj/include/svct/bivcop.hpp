#pragma once

#include <string>
#include <utility>

namespace svct {

enum class Family { Independence, Clayton, Frank, Gumbel, Gaussian };

// Only 0 and 180 degree rotations are supported; 180 degrees is the survival
// copula C(u,v) -> u + v - 1 + C(1-u, 1-v).
enum class Rotation { None, Half };

struct FamilyTag {
    Family family = Family::Independence;
    Rotation rotation = Rotation::None;

    bool operator==(const FamilyTag&) const = default;
};

// Which argument an h-function conditions on:
//   hfunc(c, u, v, CondOn::Second) = dC/dv = P(U <= u | V = v)
//   hfunc(c, u, v, CondOn::First)  = dC/du = P(V <= v | U = u)
enum class CondOn { First, Second };

// Admissible parameter ranges. Each lower bound is the family's independence
// limit; upper bounds cap Kendall's tau at ~0.93 which is far beyond any of
// the study designs. Fits are bracketed on the same ranges.
inline constexpr double kClaytonThetaMax = 28.0;
inline constexpr double kFrankThetaMax = 35.0;
inline constexpr double kGumbelThetaMax = 17.0;
inline constexpr double kGaussianRhoMax = 0.999;

// Parameters closer than this to the independence limit evaluate as exact
// independence (avoids boundary instability in h-function chains).
inline constexpr double kClaytonIndepEps = 1e-8;
inline constexpr double kFrankIndepEps = 1e-5;
inline constexpr double kGumbelIndepEps = 1e-8;
inline constexpr double kGaussianIndepEps = 1e-10;

// Inputs are clamped into [kUMin, kUMax] at every operation boundary; values
// outside [0,1] (or NaN) are domain errors.
inline constexpr double kUMin = 1e-10;
inline constexpr double kUMax = 1.0 - 1e-10;

// A parametric bivariate copula on the natural parameter scale. Admissibility
// is checked at construction (domain error outside the ranges above); the
// independence limit of each family is admissible and evaluates as exact
// independence.
class BivCopula {
public:
    BivCopula() = default; // independence
    BivCopula(FamilyTag tag, double theta);

    FamilyTag tag() const { return tag_; }
    double theta() const { return theta_; }

    // True for the Independence family and for parametric families within
    // their independence epsilon of the limit.
    bool is_independence() const;

private:
    FamilyTag tag_{};
    double theta_ = 0.0;
};

double cdf(const BivCopula& c, double u, double v);
double log_density(const BivCopula& c, double u, double v);
double density(const BivCopula& c, double u, double v);
double hfunc(const BivCopula& c, double u, double v, CondOn on);

// Inverse of the h-function in its free argument: hinv(c, p, w, CondOn::Second)
// returns u with hfunc(c, u, w, Second) = p; CondOn::First returns v with
// hfunc(c, w, v, First) = p. Closed form except Gumbel (guarded Newton).
double hinv(const BivCopula& c, double p, double w, CondOn on);

// d/dtheta log c(u,v;theta). Unsupported for independence (no parameter),
// including parametric copulas at their independence limit.
double score(const BivCopula& c, double u, double v);

// Kendall's tau <-> parameter maps. Rotation by 180 degrees preserves tau.
// Frank inverts tau(theta) = 1 - 4/theta * (1 - D1(theta)) by bisection on
// [-kFrankThetaMax, kFrankThetaMax]; |theta| < kFrankIndepEps snaps to 0.
double tau_to_param(FamilyTag tag, double tau);
double param_to_tau(FamilyTag tag, double theta);

std::string family_name(FamilyTag tag);
FamilyTag family_from_name(const std::string& name);

} // namespace svct
