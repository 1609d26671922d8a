#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "svct/bivcop.hpp"
#include "svct/errors.hpp"
#include "svct/rng.hpp"

#include <cmath>
#include <vector>

using namespace svct;

namespace {

// One representative parameter per family, safely inside the admissible range.
std::vector<BivCopula> representative_copulas() {
    return {
        BivCopula({Family::Clayton, Rotation::None}, 2.0),
        BivCopula({Family::Clayton, Rotation::Half}, 2.0),
        BivCopula({Family::Frank, Rotation::None}, 5.0),
        BivCopula({Family::Frank, Rotation::None}, -4.0),
        BivCopula({Family::Gumbel, Rotation::None}, 2.0),
        BivCopula({Family::Gumbel, Rotation::Half}, 1.7),
        BivCopula({Family::Gaussian, Rotation::None}, 0.6),
        BivCopula({Family::Gaussian, Rotation::None}, -0.4),
    };
}

} // namespace

TEST_CASE("Clayton closed-form anchors at theta = 2") {
    const BivCopula c({Family::Clayton, Rotation::None}, 2.0);
    // C(1/2,1/2) = (2^2 + 2^2 - 1)^(-1/2) = 7^(-1/2)
    CHECK(cdf(c, 0.5, 0.5) == doctest::Approx(1.0 / std::sqrt(7.0)).epsilon(1e-12));
    // dC/dv at (1/2,1/2) = v^(-3) (u^-2 + v^-2 - 1)^(-3/2) = 8 * 7^(-3/2)
    CHECK(hfunc(c, 0.5, 0.5, CondOn::Second) ==
          doctest::Approx(8.0 * std::pow(7.0, -1.5)).epsilon(1e-12));
    // Exchangeable: conditioning on either coordinate is symmetric
    CHECK(hfunc(c, 0.3, 0.7, CondOn::Second) == doctest::Approx(hfunc(c, 0.7, 0.3, CondOn::First)));
}

TEST_CASE("density matches mixed finite difference of the cdf") {
    const double h = 1e-5;
    for (const auto& c : representative_copulas()) {
        for (double u : {0.2, 0.5, 0.8}) {
            for (double v : {0.2, 0.5, 0.8}) {
                const double fd = (cdf(c, u + h, v + h) - cdf(c, u + h, v - h) -
                                   cdf(c, u - h, v + h) + cdf(c, u - h, v - h)) /
                                  (4 * h * h);
                const double cd = density(c, u, v);
                CHECK(std::abs(cd - fd) < 5e-4 * std::max(1.0, cd));
            }
        }
    }
}

TEST_CASE("analytic parameter score matches finite differences") {
    for (const auto& c : representative_copulas()) {
        const double theta = c.theta();
        const double step = 1e-6 * std::max(1.0, std::abs(theta));
        const BivCopula up(c.tag(), theta + step);
        const BivCopula dn(c.tag(), theta - step);
        for (double u : {0.15, 0.5, 0.85}) {
            for (double v : {0.25, 0.6, 0.9}) {
                const double fd = (log_density(up, u, v) - log_density(dn, u, v)) / (2 * step);
                const double an = score(c, u, v);
                CHECK(std::abs(an - fd) < 1e-4 * std::max(1.0, std::abs(an)));
            }
        }
    }
}

TEST_CASE("h-function and inverse round trip") {
    CounterRng rng(CounterRng::derive(42, 0));
    std::uint64_t ctr = 0;
    for (const auto& c : representative_copulas()) {
        for (auto on : {CondOn::First, CondOn::Second}) {
            for (int k = 0; k < 1000; ++k) {
                const double p = rng.unit_at(ctr++);
                const double w = rng.unit_at(ctr++);
                const double free = hinv(c, p, w, on);
                const double back = on == CondOn::Second ? hfunc(c, free, w, CondOn::Second)
                                                         : hfunc(c, w, free, CondOn::First);
                CHECK(std::abs(back - p) < 1e-8);
            }
        }
    }
}

TEST_CASE("density integrates to one") {
    const int g = 200;
    for (const auto& c : representative_copulas()) {
        double total = 0.0;
        for (int a = 0; a < g; ++a) {
            const double u = (a + 0.5) / g;
            for (int b = 0; b < g; ++b) {
                total += density(c, u, (b + 0.5) / g);
            }
        }
        total /= g * g;
        CHECK(total > 0.99);
        CHECK(total < 1.01);
    }
}

TEST_CASE("cdf respects the Frechet bounds and margins") {
    for (const auto& c : representative_copulas()) {
        for (double u : {0.1, 0.4, 0.7, 0.95}) {
            for (double v : {0.05, 0.3, 0.6, 0.9}) {
                const double val = cdf(c, u, v);
                CHECK(val >= std::max(u + v - 1.0, 0.0) - 1e-12);
                CHECK(val <= std::min(u, v) + 1e-12);
            }
            CHECK(cdf(c, u, 1.0 - 1e-10) == doctest::Approx(u).epsilon(1e-6));
        }
    }
}

TEST_CASE("180-degree rotation is the survival copula") {
    const BivCopula base({Family::Clayton, Rotation::None}, 3.0);
    const BivCopula surv({Family::Clayton, Rotation::Half}, 3.0);
    for (double u : {0.2, 0.5, 0.8}) {
        for (double v : {0.3, 0.6, 0.9}) {
            CHECK(cdf(surv, u, v) ==
                  doctest::Approx(u + v - 1.0 + cdf(base, 1 - u, 1 - v)).epsilon(1e-12));
            CHECK(density(surv, u, v) == doctest::Approx(density(base, 1 - u, 1 - v)).epsilon(1e-12));
            CHECK(hfunc(surv, u, v, CondOn::Second) ==
                  doctest::Approx(1.0 - hfunc(base, 1 - u, 1 - v, CondOn::Second)).epsilon(1e-12));
        }
    }
}

TEST_CASE("Kendall tau parameter maps") {
    CHECK(tau_to_param({Family::Clayton, Rotation::None}, 0.4) ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(param_to_tau({Family::Clayton, Rotation::None}, 4.0 / 3.0) ==
          doctest::Approx(0.4).epsilon(1e-12));
    CHECK(tau_to_param({Family::Gumbel, Rotation::None}, 0.4) ==
          doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    CHECK(tau_to_param({Family::Gaussian, Rotation::None}, 0.4) ==
          doctest::Approx(std::sin(0.2 * 3.14159265358979323846)).epsilon(1e-12));
    // Frank has no closed form; literature value for tau = 0.4 is ~4.16
    CHECK(tau_to_param({Family::Frank, Rotation::None}, 0.4) == doctest::Approx(4.16).epsilon(2e-3));
    // Round trip tau -> theta -> tau across families and signs
    for (double tau : {0.05, 0.2, 0.4, 0.6, 0.8}) {
        for (Family f : {Family::Clayton, Family::Frank, Family::Gumbel, Family::Gaussian}) {
            const FamilyTag tag{f, Rotation::None};
            CHECK(param_to_tau(tag, tau_to_param(tag, tau)) == doctest::Approx(tau).epsilon(1e-8));
        }
        const FamilyTag frank{Family::Frank, Rotation::None};
        CHECK(param_to_tau(frank, tau_to_param(frank, -tau)) == doctest::Approx(-tau).epsilon(1e-8));
    }
}

TEST_CASE("independence copula behaviour") {
    const BivCopula indep;
    CHECK(indep.is_independence());
    CHECK(cdf(indep, 0.3, 0.7) == doctest::Approx(0.21).epsilon(1e-14));
    CHECK(density(indep, 0.3, 0.7) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(hfunc(indep, 0.3, 0.7, CondOn::Second) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(hfunc(indep, 0.3, 0.7, CondOn::First) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(hinv(indep, 0.3, 0.7, CondOn::Second) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK_THROWS_AS(score(indep, 0.3, 0.7), unsupported_operation);
    // Families pinned at their independence limit behave the same way
    const BivCopula clayton0({Family::Clayton, Rotation::None}, 0.0);
    CHECK(clayton0.is_independence());
    CHECK_THROWS_AS(score(clayton0, 0.3, 0.7), unsupported_operation);
}

TEST_CASE("arguments outside the unit interval are rejected") {
    const BivCopula c({Family::Clayton, Rotation::None}, 2.0);
    CHECK_THROWS_AS(cdf(c, -0.1, 0.5), std::domain_error);
    CHECK_THROWS_AS(cdf(c, 0.5, 1.2), std::domain_error);
    CHECK_THROWS_AS(hfunc(c, std::nan(""), 0.5, CondOn::First), std::domain_error);
    // Exact 0/1 are clamped, not rejected
    CHECK(std::isfinite(cdf(c, 0.0, 0.5)));
    CHECK(std::isfinite(hfunc(c, 1.0, 0.5, CondOn::Second)));
}

TEST_CASE("family names round trip") {
    for (const auto& c : representative_copulas()) {
        CHECK(family_from_name(family_name(c.tag())) == c.tag());
    }
    CHECK(family_from_name("survival-gumbel") == FamilyTag{Family::Gumbel, Rotation::Half});
    CHECK(family_from_name("independence") == FamilyTag{Family::Independence, Rotation::None});
    CHECK_THROWS(family_from_name("joe"));
}
