#include "doctest.h"

#include <cmath>
#include <vector>

#include "fracprop/errors.hpp"
#include "fracprop/mlf.hpp"
#include "fracprop/special.hpp"

#include "oracles.hpp"

using namespace fracprop;

TEST_CASE("mittag_leffler reference values") {
    CHECK(mittag_leffler(1.0, 1.0, -1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(mittag_leffler(0.5, 1.0, 0.0) == 1.0);
    CHECK(std::abs(mittag_leffler(0.5, 1.0, -1.0) - 0.427583576155807) < 1e-14);
    // e * erfc(1)
    CHECK(std::abs(mittag_leffler(0.5, 1.0, -1.0) - std::exp(1.0) * std::erfc(1.0)) < 1e-14);
    CHECK(mittag_leffler(0.7, 1.3, 0.0) == doctest::Approx(1.0 / std::tgamma(1.3)).epsilon(1e-14));
}

TEST_CASE("mittag_leffler against the high-precision series") {
    for (double beta : {0.1, 0.25, 0.5, 0.75, 1.0}) {
        for (double mu : {beta, 1.0, 1.7}) {
            for (double x : {0.0, -0.1, -0.5, -0.99, -1.0}) {
                CAPTURE(beta);
                CAPTURE(mu);
                CAPTURE(x);
                CHECK(std::abs(mittag_leffler(beta, mu, x) - oracle::ml_series(beta, mu, x)) < 1e-13);
            }
        }
    }
}

TEST_CASE("middle zone against the high-precision series") {
    // the series oracle needs x^{1/beta} moderate to stay within 100 digits
    for (double beta : {0.6, 0.8, 1.0}) {
        for (double mu : {beta, 1.0}) {
            for (double x : {-1.5, -3.0, -7.0, -12.0}) {
                CAPTURE(beta);
                CAPTURE(mu);
                CAPTURE(x);
                CHECK(std::abs(mittag_leffler(beta, mu, x) - oracle::ml_series(beta, mu, x)) < 1e-12);
            }
        }
    }
}

TEST_CASE("asymptotic zone against the high-precision expansion") {
    for (double beta : {0.1, 0.3, 0.5, 0.9}) {
        for (double x : {-1e3, -1e5, -1e8}) {
            CAPTURE(beta);
            CAPTURE(x);
            CHECK(std::abs(mittag_leffler(beta, 1.0, x) - oracle::ml_asymptotic(beta, 1.0, x)) < 1e-12);
            CHECK(std::abs(mittag_leffler(beta, beta, x) - oracle::ml_asymptotic(beta, beta, x)) < 1e-12);
        }
    }
}

TEST_CASE("zone boundaries agree between adjacent algorithms") {
    for (double beta : {0.2, 0.4, 0.6, 0.8, 0.95}) {
        for (double mu : {beta, 1.0}) {
            CAPTURE(beta);
            CAPTURE(mu);
            CHECK(std::abs(ml_series(beta, mu, -1.0) - ml_contour(beta, mu, -1.0)) < 1e-10);
            const double X = -ml_asymptotic_threshold(beta);
            CHECK(std::abs(ml_contour(beta, mu, X) - ml_asymptotic(beta, mu, X)) < 1e-10);
        }
    }
}

TEST_CASE("zone selection") {
    CHECK(ml_zone(0.5, -0.5) == MLZone::Series);
    CHECK(ml_zone(0.5, -50.0) == MLZone::Contour);
    CHECK(ml_zone(0.5, -2e3) == MLZone::Asymptotic);
    CHECK(ml_asymptotic_threshold(0.9) == doctest::Approx(std::pow(10.0, 2.0 / 0.9)));
    CHECK(ml_asymptotic_threshold(0.3) == 1e3);
}

TEST_CASE("ml_kernel values") {
    CHECK(ml_kernel({1.0, 2.0}, 0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(ml_kernel({0.5, 0.0}, 4.0) == doctest::Approx(0.282094791773878).epsilon(1e-13));
    // t^{-1/2} E_{1/2,1/2}(-1) at t = 1
    const double ref = oracle::ml_series(0.5, 0.5, -1.0);
    CHECK(std::abs(ml_kernel({0.5, 1.0}, 1.0) - ref) < 1e-13);
    // 1/sqrt(pi) - e erfc(1)
    CHECK(std::abs(ref - (1.0 / std::sqrt(M_PI) - std::exp(1.0) * std::erfc(1.0))) < 1e-14);
    CHECK(std::abs(ref - 0.136606007391949) < 1e-14);
    CHECK(ml_relaxation({0.5, 1.0}, 1.0) == doctest::Approx(0.427583576155807).epsilon(1e-13));
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(mittag_leffler(0.0, 1.0, -1.0), DomainError);
    CHECK_THROWS_AS(mittag_leffler(1.2, 1.0, -1.0), DomainError);
    CHECK_THROWS_AS(mittag_leffler(0.5, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(ml_kernel({0.5, -1.0}, 1.0), DomainError);
}

TEST_CASE("E_beta(-t) is positive and strictly decreasing") {
    const auto ts = log_grid(1e-4, 1e6, 1200);
    for (double beta : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
        CAPTURE(beta);
        CHECK(mittag_leffler(beta, 1.0, 0.0) == 1.0);
        double prev = 1.0;
        bool ok = true;
        for (double t : ts) {
            const double v = mittag_leffler(beta, 1.0, -t);
            if (beta == 1.0 && v == 0.0) break;  // e^{-t} underflows
            ok = ok && v > 0.0 && v < prev;
            prev = v;
        }
        CHECK(ok);
    }
}

TEST_CASE("bound probes") {
    const std::vector<double> zero{0.0};
    CHECK(ml_bound_probe(1.0, zero) == 1.0);
    const std::vector<double> few{0.0, 1.0, 10.0, 100.0};
    CHECK(ml_bound_probe(1.0, few) == 1.0);
    auto ts = log_grid(1e-3, 1e6, 2000);
    ts.insert(ts.begin(), 0.0);
    for (double beta : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
        const double v = ml_bound_probe(beta, ts);
        CHECK(std::isfinite(v));
        CHECK(v >= 1.0);
        CHECK(v < 10.0);
    }
    for (double eps : {0.25, 0.5, 0.75}) {
        for (double lambda : {0.5, 1.0, 10.0}) {
            const double r = ml_kernel_ratio_probe(0.5, lambda, eps, log_grid(1e-6, 1e6, 600));
            CHECK(std::isfinite(r));
            CHECK(r < 10.0);
        }
    }
}

TEST_CASE("reciprocal gamma") {
    CHECK(rgamma(0.0) == 0.0);
    CHECK(rgamma(-3.0) == 0.0);
    CHECK(rgamma(0.5) == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-14));
    CompensatedSum s;
    s.add(1.0);
    s.add(1e-17);
    s.add(-1.0);
    CHECK(s.value() == doctest::Approx(1e-17));
}
