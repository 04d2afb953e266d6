#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "fracprop/errors.hpp"
#include "fracprop/mlf.hpp"
#include "fracprop/oracle.hpp"

#include "oracles.hpp"

using namespace fracprop;
using C = std::complex<double>;

namespace {

PolySymbol mono(std::vector<int> alpha, double c) { return PolySymbol::monomial({std::move(alpha)}, c); }

TriangularSystem scalar(double beta, double c = 1.0) {
    TriangularSystem sys(1, 1, FracOrderVector({beta}));
    sys.set_entry(1, 1, mono({2}, c));
    return sys;
}

TriangularSystem example_pair(std::vector<double> betas = {0.5, 0.7}) {
    TriangularSystem sys(2, 1, FracOrderVector(std::move(betas)));
    sys.set_entry(1, 1, mono({2}, 1.0));
    sys.set_entry(2, 1, mono({1}, 1.0));
    sys.set_entry(2, 2, mono({4}, 1.0));
    return sys;
}

ModeForcing zero_forcing(int m) { return {std::vector<C>(m, 0.0), std::vector<TimeProfile>(m)}; }

SpectralField cos_field() {
    SpectralField f(1, 2.0 * M_PI);
    f.modes[{1}] = 0.5;
    f.modes[{-1}] = 0.5;
    f.real = true;
    return f;
}

std::vector<double> graded_times(double T, int steps, double beta_min) {
    const auto g = TimeGrid::graded(T, steps, default_grading(beta_min));
    return {g.nodes().begin(), g.nodes().end()};
}

ForcingField unit_forcing(int m) {
    ForcingField h;
    for (int i = 0; i < m; ++i) {
        h.spatial.push_back(cos_field());
        h.profile.push_back(TimeProfile::constant(1.0));
    }
    return h;
}

} // namespace

TEST_CASE("ode_oracle: classical scalar case") {
    const std::vector<double> xi{1.5};
    const std::vector<C> phi{1.0};
    const auto sol = ode_oracle(scalar(1.0), xi, phi, zero_forcing(1), 1.0, 2048);
    // backward Euler is first order
    CHECK(std::abs(sol.values.back() - std::exp(-2.25)) < 1e-3);
    const auto coarse = ode_oracle(scalar(1.0), xi, phi, zero_forcing(1), 1.0, 1024);
    CHECK(std::abs(coarse.values.back() - std::exp(-2.25)) >
          1.5 * std::abs(sol.values.back() - std::exp(-2.25)));
}

TEST_CASE("ode_oracle: fractional relaxation") {
    const std::vector<double> xi{1.0};
    const std::vector<C> phi{1.0};
    const auto sol = ode_oracle(scalar(0.5), xi, phi, zero_forcing(1), 1.0, 16384);
    CHECK(std::abs(sol.values.back() - 0.427583576155807) < 1e-4);
    CHECK(sol.values.front() == C(1.0));
    const auto mid = sol.interpolate(0.25);
    CHECK(std::abs(mid[0] - mittag_leffler(0.5, 1.0, -0.5)) < 1e-3);
}

TEST_CASE("ode_oracle: steep grading for small orders") {
    // grading 2 / beta puts the first nodes near 1e-99
    const std::vector<double> xi{1.0};
    const std::vector<C> phi{1.0};
    const auto sol = ode_oracle(scalar(0.085), xi, phi, zero_forcing(1), 1.0, 8192);
    for (double t : {0.25, 1.0}) {
        CHECK(std::abs(sol.interpolate(t)[0] - oracle::ml_series(0.085, 1.0, -std::pow(t, 0.085))) < 1e-5);
    }
}

TEST_CASE("ode_oracle: classical 2x2 closed form") {
    // v1' = -a v1, v2' = -c v1 - b v2
    const double a = 1.0, b = 3.0, c = 2.0;
    TriangularSystem sys(2, 1, FracOrderVector({1.0, 1.0}));
    sys.set_entry(1, 1, mono({2}, a));
    sys.set_entry(2, 1, mono({1}, c));
    sys.set_entry(2, 2, mono({2}, b));
    const std::vector<double> xi{1.0};
    const std::vector<C> phi{1.0, 0.5};
    const double t = 1.0;
    const double v1 = std::exp(-a * t);
    const double v2 = 0.5 * std::exp(-b * t) - c * (std::exp(-a * t) - std::exp(-b * t)) / (b - a);
    const auto fine = ode_oracle(sys, xi, phi, zero_forcing(2), t, 1 << 16);
    CHECK(std::abs(fine.at(fine.grid.steps(), 0) - v1) < 1e-5);
    CHECK(std::abs(fine.at(fine.grid.steps(), 1) - v2) < 1e-5);
    // first-order convergence: the Richardson extrapolation is far more accurate
    const auto half = ode_oracle(sys, xi, phi, zero_forcing(2), t, 1 << 15);
    const C r2 = 2.0 * fine.at(fine.grid.steps(), 1) - half.at(half.grid.steps(), 1);
    CHECK(std::abs(r2 - v2) < 1e-6);
}

TEST_CASE("ode_oracle: forcing and batching") {
    const auto sys = example_pair();
    const std::vector<double> xi{1.0};
    OdeScenario homo{{1.0, 0.0}, zero_forcing(2)};
    OdeScenario forced{{0.0, 0.0}, {{1.0, 0.0}, {TimeProfile::constant(1.0), TimeProfile()}}};
    const auto batch = ode_oracle_batch(sys, xi, {homo, forced}, 1.0, 4096);
    REQUIRE(batch.size() == 2);
    const auto single = ode_oracle(sys, xi, homo.phi, homo.forcing, 1.0, 4096);
    for (std::size_t i = 0; i < single.values.size(); ++i) CHECK(batch[0].values[i] == single.values[i]);
    // D^{1/2} v + v = 1, v(0) = 0 has v = 1 - E_{1/2}(-t^{1/2})
    CHECK(std::abs(batch[1].at(batch[1].grid.steps(), 0) - (1.0 - 0.427583576155807)) < 1e-3);
}

TEST_CASE("residual_check") {
    SUBCASE("heat") {
        const auto sys = scalar(1.0);
        const auto b = solve(sys, {cos_field()}, {}, graded_times(1.0, 64, 1.0));
        const auto r = residual_check(sys, b, {});
        CHECK(r.status == CheckStatus::Pass);
        CHECK(r.values.size() == 4);
    }
    SUBCASE("fractional pair, homogeneous and forced") {
        const auto sys = example_pair();
        const auto times = graded_times(1.0, 64, 0.5);
        const auto b = solve(sys, {cos_field(), cos_field()}, {}, times);
        const auto r = residual_check(sys, b, {});
        CAPTURE(r.detail);
        CHECK(r.status == CheckStatus::Pass);
        for (std::size_t l = 0; l + 1 < r.values.size(); ++l) CHECK(r.values[l] < r.values[l + 1]);

        const auto h = unit_forcing(2);
        const auto bf = solve(sys, {cos_field(), cos_field()}, h, times);
        const auto rf = residual_check(sys, bf, h);
        CAPTURE(rf.detail);
        CHECK(rf.status == CheckStatus::Pass);

        // a bundle checked against the wrong forcing leaves an O(1) residual
        auto wrong = h;
        wrong.profile[0] = TimeProfile::constant(2.0);
        CHECK(residual_check(sys, bf, wrong).status == CheckStatus::Fail);
    }
    SUBCASE("corrupted bundle") {
        const auto sys = example_pair();
        auto b = solve(sys, {cos_field(), cos_field()}, {}, graded_times(1.0, 64, 0.5));
        b.fields[40][1].modes[{1}] += 0.1;
        const auto r = residual_check(sys, b, {});
        CAPTURE(r.detail);
        CHECK(r.status == CheckStatus::Fail);
    }
    SUBCASE("grid must be refinable") {
        const auto sys = scalar(1.0);
        const auto b = solve(sys, {cos_field()}, {}, graded_times(1.0, 12, 1.0));
        CHECK_THROWS_AS(residual_check(sys, b, {}), DimensionError);
        CHECK_THROWS_AS(residual_check(sys, b, {}, 0), DimensionError);
    }
}

TEST_CASE("laplace_transform_numeric") {
    CHECK(laplace_transform_numeric(1.0, 1.0, 2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
    CHECK(laplace_transform_numeric(0.5, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-8));
    const double ref = 1.0 / (std::pow(2.0, 0.3) + 10.0);
    CHECK(laplace_transform_numeric(0.3, 10.0, 2.0) == doctest::Approx(ref).epsilon(1e-7));
    const std::vector<double> s{0.5, 1.0, 2.0};
    const auto r = laplace_identity_check(0.9, 0.5, s, 1e-6);
    CHECK(r.status == CheckStatus::Pass);
    CHECK(r.values.size() == 3);
}

TEST_CASE("duhamel_equivalence_check") {
    const auto sys = example_pair();
    const std::vector<double> xi{1.0};
    ModeForcing h{{1.0, 0.5}, {TimeProfile::constant(1.0), TimeProfile::monomial(1.0, 1.0)}};
    const auto r = duhamel_equivalence_check(sys, xi, h, 0.8, 1e-4);
    CAPTURE(r.error);
    CHECK(r.status == CheckStatus::Pass);
    CHECK(r.values.size() == 4);
    CHECK(duhamel_equivalence_check(sys, xi, h, 0.8, 0.1 * r.error).status == CheckStatus::Fail);
}

TEST_CASE("bound_probe_lemma5") {
    TriangularSystem sys(2, 1, FracOrderVector({0.6, 0.8}));
    sys.set_entry(1, 1, mono({2}, 1.0));
    sys.set_entry(2, 1, mono({1}, 1.0));
    sys.set_entry(2, 2, mono({2}, 1.0));
    const auto ts = log_grid(1e-3, 1.0, 12);
    const auto xs = log_grid(1.0, 1e3, 16);
    const auto xs2 = log_grid(1.0, 1e3, 32);
    for (bool prime : {false, true}) {
        const auto a = bound_probe_lemma5(sys, 1, 2, 0.5, xs, ts, prime);
        const auto b = bound_probe_lemma5(sys, 1, 2, 0.5, xs2, ts, prime);
        CAPTURE(a.detail);
        CHECK(a.status == CheckStatus::Diagnostic);
        CHECK(std::isfinite(a.error));
        CHECK(a.error > 0.0);
        CHECK(std::abs(a.error - b.error) < 0.2 * b.error);
    }
    const std::vector<double> bad{0.0, 1.0};
    CHECK_THROWS_AS(bound_probe_lemma5(sys, 1, 2, 0.5, bad, ts), DomainError);
    CHECK_THROWS_AS(bound_probe_lemma5(sys, 1, 2, 1.5, xs, ts), DomainError);
    CHECK_THROWS_AS(bound_probe_lemma5(sys, 3, 2, 0.5, xs, ts), DimensionError);
}

TEST_CASE("matrix exponential against the Parlett recurrence") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 1 + trial % 4;
        const auto sys = oracle::random_system(rng, m, 1.0, 1.0);
        const std::vector<double> xi{0.4 + 0.1 * trial};
        for (double t : {0.1, 1.0}) {
            auto A = oracle::frozen_matrix(sys, xi);
            for (auto& x : A) x *= -t;
            const auto ref = oracle::parlett_exp(A, m);
            const auto got = triangular_expm(sys, xi, t);
            for (std::size_t e = 0; e < got.size(); ++e) {
                CHECK(std::abs(got[e] - ref[e]) <= 1e-11 * std::max(1.0, std::abs(ref[e])));
            }
        }
    }
    CHECK_THROWS_AS(matrix_exponential(std::vector<double>(3, 0.0), 2), DimensionError);
}

TEST_CASE("oracle comparison detects perturbed systems") {
    const auto sys = example_pair();
    const std::vector<SpectralField> phi{cos_field(), cos_field()};
    const std::vector<double> times{0.5};
    const auto ok = oracle_comparison_check(sys, phi, {}, times, 4096, 1e-3);
    CAPTURE(ok.detail);
    CHECK(ok.status == CheckStatus::Pass);

    // a 1% change in the coupling moves the solution far beyond the oracle's error
    auto off = example_pair();
    off.set_entry(2, 1, mono({1}, 1.01));
    const std::vector<double> xi{1.0};
    const std::vector<C> ph{1.0, 1.0};
    const auto a = apply_S(sys, 0.5, ph, xi);
    const auto b = apply_S(off, 0.5, ph, xi);
    const auto v = ode_oracle(sys, xi, ph, zero_forcing(2), 0.5, 4096);
    const auto vv = v.interpolate(0.5);
    CHECK(std::abs(a[1] - vv[1]) < 0.2 * std::abs(a[1] - b[1]));
}

TEST_CASE("VerificationReport") {
    VerificationReport rep;
    rep.checks.push_back({"b", "", CheckStatus::Pass});
    rep.checks.push_back({"a", "", CheckStatus::Diagnostic});
    CHECK(rep.passed());
    rep.sort();
    CHECK(rep.checks.front().name == "a");
    rep.checks.push_back({"c", "", CheckStatus::Fail});
    CHECK_FALSE(rep.passed());
    CHECK(std::string(to_string(CheckStatus::Diagnostic)) == "diagnostic");
}
