#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "fracprop/errors.hpp"
#include "fracprop/mlf.hpp"
#include "fracprop/oracle.hpp"
#include "fracprop/spectral.hpp"

using namespace fracprop;

namespace {

PolySymbol mono(std::vector<int> alpha, double c) { return PolySymbol::monomial({std::move(alpha)}, c); }

SpectralField cos_field(double L = 2.0 * M_PI, double amp = 1.0) {
    SpectralField f(1, L);
    f.modes[{1}] = 0.5 * amp;
    f.modes[{-1}] = 0.5 * amp;
    f.real = true;
    return f;
}

SpectralField sin_field() {
    // sin x = (e^{ix} - e^{-ix}) / 2i with f = sum c_k e^{-i x xi_k}
    SpectralField f(1, 2.0 * M_PI);
    f.modes[{-1}] = std::complex<double>(0.0, -0.5);
    f.modes[{1}] = std::complex<double>(0.0, 0.5);
    f.real = true;
    return f;
}

TriangularSystem example_pair() {
    TriangularSystem sys(2, 1, FracOrderVector({0.5, 0.7}));
    sys.set_entry(1, 1, mono({2}, 1.0));
    sys.set_entry(2, 1, mono({1}, 1.0));
    sys.set_entry(2, 2, mono({4}, 1.0));
    return sys;
}

TriangularSystem scalar(double beta) {
    TriangularSystem sys(1, 1, FracOrderVector({beta}));
    sys.set_entry(1, 1, mono({2}, 1.0));
    return sys;
}

} // namespace

TEST_CASE("field evaluation follows the e^{-i x xi} convention") {
    const auto s = sin_field();
    for (double x : {0.0, 0.3, 1.7, 4.0}) {
        const std::vector<double> p{x};
        CHECK(std::abs(s(p) - std::sin(x)) < 1e-15);
        CHECK(std::abs(cos_field()(p) - std::cos(x)) < 1e-15);
    }
}

TEST_CASE("grid_to_modes") {
    SUBCASE("constant") {
        GridSamples g{1, 8, 2.0 * M_PI, std::vector<std::complex<double>>(8, 3.0)};
        const auto f = grid_to_modes(g);
        REQUIRE(f.modes.size() == 1);
        CHECK(std::abs(f.at({0}) - 3.0) < 1e-15);
    }
    SUBCASE("cosine on a general period") {
        const double L = 3.0;
        GridSamples g{1, 16, L, {}};
        for (int j = 0; j < 16; ++j) g.values.push_back(std::cos(2.0 * M_PI * (L * j / 16) / L));
        const auto f = grid_to_modes(g);
        REQUIRE(f.modes.size() == 2);
        CHECK(std::abs(f.at({1}) - 0.5) < 1e-15);
        CHECK(std::abs(f.at({-1}) - 0.5) < 1e-15);
    }
    SUBCASE("Nyquist coefficient is split") {
        GridSamples g{1, 4, 2.0 * M_PI, {1.0, -1.0, 1.0, -1.0}};
        const auto f = grid_to_modes(g);
        CHECK(std::abs(f.at({2}) - 0.5) < 1e-15);
        CHECK(std::abs(f.at({-2}) - 0.5) < 1e-15);
        const auto back = modes_to_grid(f, 4);
        for (int j = 0; j < 4; ++j) CHECK(std::abs(back.values[j] - g.values[j]) < 1e-15);
    }
    SUBCASE("random real round trip in two dimensions") {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> n;
        GridSamples g{2, 8, 5.0, {}};
        for (int j = 0; j < 64; ++j) g.values.push_back(n(rng));
        const auto f = grid_to_modes(g);
        CHECK(f.is_hermitian(1e-12));
        const auto back = modes_to_grid(f, 8);
        for (int j = 0; j < 64; ++j) CHECK(std::abs(back.values[j] - g.values[j]) < 1e-12);
        // the flattening puts x1 fastest
        const auto p = g.point(9);
        CHECK(p[0] == doctest::Approx(5.0 / 8));
        CHECK(p[1] == doctest::Approx(5.0 / 8));
        CHECK(g.point(1)[1] == 0.0);
    }
    CHECK_THROWS_AS(grid_to_modes(GridSamples{1, 3, 1.0, {1.0, 2.0, 3.0}}), DimensionError);
    CHECK_THROWS_AS(grid_to_modes(GridSamples{2, 4, 1.0, {1.0, 2.0, 3.0, 4.0}}), DimensionError);
}

TEST_CASE("apply_operator") {
    const double L = 4.0;
    const auto f = cos_field(L);
    const auto g = apply_operator(mono({2}, 1.0), f);
    const double xi = 2.0 * M_PI / L;
    CHECK(std::abs(g.at({1}) - 0.5 * xi * xi) < 1e-15);
    CHECK(apply_operator(mono({2}, 1.0), SpectralField(1, L)).modes.empty());

    // xi1^2 + xi2^2 acts as minus the Laplacian
    SpectralField c(2, 2.0 * M_PI);
    c.modes[{2, 1}] = 0.5;
    c.modes[{-2, -1}] = 0.5;
    PolySymbol lap(2);
    lap.add_term({{2, 0}}, 1.0).add_term({{0, 2}}, 1.0);
    const auto d = apply_operator(lap, c);
    for (double x : {0.1, 1.3}) {
        for (double y : {0.7, 2.9}) {
            const std::vector<double> p{x, y};
            // d^2/dx^2 + d^2/dy^2 of cos(2x + y) = -5 cos(2x + y)
            CHECK(std::abs(d(p) - 5.0 * std::cos(2 * x + y)) < 1e-12);
        }
    }
}

TEST_CASE("sobolev_norm") {
    for (int n : {1, 2}) {
        const double L = 3.0;
        SpectralField one(n, L);
        one.modes[Lattice(n, 0)] = 1.0;
        CHECK(sobolev_norm(one, 2.5) == doctest::Approx(std::pow(L / (2 * M_PI), n / 2.0)));
    }
    // tau = 0 is the L2 norm for the measure dx / (2 pi)^n, by quadrature
    const auto f = cos_field(2.0 * M_PI, 3.0);
    const auto g = modes_to_grid(f, 64);
    double s = 0.0;
    for (const auto& v : g.values) s += std::norm(v);
    s *= (2.0 * M_PI / 64) / (2.0 * M_PI);
    CHECK(sobolev_norm(f, 0.0) == doctest::Approx(std::sqrt(s)).epsilon(1e-14));
    CHECK(sobolev_norm(f, 1.0) == doctest::Approx(std::sqrt(2.0) * sobolev_norm(f, 0.0)).epsilon(1e-14));
}

TEST_CASE("field checks") {
    SpectralField f(1, 1.0);
    f.modes[{1}] = std::complex<double>(1.0, 1.0);
    f.modes[{-1}] = std::complex<double>(1.0, 1.0);
    CHECK_FALSE(f.is_hermitian());
    f.real = true;
    CHECK_THROWS_AS(f.check(), DomainError);
    f.modes[{-1}] = std::complex<double>(1.0, -1.0);
    CHECK_NOTHROW(f.check());
    f.modes[{1, 2}] = 1.0;
    CHECK_THROWS_AS(f.check(), DimensionError);
}

TEST_CASE("ForcingField::at") {
    ForcingField h;
    h.spatial = {cos_field(), SpectralField(1, 2.0 * M_PI)};
    h.profile = {TimeProfile::constant(2.0), TimeProfile::monomial(1.0, 1.0)};
    const auto m = h.at({1}, 2);
    CHECK(m.amplitude[0] == std::complex<double>(0.5));
    CHECK(m.amplitude[1] == std::complex<double>(0.0));
    CHECK(m.profile[0](0.3) == 2.0);
}

TEST_CASE("solve: heat and fractional relaxation") {
    const std::vector<double> times{0.0, 0.5, 1.0};
    const auto heat = solve(scalar(1.0), {cos_field()}, {}, times);
    REQUIRE(heat.fields.size() == 3);
    for (std::size_t t = 0; t < times.size(); ++t) {
        for (double x : {0.0, 1.0, 2.5}) {
            const std::vector<double> p{x};
            CHECK(std::abs(heat.fields[t][0](p) - std::cos(x) * std::exp(-times[t])) < 1e-14);
        }
    }
    const auto half = solve(scalar(0.5), {cos_field()}, {}, {1.0});
    const std::vector<double> p{0.4};
    CHECK(std::abs(half.fields[0][0](p) - 0.427583576155807 * std::cos(0.4)) < 1e-14);
}

TEST_CASE("solve: output at t = 0 is the initial data") {
    const auto sys = example_pair();
    SpectralField a = cos_field();
    a.modes[{3}] = std::complex<double>(0.1, -0.2);
    a.real = false;
    const auto b = solve(sys, {a, sin_field()}, {}, {0.0, 0.5});
    for (const auto& k : b.lattice) {
        CHECK(b.fields[0][0].at(k) == a.at(k));
        CHECK(b.fields[0][1].at(k) == sin_field().at(k));
    }
    CHECK(b.lattice.size() == 3);
}

TEST_CASE("solve: linearity across modes") {
    const auto sys = example_pair();
    SpectralField a(1, 2.0 * M_PI), c(1, 2.0 * M_PI);
    a.modes[{1}] = 1.0;
    c.modes[{2}] = std::complex<double>(0.0, 1.0);
    SpectralField both = a;
    both.modes[{2}] = c.modes[{2}];
    const SpectralField z(1, 2.0 * M_PI);
    ForcingField h;
    h.spatial = {a, c};
    h.profile = {TimeProfile::constant(1.0), TimeProfile::exponential(1.0, -1.0)};
    const auto ua = solve(sys, {a, z}, h, {0.7});
    const auto uc = solve(sys, {c, z}, {}, {0.7});
    const auto ub = solve(sys, {both, z}, h, {0.7});
    for (int comp = 0; comp < 2; ++comp) {
        for (const Lattice& k : {Lattice{1}, Lattice{2}}) {
            CHECK(std::abs(ub.fields[0][comp].at(k) - ua.fields[0][comp].at(k) - uc.fields[0][comp].at(k)) < 1e-10);
        }
    }
}

TEST_CASE("solve: decay for diagonal systems") {
    TriangularSystem sys(2, 1, FracOrderVector({0.3, 0.9}));
    sys.set_entry(1, 1, mono({2}, 1.0));
    sys.set_entry(2, 2, mono({4}, 0.5));
    SpectralField f(1, 2.0 * M_PI);
    f.modes[{1}] = 1.0;
    f.modes[{3}] = 0.5;
    std::vector<double> times;
    for (int i = 0; i <= 40; ++i) times.push_back(0.05 * i * i);
    const auto b = solve(sys, {f, f}, {}, times);
    for (const Lattice& k : {Lattice{1}, Lattice{3}}) {
        for (int comp = 0; comp < 2; ++comp) {
            for (std::size_t t = 1; t < times.size(); ++t)
                CHECK(std::abs(b.fields[t][comp].at(k)) <= std::abs(b.fields[t - 1][comp].at(k)));
        }
    }
}

TEST_CASE("solve: real data stays real for even symbols") {
    TriangularSystem sys(2, 2, FracOrderVector({0.6, 0.9}));
    PolySymbol lap(2);
    lap.add_term({{2, 0}}, 1.0).add_term({{0, 2}}, 1.0);
    sys.set_entry(1, 1, lap);
    sys.set_entry(2, 1, PolySymbol::monomial({{0, 0}}, -0.5));
    PolySymbol bi(2);
    bi.add_term({{4, 0}}, 1.0).add_term({{0, 4}}, 1.0);
    sys.set_entry(2, 2, bi);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n;
    GridSamples g{2, 4, 2.0 * M_PI, {}};
    for (int j = 0; j < 16; ++j) g.values.push_back(n(rng));
    const auto f = grid_to_modes(g);
    ForcingField h;
    h.spatial = {f, f};
    h.profile = {TimeProfile::constant(1.0), TimeProfile::monomial(1.0, 0.5)};
    const auto b = solve(sys, {f, f}, h, {0.3, 1.0});
    for (const auto& row : b.fields) {
        for (const auto& field : row) {
            CHECK(field.real);
            for (const auto& v : modes_to_grid(field, 8).values) CHECK(std::abs(v.imag()) < 1e-10);
        }
    }
}

TEST_CASE("solve: results do not depend on the worker count") {
    const auto sys = example_pair();
    SpectralField f(1, 2.0 * M_PI);
    for (int k = -4; k <= 4; ++k) f.modes[{k}] = 1.0 / (1 + k * k);
    SolveOptions one, three;
    three.workers = 3;
    const auto a = solve(sys, {f, f}, {}, {0.5, 1.0}, one);
    const auto b = solve(sys, {f, f}, {}, {0.5, 1.0}, three);
    CHECK(b.workers == 3);
    for (std::size_t t = 0; t < 2; ++t)
        for (int c = 0; c < 2; ++c) CHECK(a.fields[t][c].modes == b.fields[t][c].modes);
}

TEST_CASE("solve: m = 2 example against the L1 oracle") {
    const auto sys = example_pair();
    const auto r = oracle_comparison_check(sys, {cos_field(), sin_field()}, {}, {1.0}, 16384, 1e-3, 4);
    CHECK(r.status == CheckStatus::Pass);
    CHECK(r.error < 1e-3);
}

TEST_CASE("solve: invalid input") {
    TriangularSystem bad(1, 1, FracOrderVector({1.5}));
    bad.set_entry(1, 1, mono({2}, 1.0));
    CHECK_THROWS_AS(solve(bad, {cos_field()}, {}, {1.0}), InvalidSystemError);
    CHECK_THROWS_AS(solve(scalar(0.5), {cos_field(), cos_field()}, {}, {1.0}), DimensionError);
}

TEST_CASE("check_hypotheses") {
    const auto r1 = check_hypotheses(scalar(0.5), {cos_field()}, {}, 0.6);
    CHECK(r1.tau_exceeds_half_dim);
    CHECK(r1.p_star == 2);
    CHECK(r1.components[0].exponent == doctest::Approx(0.6));

    TriangularSystem two(1, 2, FracOrderVector({0.5}));
    PolySymbol lap(2);
    lap.add_term({{2, 0}}, 1.0).add_term({{0, 2}}, 1.0);
    two.set_entry(1, 1, lap);
    SpectralField f(2, 2.0 * M_PI);
    f.modes[{1, 0}] = 1.0;
    const auto r2 = check_hypotheses(two, {f}, {}, 1.0);
    CHECK_FALSE(r2.tau_exceeds_half_dim);

    const double tau = 0.75;
    const auto r3 = check_hypotheses(example_pair(), {cos_field(), sin_field()}, {}, tau);
    CHECK(r3.p_star == 4);
    REQUIRE(r3.components.size() == 2);
    CHECK(r3.components[0].exponent == doctest::Approx(tau + 2));
    CHECK(r3.components[1].exponent == doctest::Approx(tau));
    CHECK(r3.components[0].phi_norm == doctest::Approx(sobolev_norm(cos_field(), tau + 2)));
}
