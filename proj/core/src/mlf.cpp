#include "fracprop/mlf.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "fracprop/errors.hpp"
#include "fracprop/laplace.hpp"
#include "fracprop/special.hpp"

namespace fracprop {

namespace {

void check_beta(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw DomainError("Mittag-Leffler order beta must lie in (0,1], got " +
                          std::to_string(beta));
    }
}

void check_args(double beta, double mu, double x) {
    check_beta(beta);
    if (!(mu > 0.0)) {
        throw DomainError("Mittag-Leffler parameter mu must be positive, got " +
                          std::to_string(mu));
    }
    if (!(x <= 0.0)) {
        throw DomainError("Mittag-Leffler argument must be <= 0 (unsupported domain), got " +
                          std::to_string(x));
    }
}

} // namespace

void MLKernelSpec::check() const {
    check_beta(beta);
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("kernel decay rate lambda must be finite and >= 0");
    }
}

double ml_asymptotic_threshold(double beta, const MLZoneConfig& cfg) {
    return std::min(std::pow(10.0, 2.0 / beta), cfg.asymptotic_cap);
}

MLZone ml_zone(double beta, double x, const MLZoneConfig& cfg) {
    const double ax = std::abs(x);
    if (ax <= cfg.series_radius) return MLZone::Series;
    if (ax >= ml_asymptotic_threshold(beta, cfg)) return MLZone::Asymptotic;
    return MLZone::Contour;
}

double ml_series(double beta, double mu, double x) {
    CompensatedSum sum;
    double power = 1.0;
    for (int k = 0; k < 20000; ++k) {
        const double term = power * rgamma(beta * k + mu);
        sum.add(term);
        // Gamma is increasing past 2, so once terms are negligible they stay so.
        if (beta * k + mu > 2.0 &&
            std::abs(term) <= 1e-18 * std::max(1.0, std::abs(sum.value()))) {
            break;
        }
        power *= x;
        if (power == 0.0) break;
    }
    return sum.value();
}

double ml_contour(double beta, double mu, double x, int nodes) {
    using cd = std::complex<double>;
    const ParabolicContour contour{nodes};
    return contour.invert(
        [&](cd s) {
            const cd log_s = std::log(s);
            const cd s_beta = std::exp(beta * log_s);
            return std::exp((beta - mu) * log_s) / (s_beta - x);
        },
        1.0);
}

double ml_asymptotic(double beta, double mu, double x) {
    CompensatedSum sum;
    const double inv_x = 1.0 / x;
    double power = 1.0;
    double last = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 1000; ++k) {
        power *= inv_x;
        const double term = power * rgamma(mu - beta * k);
        if (term == 0.0) continue;  // Gamma pole
        const double mag = std::abs(term);
        if (mag > last) break;       // smallest-term truncation
        sum.add(-term);
        last = mag;
        if (mag <= 1e-18 * std::abs(sum.value())) break;
    }
    return sum.value();
}

double mittag_leffler(double beta, double mu, double x, const MLZoneConfig& cfg) {
    check_args(beta, mu, x);
    if (x == 0.0) return rgamma(mu);
    if (beta == 1.0 && mu == 1.0) return std::exp(x);
    switch (ml_zone(beta, x, cfg)) {
    case MLZone::Series:
        return ml_series(beta, mu, x);
    case MLZone::Contour:
        return ml_contour(beta, mu, x, cfg.contour_nodes);
    case MLZone::Asymptotic:
        return ml_asymptotic(beta, mu, x);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double ml_relaxation(const MLKernelSpec& spec, double t) {
    spec.check();
    if (t < 0.0) throw DomainError("relaxation function requires t >= 0");
    if (t == 0.0 || spec.lambda == 0.0) return 1.0;
    if (spec.beta == 1.0) return std::exp(-spec.lambda * t);
    return mittag_leffler(spec.beta, 1.0, -spec.lambda * std::pow(t, spec.beta));
}

double ml_kernel(const MLKernelSpec& spec, double t) {
    spec.check();
    if (!(t > 0.0)) throw DomainError("ml_kernel requires t > 0");
    if (spec.beta == 1.0) return std::exp(-spec.lambda * t);
    const double t_pow = std::pow(t, spec.beta);
    if (spec.lambda == 0.0) return t_pow / t * rgamma(spec.beta);
    return t_pow / t * mittag_leffler(spec.beta, spec.beta, -spec.lambda * t_pow);
}

double ml_bound_probe(double beta, std::span<const double> t_samples) {
    if (t_samples.empty()) throw DimensionError("ml_bound_probe needs at least one sample");
    double best = -std::numeric_limits<double>::infinity();
    for (double t : t_samples) {
        if (t < 0.0) throw DomainError("ml_bound_probe samples must be >= 0");
        best = std::max(best, (1.0 + t) * mittag_leffler(beta, 1.0, -t));
    }
    return best;
}

double ml_kernel_ratio_probe(double beta, double lambda, double eps,
                             std::span<const double> t_samples) {
    if (t_samples.empty()) throw DimensionError("ratio probe needs at least one sample");
    if (!(lambda > 0.0)) throw DomainError("ratio probe requires lambda > 0");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("ratio probe requires eps in (0,1)");
    double best = 0.0;
    for (double t : t_samples) {
        const double bound = std::pow(lambda, eps - 1.0) * std::pow(t, eps * beta - 1.0);
        best = std::max(best, ml_kernel({beta, lambda}, t) / bound);
    }
    return best;
}

std::vector<double> log_grid(double a, double b, int n) {
    if (!(a > 0.0 && b >= a) || n < 1) throw DomainError("log_grid needs 0 < a <= b and n >= 1");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i) {
        out[i] = std::exp(la + (lb - la) * i / (n - 1));
    }
    out.back() = b;
    return out;
}

} // namespace fracprop
