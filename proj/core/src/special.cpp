#include "fracprop/special.hpp"

#include <cmath>

namespace fracprop {

namespace {

// sin(pi x) with exact zeros at the integers.
double sin_pi(double x) {
    const double r = x - 2.0 * std::floor(0.5 * x);  // r in [0, 2)
    if (r == 0.0 || r == 1.0) {
        return 0.0;
    }
    return std::sin(M_PI * r);
}

} // namespace

double rgamma(double x) {
    if (x <= 0.0 && x == std::nearbyint(x)) {
        return 0.0;
    }
    if (x < -150.0) {
        // reflection: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
        return sin_pi(x) * std::exp(std::lgamma(1.0 - x)) / M_PI;
    }
    // tgamma overflows past ~171.6; go through the log there.
    if (x > 170.0) {
        return std::exp(-std::lgamma(x));
    }
    return 1.0 / std::tgamma(x);
}

double gamma_fn(double x) { return std::tgamma(x); }

void CompensatedSum::add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
        carry_ += (sum_ - t) + v;
    } else {
        carry_ += (v - t) + sum_;
    }
    sum_ = t;
}

} // namespace fracprop
