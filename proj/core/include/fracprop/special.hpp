#pragma once

namespace fracprop {

/// 1/Gamma(x); exactly zero at the poles x = 0, -1, -2, ...
double rgamma(double x);

/// Gamma(x) for x away from the poles.
double gamma_fn(double x);

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) noexcept;
    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

} // namespace fracprop
