#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "fracprop/frac_calculus.hpp"

namespace fracprop {

/// One analytic time factor: coeff, coeff t^gamma (gamma >= 0) or coeff e^{a t}.
struct CatalogTerm {
    enum class Kind { Constant, Monomial, Exponential };
    Kind kind = Kind::Constant;
    double coeff = 0.0;
    double param = 0.0;  ///< gamma for Monomial, a for Exponential

    double operator()(double t) const;
};

/// Scalar time dependence of a forcing component: either a sum of catalog
/// terms or samples on a TimeGrid with linear interpolation.
class TimeProfile {
public:
    TimeProfile() = default;

    static TimeProfile constant(double c);
    static TimeProfile monomial(double c, double gamma);
    static TimeProfile exponential(double c, double a);
    static TimeProfile sampled(TimeGrid grid, std::vector<double> values);

    /// Appends a catalog term; throws DomainError on sampled profiles or
    /// non-finite / out-of-range parameters.
    TimeProfile& add(CatalogTerm term);

    bool is_sampled() const { return samples_.has_value(); }
    bool is_zero() const;
    const std::vector<CatalogTerm>& terms() const { return terms_; }
    const std::optional<SampledFunction>& samples() const { return samples_; }

    /// Throws DomainError for t < 0 or t beyond the sample grid.
    double operator()(double t) const;

private:
    std::vector<CatalogTerm> terms_;
    std::optional<SampledFunction> samples_;
};

/// Forcing at one frequency: h_k(t) = amplitude_k * profile_k(t).
struct ModeForcing {
    std::vector<std::complex<double>> amplitude;
    std::vector<TimeProfile> profile;

    std::size_t size() const { return amplitude.size(); }
    bool is_zero() const;
    /// Sorted interior kinks of sampled profiles in (0, t).
    std::vector<double> kinks(double t) const;
    void eval(double t, std::span<std::complex<double>> out) const;
};

} // namespace fracprop
