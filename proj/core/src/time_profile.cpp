#include "fracprop/time_profile.hpp"

#include <algorithm>
#include <cmath>

namespace fracprop {

double CatalogTerm::operator()(double t) const {
    switch (kind) {
    case Kind::Constant:
        return coeff;
    case Kind::Monomial:
        return param == 0.0 ? coeff : coeff * std::pow(t, param);
    case Kind::Exponential:
        return coeff * std::exp(param * t);
    }
    return 0.0;
}

TimeProfile TimeProfile::constant(double c) {
    return TimeProfile().add({CatalogTerm::Kind::Constant, c, 0.0});
}

TimeProfile TimeProfile::monomial(double c, double gamma) {
    return TimeProfile().add({CatalogTerm::Kind::Monomial, c, gamma});
}

TimeProfile TimeProfile::exponential(double c, double a) {
    return TimeProfile().add({CatalogTerm::Kind::Exponential, c, a});
}

TimeProfile TimeProfile::sampled(TimeGrid grid, std::vector<double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) throw DomainError("forcing samples must be finite");
    }
    TimeProfile p;
    p.samples_.emplace(std::move(grid), std::move(values));
    return p;
}

TimeProfile& TimeProfile::add(CatalogTerm term) {
    if (samples_) throw DomainError("cannot add catalog terms to a sampled profile");
    if (!std::isfinite(term.coeff) || !std::isfinite(term.param)) {
        throw DomainError("catalog parameters must be finite");
    }
    if (term.kind == CatalogTerm::Kind::Monomial && term.param < 0.0) {
        throw DomainError("monomial exponent must be >= 0");
    }
    if (term.coeff != 0.0) terms_.push_back(term);
    return *this;
}

bool TimeProfile::is_zero() const {
    if (samples_) {
        return std::all_of(samples_->values.begin(), samples_->values.end(),
                           [](double v) { return v == 0.0; });
    }
    return terms_.empty();
}

double TimeProfile::operator()(double t) const {
    if (!(t >= 0.0)) throw DomainError("forcing evaluated at negative time");
    if (samples_) {
        const auto nodes = samples_->grid.nodes();
        if (t > nodes.back()) throw DomainError("forcing evaluated beyond its sample grid");
        auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
        if (it == nodes.end()) return samples_->values.back();
        const std::size_t k = static_cast<std::size_t>(it - nodes.begin());
        const double w = (t - nodes[k - 1]) / (nodes[k] - nodes[k - 1]);
        return (1.0 - w) * samples_->values[k - 1] + w * samples_->values[k];
    }
    double sum = 0.0;
    for (const auto& term : terms_) sum += term(t);
    return sum;
}

bool ModeForcing::is_zero() const {
    for (std::size_t k = 0; k < amplitude.size(); ++k) {
        if (amplitude[k] != 0.0 && !profile[k].is_zero()) return false;
    }
    return true;
}

std::vector<double> ModeForcing::kinks(double t) const {
    std::vector<double> out;
    for (std::size_t k = 0; k < profile.size(); ++k) {
        if (amplitude[k] == 0.0 || !profile[k].is_sampled()) continue;
        for (double s : profile[k].samples()->grid.nodes()) {
            if (s > 0.0 && s < t) out.push_back(s);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void ModeForcing::eval(double t, std::span<std::complex<double>> out) const {
    if (out.size() != amplitude.size() || profile.size() != amplitude.size()) {
        throw DimensionError("forcing component count mismatch");
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = amplitude[k] == 0.0 ? 0.0 : amplitude[k] * profile[k](t);
    }
}

} // namespace fracprop
