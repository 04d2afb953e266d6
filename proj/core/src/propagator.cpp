#include "fracprop/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracprop/errors.hpp"
#include "fracprop/laplace.hpp"
#include "fracprop/quadrature.hpp"

namespace fracprop {

std::vector<Path> enumerate_paths(int k, int j, int m) {
    if (j < 1 || j > k || (m > 0 && k > m)) {
        throw DimensionError("path endpoints out of range: (" + std::to_string(k) + "," +
                             std::to_string(j) + ")");
    }
    if (k == j) return {Path{{k}}};
    const int interior = k - j - 1;
    if (interior > 30) throw DimensionError("too many interior indices");
    std::vector<Path> out;
    out.reserve(std::size_t{1} << interior);
    for (unsigned mask = 0; mask < (1u << interior); ++mask) {
        Path p;
        p.indices.push_back(k);
        for (int b = interior - 1; b >= 0; --b) {
            if (mask & (1u << b)) p.indices.push_back(j + 1 + b);
        }
        p.indices.push_back(j);
        out.push_back(std::move(p));
    }
    return out;
}

double PropagatorTerm::coeff(const TriangularSystem& sys, std::span<const double> xi) const {
    double c = sign;
    for (const auto& [i, j] : coefficient) c *= eval_symbol(sys.entry(i, j), xi);
    return c;
}

std::vector<MLKernelSpec> PropagatorTerm::chain_specs(const TriangularSystem& sys,
                                                      std::span<const double> xi) const {
    std::vector<MLKernelSpec> out;
    for (int tau : chain) out.push_back({sys.beta(tau), eval_symbol(sys.entry(tau, tau), xi)});
    return out;
}

MLKernelSpec PropagatorTerm::head_spec(const TriangularSystem& sys,
                                       std::span<const double> xi) const {
    return {sys.beta(head), eval_symbol(sys.entry(head, head), xi)};
}

std::vector<PropagatorTerm> build_terms(const TriangularSystem& sys, int k, int j) {
    std::vector<PropagatorTerm> out;
    for (auto& path : enumerate_paths(k, j, sys.m())) {
        PropagatorTerm term;
        term.sign = path.length() % 2 == 0 ? 1 : -1;
        bool zero = false;
        for (std::size_t r = 1; r < path.indices.size(); ++r) {
            const int a = path.indices[r - 1];
            const int b = path.indices[r];
            if (sys.entry(a, b).is_zero()) zero = true;
            term.coefficient.emplace_back(a, b);
        }
        if (zero) continue;
        // read from the bottom of the path up: A21*A32 rather than A32*A21
        std::reverse(term.coefficient.begin(), term.coefficient.end());
        term.chain.assign(path.indices.begin(), path.indices.end() - 1);
        std::sort(term.chain.begin(), term.chain.end());
        term.head = j;
        term.path = std::move(path);
        out.push_back(std::move(term));
    }
    return out;
}

std::string term_structure(const PropagatorTerm& term, bool prime) {
    std::ostringstream os;
    os << (term.sign > 0 ? '+' : '-');
    for (std::size_t r = 0; r < term.coefficient.size(); ++r) {
        if (r) os << '*';
        os << 'A' << term.coefficient[r].first << term.coefficient[r].second;
    }
    if (!term.coefficient.empty()) os << '*';
    os << '[';
    for (std::size_t r = 0; r < term.chain.size(); ++r) {
        if (r) os << ',';
        os << 'k' << term.chain[r];
    }
    os << "]*" << (prime ? "K" : "E") << term.head;
    return os.str();
}

void require_valid(const TriangularSystem& sys, int sphere_samples) {
    const auto report = validate_system(sys, sphere_samples);
    if (report.valid) return;
    std::string msg = "invalid system:";
    for (const auto& v : report.violations) msg += " " + v.message + ";";
    throw InvalidSystemError(msg);
}

FrequencyPropagator::FrequencyPropagator(const TriangularSystem& sys,
                                         std::span<const double> xi, PropagatorOptions options)
    : options_(options), m_(sys.m()) {
    if (m_ > options_.max_m) {
        throw DimensionError("system size " + std::to_string(m_) + " exceeds max_m " +
                             std::to_string(options_.max_m));
    }
    if (static_cast<int>(xi.size()) != sys.n()) {
        throw DimensionError("frequency has the wrong dimension");
    }
    for (int j = 1; j <= m_; ++j) {
        const double b = sys.beta(j);
        if (!(b > 0.0 && b <= 1.0)) throw DomainError("order outside (0,1]");
        const double lam = eval_symbol(sys.entry(j, j), xi);
        if (!(lam >= 0.0) || !std::isfinite(lam)) {
            throw DomainError("diagonal symbol is negative or not finite at this frequency");
        }
        beta_.push_back(b);
        lambda_.push_back(lam);
    }
    terms_.resize(static_cast<std::size_t>(m_) * (m_ - 1) / 2);
    for (int k = 2; k <= m_; ++k) {
        for (int j = 1; j < k; ++j) {
            auto& list = terms_[slot(k - 1, j - 1)];
            for (auto& term : build_terms(sys, k, j)) {
                EvalTerm e;
                e.coeff = term.coeff(sys, xi);
                if (e.coeff == 0.0) continue;
                e.head = j - 1;
                for (int tau : term.chain) e.chain.push_back(tau - 1);
                e.term = std::move(term);
                list.push_back(std::move(e));
            }
        }
    }
}

std::size_t FrequencyPropagator::slot(int k, int j) const {
    return static_cast<std::size_t>(k) * (k - 1) / 2 + j;
}

std::size_t FrequencyPropagator::term_count() const {
    std::size_t n = static_cast<std::size_t>(m_);
    for (const auto& list : terms_) n += list.size();
    return n;
}

std::vector<cplx> FrequencyPropagator::laplace_matrix(cplx s, bool prime) const {
    std::vector<cplx> r(m_), head(m_);
    const cplx log_s = std::log(s);
    for (int j = 0; j < m_; ++j) {
        const cplx sb = std::exp(beta_[j] * log_s);
        r[j] = 1.0 / (sb + lambda_[j]);
        head[j] = prime ? r[j] : sb / s * r[j];
    }
    std::vector<cplx> out(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int k = 0; k < m_; ++k) {
        out[k * m_ + k] = head[k];
        for (int j = 0; j < k; ++j) {
            cplx sum = 0.0;
            for (const auto& e : terms_[slot(k, j)]) {
                cplx v = e.coeff * head[e.head];
                for (int tau : e.chain) v *= r[tau];
                sum += v;
            }
            out[k * m_ + j] = sum;
        }
    }
    return out;
}

double FrequencyPropagator::chain_value(const PropagatorTerm& term, double t, bool prime) const {
    const MLKernelSpec head{beta_[term.head - 1], lambda_[term.head - 1]};
    std::vector<MLKernelSpec> specs;
    for (int tau : term.chain) specs.push_back({beta_[tau - 1], lambda_[tau - 1]});
    if (options_.method == ChainMethod::Quadrature) {
        return conv_chain(specs, !prime, head, t, options_.tol);
    }
    const ParabolicContour contour{options_.contour_nodes};
    return contour.invert(
        [&](cplx s) {
            const cplx log_s = std::log(s);
            const cplx sb = std::exp(head.beta * log_s);
            cplx v = prime ? 1.0 / (sb + head.lambda) : sb / s / (sb + head.lambda);
            for (const auto& k : specs) v /= std::exp(k.beta * log_s) + k.lambda;
            return v;
        },
        t);
}

std::vector<double> FrequencyPropagator::matrix(double t, bool prime) const {
    const std::size_t mm = static_cast<std::size_t>(m_);
    std::vector<double> out(mm * mm, 0.0);
    for (int k = 0; k < m_; ++k) {
        const MLKernelSpec spec{beta_[k], lambda_[k]};
        out[k * mm + k] = prime ? ml_kernel(spec, t) : ml_relaxation(spec, t);
    }
    if (m_ == 1) return out;

    if (options_.method == ChainMethod::Quadrature) {
        for (int k = 1; k < m_; ++k) {
            for (int j = 0; j < k; ++j) {
                const auto& list = terms_[slot(k, j)];
                double sum = 0.0;
                for (const auto& e : list) {
                    sum += e.coeff * chain_value(e.term, t, prime);
                }
                out[k * mm + j] = sum;
            }
        }
        return out;
    }

    const std::size_t count = mm * (mm - 1) / 2;
    std::vector<double> lower(count);
    const ParabolicContour contour{options_.contour_nodes};
    std::vector<cplx> r(mm), head(mm);
    contour.invert_many(
        [&](cplx s, std::span<cplx> values) {
            const cplx log_s = std::log(s);
            for (int j = 0; j < m_; ++j) {
                const cplx sb = std::exp(beta_[j] * log_s);
                r[j] = 1.0 / (sb + lambda_[j]);
                head[j] = prime ? r[j] : sb / s * r[j];
            }
            for (std::size_t idx = 0; idx < count; ++idx) {
                cplx sum = 0.0;
                for (const auto& e : terms_[idx]) {
                    cplx v = e.coeff * head[e.head];
                    for (int tau : e.chain) v *= r[tau];
                    sum += v;
                }
                values[idx] = sum;
            }
        },
        t, lower);
    for (int k = 1; k < m_; ++k) {
        for (int j = 0; j < k; ++j) out[k * mm + j] = lower[slot(k, j)];
    }
    return out;
}

std::vector<double> FrequencyPropagator::S(double t) const {
    if (!(t >= 0.0)) throw DomainError("S(t) needs t >= 0");
    if (t == 0.0) {
        std::vector<double> id(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int k = 0; k < m_; ++k) id[k * m_ + k] = 1.0;
        return id;
    }
    return matrix(t, false);
}

std::vector<double> FrequencyPropagator::Sprime(double eta) const {
    if (!(eta > 0.0)) throw DomainError("S'(eta) needs eta > 0");
    return matrix(eta, true);
}

double FrequencyPropagator::s_entry(int k, int j, double t) const {
    if (k < 1 || j < 1 || k > m_ || j > m_) throw DimensionError("entry index out of range");
    if (k < j) return 0.0;
    if (t == 0.0) return k == j ? 1.0 : 0.0;
    if (k == j) return ml_relaxation({beta_[k - 1], lambda_[k - 1]}, t);
    return S(t)[(k - 1) * m_ + (j - 1)];
}

double FrequencyPropagator::sprime_entry(int k, int j, double eta) const {
    if (k < 1 || j < 1 || k > m_ || j > m_) throw DimensionError("entry index out of range");
    if (k < j) return 0.0;
    if (!(eta > 0.0)) throw DomainError("S'(eta) needs eta > 0");
    if (k == j) return ml_kernel({beta_[k - 1], lambda_[k - 1]}, eta);
    return Sprime(eta)[(k - 1) * m_ + (j - 1)];
}

std::vector<cplx> FrequencyPropagator::apply_S(double t, std::span<const cplx> phi) const {
    if (static_cast<int>(phi.size()) != m_) throw DimensionError("phi_hat has wrong length");
    if (t == 0.0) return {phi.begin(), phi.end()};
    const auto s = S(t);
    std::vector<cplx> out(m_, 0.0);
    for (int k = 0; k < m_; ++k) {
        for (int j = 0; j <= k; ++j) out[k] += s[k * m_ + j] * phi[j];
    }
    return out;
}

namespace {

// Panel edges on [0, 1]: geometric toward both ends, plus extra breakpoints.
std::vector<double> two_sided_edges(int levels, std::vector<double> extra) {
    std::vector<double> e{0.0, 0.5, 1.0};
    for (int i = 1; i < levels; ++i) {
        const double w = std::ldexp(0.5, -i);
        e.push_back(w);
        e.push_back(1.0 - w);
    }
    for (double x : extra) {
        if (x > 0.0 && x < 1.0) e.push_back(x);
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return e;
}

} // namespace

std::vector<cplx> FrequencyPropagator::duhamel(double t, const ModeForcing& h) const {
    if (static_cast<int>(h.size()) != m_) throw DimensionError("forcing has wrong length");
    if (!(t >= 0.0)) throw DomainError("Duhamel term needs t >= 0");
    std::vector<cplx> out(m_, 0.0);
    if (t == 0.0 || h.is_zero()) return out;

    // eta = t u^q removes the eta^{beta-1} singularity of S'
    const double beta_min = *std::min_element(beta_.begin(), beta_.end());
    const double q = std::ceil(2.0 / beta_min);
    std::vector<double> kinks;
    for (double sigma : h.kinks(t)) kinks.push_back(std::pow((t - sigma) / t, 1.0 / q));
    const auto edges = two_sided_edges(30, std::move(kinks));

    const auto fine = cached_gauss_legendre(16);
    const auto coarse = cached_gauss_legendre(8);
    std::vector<cplx> hv(m_), est(m_, 0.0);
    auto accumulate = [&](const QuadratureRule& rule, double lo, double hi,
                          std::vector<cplx>& acc) {
        const double c = 0.5 * (hi + lo);
        const double r = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double u = c + r * rule.nodes[i];
            const double eta = t * std::pow(u, q);
            if (!(eta > 0.0)) continue;
            const double jac = t * q * std::pow(u, q - 1.0);
            const auto sp = Sprime(eta);
            h.eval(std::max(0.0, t - eta), hv);
            const double w = rule.weights[i] * r * jac;
            for (int k = 0; k < m_; ++k) {
                cplx v = 0.0;
                for (int j = 0; j <= k; ++j) v += sp[k * m_ + j] * hv[j];
                acc[k] += w * v;
            }
        }
    };
    for (std::size_t p = 1; p < edges.size(); ++p) {
        accumulate(*fine, edges[p - 1], edges[p], out);
        accumulate(*coarse, edges[p - 1], edges[p], est);
    }
    double err = 0.0, scale = 1.0;
    for (int k = 0; k < m_; ++k) {
        err = std::max(err, std::abs(out[k] - est[k]));
        scale = std::max(scale, std::abs(out[k]));
    }
    if (err > options_.tol * scale) {
        throw ToleranceError("Duhamel quadrature did not reach tolerance at t = " +
                                 std::to_string(t),
                             err, options_.tol);
    }
    return out;
}

std::vector<cplx> FrequencyPropagator::duhamel_alt(double t, const ModeForcing& h,
                                                   int cells) const {
    if (static_cast<int>(h.size()) != m_) throw DimensionError("forcing has wrong length");
    if (!(t >= 0.0)) throw DomainError("Duhamel term needs t >= 0");
    if (cells < 8 || cells % 2 != 0) throw DimensionError("cell count must be even and >= 8");
    std::vector<cplx> out(m_, 0.0);
    if (t == 0.0 || h.is_zero()) return out;

    // sigma-grid graded toward 0 (RL derivative singularity) and toward t
    // (S(eta) ~ eta^beta near eta = 0)
    const double beta_min = *std::min_element(beta_.begin(), beta_.end());
    const double r = default_grading(beta_min);
    const int half = cells / 2;
    std::vector<double> nodes(cells + 1);
    for (int i = 0; i <= half; ++i) {
        const double x = 0.5 * t * std::pow(static_cast<double>(i) / half, r);
        nodes[i] = x;
        nodes[cells - i] = t - x;
    }
    nodes[half] = 0.5 * t;
    const TimeGrid grid = TimeGrid::from_nodes(nodes);

    // cell means of d^{1-beta_j} h_j
    std::vector<std::vector<cplx>> g(m_);
    for (int j = 0; j < m_; ++j) {
        g[j].assign(cells, 0.0);
        if (h.amplitude[j] == 0.0 || h.profile[j].is_zero()) continue;
        std::vector<double> samples(cells + 1);
        for (int i = 0; i <= cells; ++i) samples[i] = h.profile[j](nodes[i]);
        const auto means =
            rl_derivative_cells(SampledFunction(grid, std::move(samples)), 1.0 - beta_[j]);
        for (int c = 0; c < cells; ++c) g[j][c] = h.amplitude[j] * means[c];
    }

    const auto gl = cached_gauss_legendre(4);
    for (int c = 0; c < cells; ++c) {
        const double lo = nodes[c], hi = nodes[c + 1];
        const double mid = 0.5 * (lo + hi), rad = 0.5 * (hi - lo);
        std::vector<double> w(static_cast<std::size_t>(m_) * m_, 0.0);
        for (std::size_t q = 0; q < gl->nodes.size(); ++q) {
            const double sigma = mid + rad * gl->nodes[q];
            const auto s = S(std::max(0.0, t - sigma));
            for (std::size_t e = 0; e < w.size(); ++e) w[e] += gl->weights[q] * rad * s[e];
        }
        for (int k = 0; k < m_; ++k) {
            for (int j = 0; j <= k; ++j) out[k] += w[k * m_ + j] * g[j][c];
        }
    }
    return out;
}

double s_entry(const TriangularSystem& sys, int k, int j, double t, std::span<const double> xi,
               double tol) {
    require_valid(sys);
    return FrequencyPropagator(sys, xi, {.tol = tol}).s_entry(k, j, t);
}

double sprime_entry(const TriangularSystem& sys, int k, int j, double eta,
                    std::span<const double> xi, double tol) {
    require_valid(sys);
    return FrequencyPropagator(sys, xi, {.tol = tol}).sprime_entry(k, j, eta);
}

std::vector<cplx> apply_S(const TriangularSystem& sys, double t, std::span<const cplx> phi_hat,
                          std::span<const double> xi, double tol) {
    require_valid(sys);
    return FrequencyPropagator(sys, xi, {.tol = tol}).apply_S(t, phi_hat);
}

std::vector<cplx> duhamel_term(const TriangularSystem& sys, double t, const ModeForcing& h_hat,
                               std::span<const double> xi, double tol) {
    require_valid(sys);
    return FrequencyPropagator(sys, xi, {.tol = tol}).duhamel(t, h_hat);
}

std::vector<cplx> duhamel_alt(const TriangularSystem& sys, double t, const ModeForcing& h_hat,
                              std::span<const double> xi, double tol) {
    require_valid(sys);
    return FrequencyPropagator(sys, xi, {.tol = tol}).duhamel_alt(t, h_hat);
}

} // namespace fracprop
