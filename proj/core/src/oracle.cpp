#include "fracprop/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <Eigen/Core>
#include <unsupported/Eigen/MatrixFunctions>

#include "fracprop/errors.hpp"
#include "fracprop/quadrature.hpp"
#include "fracprop/special.hpp"

namespace fracprop {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

const char* to_string(CheckStatus s) {
    switch (s) {
    case CheckStatus::Pass:
        return "pass";
    case CheckStatus::Fail:
        return "fail";
    case CheckStatus::Diagnostic:
        return "diagnostic";
    }
    return "?";
}

bool VerificationReport::passed() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

void VerificationReport::sort() {
    std::stable_sort(checks.begin(), checks.end(),
                     [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
}

std::vector<std::complex<double>> OdeSolution::interpolate(double t) const {
    const auto nodes = grid.nodes();
    if (t < 0.0 || t > nodes.back()) throw DomainError("interpolation outside the oracle grid");
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(nodes.begin(), nodes.end(), t) - nodes.begin());
    std::vector<std::complex<double>> out(m);
    if (k >= nodes.size()) {
        for (int c = 0; c < m; ++c) out[c] = at(nodes.size() - 1, c);
        return out;
    }
    const double w = (t - nodes[k - 1]) / (nodes[k] - nodes[k - 1]);
    for (int c = 0; c < m; ++c) out[c] = (1.0 - w) * at(k - 1, c) + w * at(k, c);
    return out;
}

std::vector<OdeSolution> ode_oracle_batch(const TriangularSystem& sys,
                                          std::span<const double> xi,
                                          const std::vector<OdeScenario>& scenarios, double T,
                                          int steps, double grading) {
    using cd = std::complex<double>;
    if (steps < 16) throw DimensionError("ode_oracle needs at least 16 steps");
    const int m = sys.m();
    const std::size_t S = scenarios.size();
    for (const auto& sc : scenarios) {
        if (static_cast<int>(sc.phi.size()) != m || static_cast<int>(sc.forcing.size()) != m) {
            throw DimensionError("scenario size differs from the system");
        }
    }
    std::vector<double> beta(m), lambda(m), A(static_cast<std::size_t>(m) * m, 0.0);
    for (int k = 0; k < m; ++k) {
        beta[k] = sys.beta(k + 1);
        if (!(beta[k] > 0.0 && beta[k] <= 1.0)) throw DomainError("order outside (0,1]");
        for (int j = 0; j <= k; ++j) A[k * m + j] = eval_symbol(sys.entry(k + 1, j + 1), xi);
        lambda[k] = A[k * m + k];
    }
    const double beta_min = *std::min_element(beta.begin(), beta.end());
    const TimeGrid grid = TimeGrid::graded(T, steps, grading > 0.0 ? grading : default_grading(beta_min));
    const auto t = grid.nodes();
    const std::size_t N = grid.steps();

    // distinct fractional orders share one weight row per step
    std::vector<double> orders;
    for (double b : beta) {
        if (b < 1.0 && std::find(orders.begin(), orders.end(), b) == orders.end()) {
            orders.push_back(b);
        }
    }
    std::vector<std::vector<int>> members(orders.size());
    for (int k = 0; k < m; ++k) {
        for (std::size_t g = 0; g < orders.size(); ++g) {
            if (beta[k] == orders[g]) members[g].push_back(k);
        }
    }

    const std::size_t width = static_cast<std::size_t>(m) * S;  // [component][scenario]
    std::vector<cd> incr((N + 1) * width, 0.0);
    std::vector<cd> v((N + 1) * width, 0.0);
    for (int k = 0; k < m; ++k) {
        for (std::size_t s = 0; s < S; ++s) v[k * S + s] = scenarios[s].phi[k];
    }

    // gaps[i] = log(1 - tau_i / (t_n - t_{i-1})): with steep grading the early
    // steps are far below the resolution of t_n, so the weight difference
    // (t_n - t_{i-1})^p - (t_n - t_i)^p is formed through expm1, and the powers
    // follow by the same factor
    std::vector<double> gaps(N + 1), inv_tau(N + 1, 0.0);
    for (std::size_t i = 1; i <= N; ++i) inv_tau[i] = 1.0 / (t[i] - t[i - 1]);
    std::vector<cd> hist(width), hv(m);
    std::vector<double> bnn(m);
    for (std::size_t n = 1; n <= N; ++n) {
        std::fill(hist.begin(), hist.end(), 0.0);
        const double tau_n = t[n] - t[n - 1];
        if (!orders.empty()) {
            for (std::size_t i = 1; i < n; ++i) {
                gaps[i] = std::log1p(-(t[i] - t[i - 1]) / (t[n] - t[i - 1]));
            }
        }
        for (std::size_t g = 0; g < orders.size(); ++g) {
            const double b = orders[g];
            const double c = rgamma(2.0 - b);
            double power = std::pow(t[n], 1.0 - b);  // (t_n - t_{i-1})^{1-b}
            for (std::size_t i = 1; i < n; ++i) {
                const double e = std::expm1((1.0 - b) * gaps[i]);
                const double w = -power * e * c * inv_tau[i];
                power += power * e;
                const cd* d = incr.data() + i * width;
                for (int k : members[g]) {
                    cd* hk = hist.data() + k * S;
                    const cd* dk = d + k * S;
                    for (std::size_t s = 0; s < S; ++s) hk[s] += w * dk[s];
                }
            }
            for (int k : members[g]) bnn[k] = std::pow(tau_n, 1.0 - b) * c / tau_n;
        }
        for (int k = 0; k < m; ++k) {
            if (beta[k] == 1.0) bnn[k] = 1.0 / tau_n;
        }
        cd* vn = v.data() + n * width;
        const cd* vp = v.data() + (n - 1) * width;
        cd* dn = incr.data() + n * width;
        for (std::size_t s = 0; s < S; ++s) {
            scenarios[s].forcing.eval(t[n], hv);
            for (int k = 0; k < m; ++k) {
                cd rhs = hv[k] - hist[k * S + s] + bnn[k] * vp[k * S + s];
                for (int j = 0; j < k; ++j) rhs -= A[k * m + j] * vn[j * S + s];
                vn[k * S + s] = rhs / (bnn[k] + lambda[k]);
                dn[k * S + s] = vn[k * S + s] - vp[k * S + s];
            }
        }
    }

    std::vector<OdeSolution> out;
    for (std::size_t s = 0; s < S; ++s) {
        OdeSolution sol{grid, std::vector<cd>((N + 1) * m), m};
        for (std::size_t n = 0; n <= N; ++n) {
            for (int k = 0; k < m; ++k) sol.values[n * m + k] = v[n * width + k * S + s];
        }
        out.push_back(std::move(sol));
    }
    return out;
}

OdeSolution ode_oracle(const TriangularSystem& sys, std::span<const double> xi,
                       std::span<const std::complex<double>> phi_hat, const ModeForcing& h_hat,
                       double T, int steps, double grading) {
    std::vector<OdeScenario> sc{{{phi_hat.begin(), phi_hat.end()}, h_hat}};
    return std::move(ode_oracle_batch(sys, xi, sc, T, steps, grading).front());
}

CheckResult residual_check(const TriangularSystem& sys, const SolutionBundle& bundle,
                           const ForcingField& h, int levels, double min_ratio) {
    const auto start = clock_type::now();
    CheckResult res;
    res.name = "residual";
    res.anchor = "Cauchy problem D^B U + A(D) U = H holds pointwise";
    if (levels < 1) throw DimensionError("residual check needs at least one halving");
    const TimeGrid fine = TimeGrid::from_nodes(bundle.times);
    const std::size_t stride_max = std::size_t{1} << levels;
    if (fine.steps() % stride_max != 0 || fine.steps() / stride_max < 2) {
        throw DimensionError("bundle time grid is not refinable " + std::to_string(levels) +
                             " times (steps must be a multiple of " +
                             std::to_string(2 * stride_max) + ")");
    }
    const int m = sys.m();
    const double beta_max = sys.betas().max();
    const double threshold = std::max(std::pow(2.0, 1.0 - beta_max), min_ratio);
    SpectralField shape(sys.n(), bundle.fields.front().front().period);

    std::vector<double> sup(levels + 1, 0.0);
    std::vector<std::complex<double>> hv(m);
    for (const auto& k : bundle.lattice) {
        const auto xi = shape.xi(k);
        const ModeForcing forcing =
            h.empty() ? ModeForcing{std::vector<std::complex<double>>(m, 0.0),
                                    std::vector<TimeProfile>(m)}
                      : h.at(k, m);
        for (int l = 0; l <= levels; ++l) {
            const std::size_t stride = std::size_t{1} << l;
            const TimeGrid grid = fine.subsample(stride);
            std::vector<std::vector<std::complex<double>>> u(m);
            std::vector<ComplexSampledFunction> d;
            for (int i = 0; i < m; ++i) {
                for (std::size_t n = 0; n < fine.size(); n += stride) {
                    u[i].push_back(bundle.fields[n][i].at(k));
                }
                d.push_back(caputo_l1(ComplexSampledFunction(grid, u[i]), sys.beta(i + 1)));
            }
            const std::size_t coarse = stride_max / stride;
            for (std::size_t n = coarse; n < grid.size(); n += coarse) {
                forcing.eval(grid[n], hv);
                for (int i = 0; i < m; ++i) {
                    std::complex<double> r = d[i].values[n] - hv[i];
                    for (int j = 0; j <= i; ++j) {
                        r += eval_symbol(sys.entry(i + 1, j + 1), xi) * u[j][n];
                    }
                    sup[l] = std::max(sup[l], std::abs(r));
                }
            }
        }
    }

    bool ok = true;
    std::ostringstream detail;
    detail << "sup residual by level (fine to coarse):";
    for (int l = 0; l <= levels; ++l) detail << ' ' << fmt(sup[l]);
    detail << "; ratios:";
    for (int l = 0; l < levels; ++l) {
        const double ratio = sup[l] > 0.0 ? sup[l + 1] / sup[l] : INFINITY;
        detail << ' ' << fmt(ratio);
        if (!(ratio >= threshold)) ok = false;
    }
    detail << "; required ratio >= " << fmt(threshold);
    detail << "; samples are used as given, without interpolation";
    res.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
    res.error = sup[0];
    res.tolerance = threshold;
    res.values = sup;
    res.detail = detail.str();
    res.seconds = seconds_since(start);
    return res;
}

CheckResult duhamel_equivalence_check(const TriangularSystem& sys, std::span<const double> xi,
                                      const ModeForcing& h_hat, double t, double tol) {
    const auto start = clock_type::now();
    CheckResult res;
    res.name = "duhamel_equivalence";
    res.anchor = "int S'(eta) H(t-eta) = int S(eta) d^{1-B} H(t-eta)";
    const FrequencyPropagator prop(sys, xi, {.tol = std::min(1e-8, tol)});
    const auto a = prop.duhamel(t, h_hat);
    const auto b = prop.duhamel_alt(t, h_hat);
    double err = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        err = std::max(err, std::abs(a[k] - b[k]));
        res.values.push_back(a[k].real());
        res.values.push_back(b[k].real());
    }
    res.error = err;
    res.tolerance = tol;
    res.status = err <= tol ? CheckStatus::Pass : CheckStatus::Fail;
    res.detail = "max componentwise difference " + fmt(err) + " at t = " + fmt(t);
    res.seconds = seconds_since(start);
    return res;
}

double laplace_transform_numeric(double beta, double lambda, double s) {
    if (!(s > 0.0)) throw DomainError("Laplace variable must be positive");
    const MLKernelSpec spec{beta, lambda};
    spec.check();
    const double exponent = beta == 1.0 ? 0.0 : beta - 1.0;
    const double T = 40.0 / s;
    GradedOptions opts;
    opts.levels = 60;
    opts.nodes = 24;
    return integrate_graded(
        [&](double t) { return std::exp(-s * t) * ml_kernel(spec, t); }, 0.0, T, exponent, opts);
}

CheckResult laplace_identity_check(double beta, double lambda, std::span<const double> s_samples,
                                   double tol) {
    const auto start = clock_type::now();
    CheckResult res;
    res.name = "laplace_identity";
    res.anchor = "L[t^{b-1} E_{b,b}(-lambda t^b)](s) = 1/(s^b + lambda)";
    double err = 0.0;
    for (double s : s_samples) {
        const double exact = 1.0 / (std::pow(s, beta) + lambda);
        const double num = laplace_transform_numeric(beta, lambda, s);
        err = std::max(err, std::abs(num - exact) / std::abs(exact));
        res.values.push_back(num);
    }
    res.error = err;
    res.tolerance = tol;
    res.status = err <= tol ? CheckStatus::Pass : CheckStatus::Fail;
    res.detail = "beta = " + fmt(beta) + ", lambda = " + fmt(lambda) +
                 ", max relative error " + fmt(err);
    res.seconds = seconds_since(start);
    return res;
}

CheckResult bound_probe_lemma5(const TriangularSystem& sys, int i, int q, double epsilon,
                               std::span<const double> xi_grid, std::span<const double> t_grid,
                               bool prime) {
    const auto start = clock_type::now();
    const int m = sys.m();
    if (i < 1 || i > m || q < 1 || q > m) throw DimensionError("probe indices out of range");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0,1)");
    if (xi_grid.size() < 2 || t_grid.empty()) throw DimensionError("degenerate probe grid");
    for (double x : xi_grid) {
        if (!(x > 0.0)) throw DomainError("xi grid must exclude 0");
    }
    for (double t : t_grid) {
        if (!(t > 0.0)) throw DomainError("t grid must exclude 0");
    }

    PropagatorTerm term;
    for (int r = m; r >= i; --r) term.path.indices.push_back(r);
    term.sign = (m - i) % 2 == 0 ? 1 : -1;
    for (int r = m; r > i; --r) term.coefficient.emplace_back(r, r - 1);
    for (int r = i + 1; r <= m; ++r) term.chain.push_back(r);
    term.head = i;

    double beta_sum = 0.0;
    for (int j = i + 1; j <= m; ++j) beta_sum += sys.beta(j);
    const double t_exp =
        prime ? epsilon * (beta_sum + sys.beta(i)) : epsilon * beta_sum - sys.beta(i);
    const double xi_exp = sys.p_star() - sys.order(i, i) + (m - i) * epsilon;

    const std::size_t half = (xi_grid.size() + 1) / 2;
    double best = 0.0, best_half = 0.0;
    for (std::size_t a = 0; a < xi_grid.size(); ++a) {
        std::vector<double> xi(sys.n(), 0.0);
        xi[0] = xi_grid[a];
        const FrequencyPropagator prop(sys, xi);
        const double coeff = term.coeff(sys, xi);
        const double aqq = eval_symbol(sys.entry(q, q), xi);
        for (double t : t_grid) {
            const double Q = coeff == 0.0 ? 0.0 : coeff * prop.chain_value(term, t, prime);
            const double ratio =
                std::abs(aqq * Q) / (std::pow(xi_grid[a], xi_exp) * std::pow(t, t_exp));
            if (!std::isfinite(ratio)) {
                throw ToleranceError("bound probe overflowed", ratio, 0.0);
            }
            best = std::max(best, ratio);
            if (a < half) best_half = std::max(best_half, ratio);
        }
    }
    CheckResult res;
    res.name = std::string(prime ? "bound_probe_sprime" : "bound_probe_s") + "_i" +
               std::to_string(i) + "_q" + std::to_string(q);
    res.anchor = prime ? "|A_qq S'_{m,m-i,0}| <= C |xi|^{p*-l_ii+(m-i)eps} eta^{eps sum_{j>=i} beta_j}"
                       : "|A_qq Q_{m,m-i,0}| <= C |xi|^{p*-l_ii+(m-i)eps} t^{eps sum_{j>i} beta_j - beta_i}";
    res.status = CheckStatus::Diagnostic;
    res.error = best;
    res.values = {best, best_half};
    const bool plateau = best <= 1.2 * best_half;
    res.detail = "max ratio " + fmt(best) + " (lower half of xi grid " + fmt(best_half) + "), " +
                 (plateau ? "plateau" : "still growing") + ", eps = " + fmt(epsilon);
    res.seconds = seconds_since(start);
    return res;
}

std::vector<double> matrix_exponential(std::span<const double> M, int m) {
    const std::size_t mm = static_cast<std::size_t>(m) * m;
    if (M.size() != mm) throw DimensionError("matrix size mismatch");
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor E = Eigen::Map<const RowMajor>(M.data(), m, m).exp();
    return {E.data(), E.data() + mm};
}

std::vector<double> triangular_expm(const TriangularSystem& sys, std::span<const double> xi,
                                    double t) {
    const int m = sys.m();
    std::vector<double> M(static_cast<std::size_t>(m) * m, 0.0);
    for (int k = 1; k <= m; ++k) {
        for (int j = 1; j <= k; ++j) M[(k - 1) * m + (j - 1)] = -t * eval_symbol(sys.entry(k, j), xi);
    }
    return matrix_exponential(M, m);
}

CheckResult oracle_comparison_check(const TriangularSystem& sys, const std::vector<SpectralField>& phi,
                                    const ForcingField& h, const std::vector<double>& times,
                                    int steps, double tol, int max_modes) {
    const auto start = clock_type::now();
    CheckResult res;
    res.name = "oracle_comparison";
    res.anchor = "per-frequency solution of D^B v + A(xi) v = h, v(0) = phi";
    const int m = sys.m();
    std::vector<Lattice> lattice;
    for (const auto& f : phi) {
        for (const auto& [k, c] : f.modes) lattice.push_back(k);
    }
    for (const auto& f : h.spatial) {
        for (const auto& [k, c] : f.modes) lattice.push_back(k);
    }
    std::sort(lattice.begin(), lattice.end());
    lattice.erase(std::unique(lattice.begin(), lattice.end()), lattice.end());
    if (static_cast<int>(lattice.size()) > max_modes) lattice.resize(max_modes);
    const double T = *std::max_element(times.begin(), times.end());

    SolveOptions sopts;
    const auto bundle = solve(sys, phi, h, times, sopts);
    double worst = 0.0;
    SpectralField shape(sys.n(), phi.front().period);
    for (const auto& k : lattice) {
        std::vector<std::complex<double>> phi_hat(m);
        for (int i = 0; i < m; ++i) phi_hat[i] = phi[i].at(k);
        const ModeForcing forcing =
            h.empty() ? ModeForcing{std::vector<std::complex<double>>(m, 0.0),
                                    std::vector<TimeProfile>(m)}
                      : h.at(k, m);
        const auto sol = ode_oracle(sys, shape.xi(k), phi_hat, forcing, T > 0.0 ? T : 1.0, steps);
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            const auto ref = sol.interpolate(times[ti]);
            double diff = 0.0, scale = 0.0;
            for (int i = 0; i < m; ++i) {
                const auto u = bundle.fields[ti][i].at(k);
                diff = std::max(diff, std::abs(u - ref[i]));
                scale = std::max({scale, std::abs(ref[i]), std::abs(u)});
            }
            const double rel = scale > 0.0 ? diff / scale : diff;
            worst = std::max(worst, rel);
        }
    }
    res.error = worst;
    res.tolerance = tol;
    res.status = worst <= tol ? CheckStatus::Pass : CheckStatus::Fail;
    res.detail = std::to_string(lattice.size()) + " modes, " + std::to_string(steps) +
                 " L1 steps, max relative error " + fmt(worst);
    res.seconds = seconds_since(start);
    return res;
}

} // namespace fracprop
