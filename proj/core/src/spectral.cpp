#include "fracprop/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "fracprop/errors.hpp"

namespace fracprop {

std::vector<double> SpectralField::xi(const Lattice& k) const {
    std::vector<double> out(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) out[i] = 2.0 * M_PI * k[i] / period;
    return out;
}

std::complex<double> SpectralField::at(const Lattice& k) const {
    auto it = modes.find(k);
    return it == modes.end() ? std::complex<double>{} : it->second;
}

bool SpectralField::is_hermitian(double tol) const {
    double scale = 0.0;
    for (const auto& [k, c] : modes) scale = std::max(scale, std::abs(c));
    for (const auto& [k, c] : modes) {
        Lattice neg(k);
        for (auto& v : neg) v = -v;
        if (std::abs(at(neg) - std::conj(c)) > tol * scale) return false;
    }
    return true;
}

void SpectralField::check() const {
    if (n < 1) throw DimensionError("spatial dimension must be positive");
    if (!(period > 0.0) || !std::isfinite(period)) throw DomainError("period must be positive");
    for (const auto& [k, c] : modes) {
        if (static_cast<int>(k.size()) != n) {
            throw DimensionError("lattice vector has the wrong dimension");
        }
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            throw DomainError("mode amplitude is not finite");
        }
    }
    if (real && !is_hermitian(1e-12)) {
        throw DomainError("field flagged real lacks the symmetry c(-k) = conj(c(k))");
    }
}

std::complex<double> SpectralField::operator()(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n) throw DimensionError("point has the wrong dimension");
    std::complex<double> sum = 0.0;
    for (const auto& [k, c] : modes) {
        double phase = 0.0;
        for (int i = 0; i < n; ++i) phase += x[i] * 2.0 * M_PI * k[i] / period;
        sum += c * std::polar(1.0, -phase);
    }
    return sum;
}

std::vector<double> GridSamples::point(std::size_t index) const {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
        x[i] = period * static_cast<double>(index % N) / N;
        index /= N;
    }
    return x;
}

SpectralField grid_to_modes(const GridSamples& samples, double drop) {
    const int n = samples.n;
    const int N = samples.N;
    if (n < 1 || N < 2 || N % 2 != 0) throw DimensionError("grid size N must be even and >= 2");
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= N;
    if (samples.values.size() != total) throw DimensionError("sample count is not N^n");

    using cd = std::complex<double>;
    std::vector<cd> twiddle(N);
    for (int j = 0; j < N; ++j) twiddle[j] = std::polar(1.0, 2.0 * M_PI * j / N);

    const int K = N / 2;
    std::vector<cd> data = samples.values;
    std::vector<std::size_t> dims(n, N);
    for (int axis = 0; axis < n; ++axis) {
        std::size_t stride = 1, outer = 1;
        for (int a = 0; a < axis; ++a) stride *= dims[a];
        for (int a = axis + 1; a < n; ++a) outer *= dims[a];
        std::vector<cd> next(stride * (N + 1) * outer);
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t s = 0; s < stride; ++s) {
                for (int k = -K; k <= K; ++k) {
                    const int kk = ((k % N) + N) % N;
                    cd acc = 0.0;
                    for (int j = 0; j < N; ++j) {
                        acc += data[s + stride * (j + static_cast<std::size_t>(N) * o)] *
                               twiddle[(static_cast<long>(j) * kk) % N];
                    }
                    acc /= static_cast<double>(N);
                    if (k == K || k == -K) acc *= 0.5;
                    next[s + stride * ((k + K) + static_cast<std::size_t>(N + 1) * o)] = acc;
                }
            }
        }
        data = std::move(next);
        dims[axis] = N + 1;
    }

    double scale = 0.0;
    for (const auto& c : data) scale = std::max(scale, std::abs(c));
    SpectralField f(n, samples.period);
    for (std::size_t idx = 0; idx < data.size(); ++idx) {
        if (std::abs(data[idx]) <= drop * scale || data[idx] == 0.0) continue;
        Lattice k(n);
        std::size_t rest = idx;
        for (int i = 0; i < n; ++i) {
            k[i] = static_cast<int>(rest % (N + 1)) - K;
            rest /= (N + 1);
        }
        f.modes.emplace(std::move(k), data[idx]);
    }
    f.real = std::all_of(samples.values.begin(), samples.values.end(),
                         [](const cd& v) { return v.imag() == 0.0; });
    return f;
}

GridSamples modes_to_grid(const SpectralField& f, int N) {
    if (N < 2 || N % 2 != 0) throw DimensionError("grid size N must be even and >= 2");
    GridSamples g;
    g.n = f.n;
    g.N = N;
    g.period = f.period;
    std::size_t total = 1;
    for (int i = 0; i < f.n; ++i) total *= N;
    g.values.resize(total);
    for (std::size_t idx = 0; idx < total; ++idx) g.values[idx] = f(g.point(idx));
    return g;
}

SpectralField apply_operator(const PolySymbol& sym, const SpectralField& f) {
    if (sym.dim() != f.n) throw DimensionError("symbol and field dimensions differ");
    SpectralField out(f.n, f.period);
    for (const auto& [k, c] : f.modes) out.modes.emplace(k, c * eval_symbol(sym, f.xi(k)));
    return out;
}

double sobolev_norm(const SpectralField& f, double tau) {
    double sum = 0.0;
    for (const auto& [k, c] : f.modes) {
        double xi2 = 0.0;
        for (double x : f.xi(k)) xi2 += x * x;
        sum += std::pow(1.0 + xi2, tau) * std::norm(c);
    }
    return std::sqrt(sum * std::pow(f.period / (2.0 * M_PI), f.n));
}

ModeForcing ForcingField::at(const Lattice& k, std::size_t m) const {
    ModeForcing mf;
    mf.amplitude.assign(m, 0.0);
    mf.profile.assign(m, TimeProfile());
    for (std::size_t i = 0; i < spatial.size() && i < m; ++i) {
        mf.amplitude[i] = spatial[i].at(k);
        mf.profile[i] = profile[i];
    }
    return mf;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    workers = std::max(1, std::min<int>(resolve_workers(workers), static_cast<int>(count)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

namespace {

std::string describe_xi(const std::vector<double>& xi) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t i = 0; i < xi.size(); ++i) os << (i ? "," : "") << xi[i];
    os << ')';
    return os.str();
}

} // namespace

SolutionBundle solve(const TriangularSystem& sys, const std::vector<SpectralField>& phi,
                     const ForcingField& h, const std::vector<double>& times,
                     const SolveOptions& options) {
    require_valid(sys);
    const int m = sys.m();
    if (static_cast<int>(phi.size()) != m) {
        throw DimensionError("expected " + std::to_string(m) + " initial fields");
    }
    if (!h.empty() && (static_cast<int>(h.spatial.size()) != m ||
                       h.profile.size() != h.spatial.size())) {
        throw DimensionError("forcing must have one spatial field and profile per component");
    }
    if (times.empty()) throw DimensionError("no output times");
    for (double t : times) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("output times must be >= 0");
    }

    const double period = phi.front().period;
    std::set<Lattice> keys;
    auto absorb = [&](const SpectralField& f) {
        f.check();
        if (f.n != sys.n()) throw DimensionError("field dimension differs from the system");
        if (f.period != period) throw DimensionError("fields must share one period");
        for (const auto& [k, c] : f.modes) keys.insert(k);
    };
    for (const auto& f : phi) absorb(f);
    for (const auto& f : h.spatial) absorb(f);

    SolutionBundle bundle;
    bundle.times = times;
    bundle.lattice.assign(keys.begin(), keys.end());
    bundle.tol = options.tol;
    bundle.workers = resolve_workers(options.workers);
    bundle.seconds_per_mode.assign(bundle.lattice.size(), 0.0);

    const std::size_t nt = times.size();
    const std::size_t nk = bundle.lattice.size();
    std::vector<std::vector<cplx>> values(nk, std::vector<cplx>(nt * m));
    std::vector<std::size_t> term_counts(nk, 0);
    PropagatorOptions popts = options.propagator;
    popts.tol = options.tol;

    SpectralField shape(sys.n(), period);
    parallel_for(nk, bundle.workers, [&](std::size_t idx) {
        const auto start = std::chrono::steady_clock::now();
        const Lattice& k = bundle.lattice[idx];
        const auto xi = shape.xi(k);
        std::vector<cplx> phi_hat(m);
        for (int i = 0; i < m; ++i) phi_hat[i] = phi[i].at(k);
        const ModeForcing forcing = h.empty() ? ModeForcing{std::vector<cplx>(m, 0.0),
                                                            std::vector<TimeProfile>(m)}
                                              : h.at(k, m);
        const FrequencyPropagator prop(sys, xi, popts);
        term_counts[idx] = prop.term_count();
        for (std::size_t ti = 0; ti < nt; ++ti) {
            const double t = times[ti];
            cplx* out = values[idx].data() + ti * m;
            if (t == 0.0) {
                std::copy(phi_hat.begin(), phi_hat.end(), out);
                continue;
            }
            try {
                auto u = prop.apply_S(t, phi_hat);
                if (!forcing.is_zero()) {
                    const auto d = prop.duhamel(t, forcing);
                    for (int i = 0; i < m; ++i) u[i] += d[i];
                }
                std::copy(u.begin(), u.end(), out);
            } catch (const ToleranceError& e) {
                std::ostringstream os;
                os.precision(17);
                os << e.what() << " (xi = " << describe_xi(xi) << ", t = " << t << ")";
                throw ToleranceError(os.str(), e.achieved(), e.requested());
            }
        }
        bundle.seconds_per_mode[idx] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    bundle.term_count = term_counts.empty() ? 0 : term_counts.front();
    bundle.fields.assign(nt, std::vector<SpectralField>(m, SpectralField(sys.n(), period)));
    for (std::size_t ti = 0; ti < nt; ++ti) {
        for (int i = 0; i < m; ++i) {
            auto& f = bundle.fields[ti][i];
            for (std::size_t idx = 0; idx < nk; ++idx) {
                f.modes.emplace(bundle.lattice[idx], values[idx][ti * m + i]);
            }
            f.real = times[ti] == 0.0 ? phi[i].real : f.is_hermitian(1e-10);
        }
    }
    return bundle;
}

HypothesisReport check_hypotheses(const TriangularSystem& sys,
                                  const std::vector<SpectralField>& phi, const ForcingField& h,
                                  double tau, double T, int time_samples) {
    HypothesisReport report;
    report.tau = tau;
    report.n = sys.n();
    report.p_star = sys.p_star();
    report.tau_exceeds_half_dim = tau > 0.5 * sys.n();
    for (int i = 1; i <= sys.m(); ++i) {
        ComponentHypothesis c;
        c.component = i;
        c.exponent = tau + report.p_star - sys.order(i, i);
        if (static_cast<int>(phi.size()) >= i) c.phi_norm = sobolev_norm(phi[i - 1], c.exponent);
        if (static_cast<int>(h.spatial.size()) >= i) {
            const double g = sobolev_norm(h.spatial[i - 1], c.exponent);
            const auto& prof = h.profile[i - 1];
            std::vector<double> ts;
            for (int s = 0; s < time_samples; ++s) {
                ts.push_back(T * s / std::max(1, time_samples - 1));
            }
            if (prof.is_sampled()) {
                for (double t : prof.samples()->grid.nodes()) ts.push_back(t);
            }
            double best = 0.0;
            for (double t : ts) {
                if (prof.is_sampled() && t > prof.samples()->grid.T()) continue;
                best = std::max(best, std::abs(prof(t)));
            }
            c.h_norm_max = best * g;
        }
        report.components.push_back(c);
    }
    return report;
}

} // namespace fracprop
