#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fracprop/errors.hpp"
#include "fracprop/mlf.hpp"

namespace fracprop::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int effective_workers(const CommonOptions& opts, const RunConfig& cfg) {
    if (opts.workers) return std::max(1, *opts.workers);
    if (const char* env = std::getenv("FRACPROP_WORKERS")) {
        try {
            const int w = std::stoi(env);
            if (w > 0) return w;
        } catch (const std::exception&) {
        }
    }
    return cfg.workers;
}

namespace {

fs::path output_dir(const CommonOptions& opts, const RunConfig& cfg) {
    return opts.output ? *opts.output : cfg.output_dir;
}

void print_violations(const ValidationReport& report, std::ostream& os) {
    for (const auto& v : report.violations) {
        os << "  violation";
        if (v.i || v.j) os << " (" << v.i << "," << v.j << ")";
        os << ": " << v.message << '\n';
    }
}

// compact number for check names
std::string tag(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

ModeForcing zero_forcing(int m) {
    return {std::vector<cplx>(m, 0.0), std::vector<TimeProfile>(m)};
}

std::vector<double> first_frequency(const RunConfig& cfg) {
    if (cfg.verify.xi) return *cfg.verify.xi;
    const int n = cfg.system.n();
    for (const auto& f : cfg.phi) {
        for (const auto& [k, c] : f.modes) {
            if (std::any_of(k.begin(), k.end(), [](int v) { return v != 0; })) return f.xi(k);
        }
    }
    std::vector<double> xi(n, 0.0);
    xi[0] = 1.0;
    return xi;
}

} // namespace

int cmd_validate(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = load_config(opts.config);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    }
    const auto report = validate_system(cfg.system, 256);
    out << (report.valid ? "VALID" : "INVALID") << '\n';
    out << "m = " << cfg.system.m() << ", n = " << cfg.system.n() << '\n';
    out << "p* = " << report.p_star << '\n';
    out << "q =";
    for (int q : report.q) out << ' ' << q;
    out << '\n';
    out << "ellipticity minimum per diagonal entry:";
    for (double e : report.ellipticity_min) out << ' ' << num(e);
    out << '\n';
    print_violations(report, out);
    out << "petrovsky probe: " << num(petrovsky_probe(cfg.system, 256)) << '\n';
    return report.valid ? 0 : 1;
}

int cmd_solve(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = load_config(opts.config);
        if (cfg.times.empty()) throw ConfigError("/times", "no output times given");
        if (cfg.phi.empty()) throw ConfigError("/data", "no initial data given");
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    }
    const std::string format = opts.format.value_or(cfg.format);
    if (format != "csv" && format != "json") {
        err << "unknown format '" << format << "' (expected csv or json)\n";
        return 2;
    }
    const auto report = validate_system(cfg.system, 256);
    if (!report.valid) {
        err << "invalid system\n";
        print_violations(report, err);
        return 1;
    }
    SolveOptions sopts;
    sopts.tol = opts.tol.value_or(cfg.tol("solve", 1e-8));
    sopts.workers = effective_workers(opts, cfg);

    const auto start = std::chrono::steady_clock::now();
    SolutionBundle bundle;
    try {
        bundle = solve(cfg.system, cfg.phi, cfg.forcing, cfg.times, sopts);
    } catch (const ToleranceError& e) {
        err << "tolerance failure: " << e.what() << " (achieved " << num(e.achieved())
            << ", requested " << num(e.requested()) << ")\n";
        return 1;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const fs::path dir = output_dir(opts, cfg);
    fs::create_directories(dir);
    const fs::path file = dir / (format == "csv" ? "solution.csv" : "solution.json");
    std::ofstream os(file);
    if (format == "csv") {
        const double imag = write_bundle_csv(os, bundle, cfg.grid_N);
        if (imag > 1e-10) {
            err << "warning: solution has imaginary parts up to " << num(imag)
                << "; the CSV holds real parts only\n";
        }
    } else {
        os << bundle_to_json(bundle).dump(1) << '\n';
    }
    os.close();

    out << "t";
    for (int i = 1; i <= cfg.system.m(); ++i) out << ",L2(u" << i << ")";
    out << '\n';
    for (std::size_t t = 0; t < bundle.times.size(); ++t) {
        out << num(bundle.times[t]);
        for (const auto& f : bundle.fields[t]) out << ',' << num(sobolev_norm(f, 0.0));
        out << '\n';
    }
    out << "modes: " << bundle.lattice.size() << ", terms per mode: " << bundle.term_count
        << ", workers: " << bundle.workers << ", wall-clock: " << num(wall) << " s\n";
    out << "wrote " << file.string() << '\n';
    return 0;
}

const std::vector<std::string>& check_families() {
    static const std::vector<std::string> names{"initial", "residual",   "oracle",    "duhamel",
                                                "laplace", "hypotheses", "probes"};
    return names;
}

VerificationReport run_verification(const RunConfig& cfg, const std::optional<std::string>& only,
                                    int workers) {
    const auto& sys = cfg.system;
    const int m = sys.m();
    std::vector<std::string> families;
    for (const auto& f : check_families()) {
        if (!only || *only == f) families.push_back(f);
    }
    if (families.empty()) throw ConfigError("--only", "unknown check '" + *only + "'");
    if (cfg.phi.empty()) throw ConfigError("/data", "verification needs initial data");
    const double T = cfg.times.empty() ? 1.0 : *std::max_element(cfg.times.begin(), cfg.times.end());

    std::vector<std::vector<CheckResult>> results(families.size());
    parallel_for(families.size(), workers, [&](std::size_t idx) {
        const std::string& fam = families[idx];
        auto& out = results[idx];
        if (fam == "initial") {
            CheckResult r;
            r.name = "initial_condition";
            r.anchor = "U(0, x) = Phi(x)";
            const auto b = solve(sys, cfg.phi, cfg.forcing, {0.0});
            double diff = 0.0;
            for (int i = 0; i < m; ++i) {
                for (const auto& k : b.lattice) {
                    diff = std::max(diff, std::abs(b.fields[0][i].at(k) - cfg.phi[i].at(k)));
                }
            }
            r.error = diff;
            r.tolerance = 0.0;
            r.status = diff == 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
            r.detail = "max |U(0) - Phi| over modes = " + num(diff);
            out.push_back(r);
        } else if (fam == "residual") {
            SolutionBundle b;
            if (cfg.verify.solution) {
                std::ifstream in(*cfg.verify.solution);
                json doc;
                try {
                    doc = json::parse(in);
                } catch (const json::parse_error& e) {
                    throw ConfigError(cfg.verify.solution->string(), e.what());
                }
                b = bundle_from_json(doc, sys.n(), cfg.verify.solution->string());
            } else {
                const auto grid = TimeGrid::graded(T > 0.0 ? T : 1.0, cfg.verify.residual_steps,
                                                   default_grading(sys.betas().min()));
                std::vector<double> times(grid.nodes().begin(), grid.nodes().end());
                b = solve(sys, cfg.phi, cfg.forcing, times);
            }
            out.push_back(residual_check(sys, b, cfg.forcing, cfg.verify.residual_levels));
        } else if (fam == "oracle") {
            std::vector<double> times;
            for (double t : cfg.times) {
                if (t > 0.0) times.push_back(t);
            }
            if (times.empty()) times.push_back(1.0);
            out.push_back(oracle_comparison_check(sys, cfg.phi, cfg.forcing, times,
                                                  cfg.verify.oracle_steps, cfg.tol("oracle", 1e-3),
                                                  cfg.verify.oracle_modes));
        } else if (fam == "duhamel") {
            const auto xi = first_frequency(cfg);
            ModeForcing h = zero_forcing(m);
            bool from_config = false;
            if (!cfg.forcing.empty()) {
                SpectralField shape(sys.n(), cfg.phi.front().period);
                for (const auto& f : cfg.forcing.spatial) {
                    for (const auto& [k, c] : f.modes) {
                        if (!from_config && shape.xi(k) == xi) {
                            h = cfg.forcing.at(k, m);
                            from_config = !h.is_zero();
                        }
                    }
                }
            }
            if (!from_config) {
                // smooth default: (1, t, e^{-t}, 1, t, ...)
                for (int i = 0; i < m; ++i) {
                    h.amplitude[i] = 1.0;
                    h.profile[i] = i % 3 == 0   ? TimeProfile::constant(1.0)
                                   : i % 3 == 1 ? TimeProfile::monomial(1.0, 1.0)
                                                : TimeProfile::exponential(1.0, -1.0);
                }
            }
            const double t = cfg.verify.t.value_or(T > 0.0 ? T : 1.0);
            auto r = duhamel_equivalence_check(sys, xi, h, t, cfg.tol("duhamel", 1e-4));
            r.detail += from_config ? " (config forcing)" : " (default forcing 1, t, e^-t)";
            out.push_back(r);
        } else if (fam == "laplace") {
            for (double b : cfg.verify.laplace.betas) {
                for (double l : cfg.verify.laplace.lambdas) {
                    auto r = laplace_identity_check(b, l, cfg.verify.laplace.s,
                                                    cfg.tol("laplace", 1e-6));
                    r.name += "_beta" + tag(b) + "_lambda" + tag(l);
                    out.push_back(r);
                }
            }
        } else if (fam == "hypotheses") {
            const double tau = cfg.verify.tau >= 0.0 ? cfg.verify.tau : 0.5 * sys.n() + 0.1;
            const auto rep = check_hypotheses(sys, cfg.phi, cfg.forcing, tau, T > 0.0 ? T : 1.0);
            CheckResult r;
            r.name = "hypotheses";
            r.anchor = "tau > n/2, phi_i and h_i in L_2^{tau + p* - l_ii}";
            r.status = CheckStatus::Diagnostic;
            r.error = tau;
            std::ostringstream os;
            os << "tau = " << num(tau) << (rep.tau_exceeds_half_dim ? " > " : " <= ") << "n/2 = "
               << num(0.5 * rep.n) << "; exponents";
            for (const auto& c : rep.components) {
                os << " " << num(c.exponent);
                r.values.push_back(c.exponent);
            }
            os << "; norms phi";
            for (const auto& c : rep.components) os << " " << num(c.phi_norm);
            os << "; max_t norms h";
            for (const auto& c : rep.components) os << " " << num(c.h_norm_max);
            r.detail = os.str();
            out.push_back(r);
        } else if (fam == "probes") {
            const auto xi_grid = log_grid(1.0, 1e3, 16);
            const auto t_grid = log_grid(1e-3, 1.0, 16);
            for (bool prime : {false, true}) {
                out.push_back(bound_probe_lemma5(sys, 1, m, cfg.verify.epsilon, xi_grid, t_grid, prime));
            }
            const auto ts = log_grid(1e-3, 1e6, 400);
            for (double b : cfg.verify.laplace.betas) {
                CheckResult r;
                r.name = "ml_bound_probe_beta" + tag(b);
                r.anchor = "(1 + t) E_b(-t) <= C";
                r.status = CheckStatus::Diagnostic;
                std::vector<double> with_zero{0.0};
                with_zero.insert(with_zero.end(), ts.begin(), ts.end());
                r.error = ml_bound_probe(b, with_zero);
                r.detail = "max over t in [0, 1e6] = " + num(r.error);
                out.push_back(r);
                for (double eps : {0.25, 0.5, 0.75}) {
                    CheckResult q;
                    q.name = "ml_kernel_probe_beta" + tag(b) + "_eps" + tag(eps);
                    q.anchor = "t^{b-1} E_{b,b}(-lambda t^b) <= C lambda^{eps-1} t^{eps b-1}";
                    q.status = CheckStatus::Diagnostic;
                    q.error = ml_kernel_ratio_probe(b, 1.0, eps, ts);
                    q.detail = "lambda = 1, max ratio = " + num(q.error);
                    out.push_back(q);
                }
            }
        }
    });
    VerificationReport report;
    for (auto& r : results) {
        for (auto& c : r) report.checks.push_back(std::move(c));
    }
    report.sort();
    return report;
}

json report_to_json(const VerificationReport& report) {
    json arr = json::array();
    for (const auto& c : report.checks) {
        arr.push_back({{"name", c.name},
                       {"anchor", c.anchor},
                       {"status", to_string(c.status)},
                       {"error", c.error},
                       {"tolerance", c.tolerance},
                       {"seconds", c.seconds},
                       {"detail", c.detail},
                       {"values", c.values}});
    }
    return arr;
}

int cmd_verify(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    VerificationReport report;
    try {
        cfg = load_config(opts.config);
        if (opts.tol) {
            for (const char* key : {"oracle", "duhamel", "laplace"}) cfg.tolerances[key] = *opts.tol;
        }
        const auto valid = validate_system(cfg.system, 256);
        if (!valid.valid) {
            err << "invalid system\n";
            print_violations(valid, err);
            return 1;
        }
        report = run_verification(cfg, opts.only, effective_workers(opts, cfg));
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DimensionError& e) {
        err << "verification input error: " << e.what() << '\n';
        return 2;
    } catch (const ToleranceError& e) {
        err << "tolerance failure during verification: " << e.what() << '\n';
        return 1;
    }

    out << std::left << std::setw(41) << "check" << std::setw(12) << "status" << std::setw(16)
        << "error" << std::setw(12) << "tolerance" << "seconds\n";
    for (const auto& c : report.checks) {
        std::ostringstream e, t, s;
        e << std::setprecision(6) << c.error;
        t << std::setprecision(3) << c.tolerance;
        s << std::fixed << std::setprecision(2) << c.seconds;
        out << std::setw(40) << c.name << ' ' << std::setw(12) << to_string(c.status) << std::setw(16)
            << e.str() << std::setw(12) << t.str() << s.str() << '\n';
        if (!c.detail.empty()) out << "    " << c.detail << '\n';
    }
    const fs::path dir = output_dir(opts, cfg);
    fs::create_directories(dir);
    std::ofstream(dir / "report.json") << report_to_json(report).dump(1) << '\n';
    out << (report.passed() ? "all pass/fail checks passed" : "some checks FAILED") << '\n';
    return report.passed() ? 0 : 1;
}

TriangularSystem leading_block(const TriangularSystem& sys, int m) {
    std::vector<double> betas(sys.betas().values().begin(), sys.betas().values().begin() + m);
    TriangularSystem out(m, sys.n(), FracOrderVector(betas));
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= i; ++j) out.set_entry(i, j, sys.entry(i, j));
    }
    return out;
}

int cmd_bench(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = load_config(opts.config);
        if (cfg.phi.empty()) throw ConfigError("/data", "no initial data given");
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    }
    const auto valid = validate_system(cfg.system, 256);
    if (!valid.valid) {
        err << "invalid system\n";
        print_violations(valid, err);
        return 1;
    }
    const int workers = effective_workers(opts, cfg);
    std::vector<double> times = cfg.times;
    if (times.empty()) times = {1.0};

    std::ostringstream csv;
    csv << "m,workers,modes,terms_per_mode,seconds,us_per_mode\n";
    auto run = [&](int mm, int w, std::size_t max_modes) {
        const auto sys = leading_block(cfg.system, mm);
        std::vector<SpectralField> phi(cfg.phi.begin(), cfg.phi.begin() + mm);
        std::size_t kept = 0;
        for (auto& f : phi) {
            while (f.modes.size() > max_modes) f.modes.erase(std::prev(f.modes.end()));
            kept = std::max(kept, f.modes.size());
        }
        ForcingField h;
        if (!cfg.forcing.empty()) {
            h.spatial.assign(cfg.forcing.spatial.begin(), cfg.forcing.spatial.begin() + mm);
            h.profile.assign(cfg.forcing.profile.begin(), cfg.forcing.profile.begin() + mm);
            for (auto& f : h.spatial) {
                while (f.modes.size() > max_modes) f.modes.erase(std::prev(f.modes.end()));
            }
        }
        SolveOptions sopts;
        sopts.workers = w;
        sopts.tol = opts.tol.value_or(cfg.tol("solve", 1e-8));
        const auto start = std::chrono::steady_clock::now();
        const auto b = solve(sys, phi, h, times, sopts);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const std::size_t modes = b.lattice.size();
        csv << mm << ',' << w << ',' << modes << ',' << b.term_count << ',' << num(secs) << ','
            << num(modes ? 1e6 * secs / modes : 0.0) << '\n';
    };
    try {
        std::size_t full = 0;
        for (const auto& f : cfg.phi) full = std::max(full, f.modes.size());
        for (int mm = 1; mm <= cfg.system.m(); ++mm) {
            run(mm, 1, full);
            if (workers > 1) run(mm, workers, full);
        }
        for (std::size_t modes = 1; modes < full; modes *= 2) run(1, 1, modes);
    } catch (const ToleranceError& e) {
        err << "tolerance failure: " << e.what() << '\n';
        return 1;
    }
    out << csv.str();
    const fs::path dir = output_dir(opts, cfg);
    fs::create_directories(dir);
    std::ofstream(dir / "bench.csv") << csv.str();
    return 0;
}

int cmd_ml(double beta, double mu, double x, std::ostream& out, std::ostream& err) {
    try {
        out << num(mittag_leffler(beta, mu, x)) << '\n';
        return 0;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace fracprop::cli
