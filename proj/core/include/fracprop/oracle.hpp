#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "fracprop/frac_calculus.hpp"
#include "fracprop/propagator.hpp"
#include "fracprop/spectral.hpp"
#include "fracprop/symbols.hpp"

namespace fracprop {

enum class CheckStatus { Pass, Fail, Diagnostic };

const char* to_string(CheckStatus s);

struct CheckResult {
    std::string name;
    std::string anchor;  ///< the statement being checked
    CheckStatus status = CheckStatus::Diagnostic;
    double error = 0.0;      ///< measured error, or the probe value for diagnostics
    double tolerance = 0.0;
    double seconds = 0.0;
    std::string detail;
    std::vector<double> values;  ///< supporting numbers (check specific)
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    /// False iff some pass/fail check failed; diagnostics never count.
    bool passed() const;
    /// Orders checks by name (stable).
    void sort();
};

/// Time samples of the per-frequency ODE solution.
struct OdeSolution {
    TimeGrid grid;
    std::vector<std::complex<double>> values;  ///< [node * m + component]
    int m = 0;

    std::complex<double> at(std::size_t node, int component) const {
        return values[node * m + component];
    }
    /// Linear interpolation in t (component 0-based).
    std::vector<std::complex<double>> interpolate(double t) const;
};

struct OdeScenario {
    std::vector<std::complex<double>> phi;
    ModeForcing forcing;
};

/// D^B v + A(xi) v = h(t), v(0) = phi, by the L1 scheme on a graded grid
/// (grading <= 0 selects max(2, 2 / beta_min)) with forward substitution
/// through the triangle at every step. Scenarios share the L1 weights.
std::vector<OdeSolution> ode_oracle_batch(const TriangularSystem& sys,
                                          std::span<const double> xi,
                                          const std::vector<OdeScenario>& scenarios, double T,
                                          int steps, double grading = 0.0);

OdeSolution ode_oracle(const TriangularSystem& sys, std::span<const double> xi,
                       std::span<const std::complex<double>> phi_hat, const ModeForcing& h_hat,
                       double T, int steps, double grading = 0.0);

/// Sup over modes, components and coarse nodes of |D^B U + A U - H| computed
/// with caputo_l1 on the bundle times and on `levels` successive coarsenings.
/// The bundle times must start at 0 and their step count must be divisible
/// by 2^levels. Passes iff the residual decreases strictly with every halving
/// by at least max(2^{1 - beta_max}, min_ratio).
CheckResult residual_check(const TriangularSystem& sys, const SolutionBundle& bundle,
                           const ForcingField& h, int levels = 3, double min_ratio = 1.1);

/// |duhamel_term - duhamel_alt| <= tol componentwise at one frequency.
CheckResult duhamel_equivalence_check(const TriangularSystem& sys, std::span<const double> xi,
                                      const ModeForcing& h_hat, double t, double tol);

/// int_0^infty e^{-st} t^{beta-1} E_{beta,beta}(-lambda t^beta) dt by graded quadrature.
double laplace_transform_numeric(double beta, double lambda, double s);

/// Relative error of laplace_transform_numeric against 1/(s^beta + lambda).
CheckResult laplace_identity_check(double beta, double lambda, std::span<const double> s_samples,
                                   double tol);

/// Max ratio |A_qq(xi) Q(t, xi)| / (|xi|^{p* - l_ii + (m - i) eps} t^{e(t)}) over
/// the grids, Q the longest-path term of entry (m, i); e = eps sum_{j>i} beta_j
/// - beta_i for S and eps sum_{j>=i} beta_j for S' (prime). Diagnostic status;
/// values = {max ratio, max ratio on the lower half of the xi grid}, detail
/// states whether the two agree within 20%.
CheckResult bound_probe_lemma5(const TriangularSystem& sys, int i, int q, double epsilon,
                               std::span<const double> xi_grid, std::span<const double> t_grid,
                               bool prime = false);

/// exp(M) for a square row-major matrix (Eigen's Pade scaling and squaring).
std::vector<double> matrix_exponential(std::span<const double> M, int m);

/// exp(-t A(xi)) for a system frozen at xi.
std::vector<double> triangular_expm(const TriangularSystem& sys, std::span<const double> xi,
                                    double t);

/// Per-mode comparison of the spectral solution with ode_oracle at the given
/// times (relative error ||u - v||_inf / max(||v||_inf, ||u||_inf)).
CheckResult oracle_comparison_check(const TriangularSystem& sys, const std::vector<SpectralField>& phi,
                                    const ForcingField& h, const std::vector<double>& times,
                                    int steps, double tol, int max_modes = 4);

} // namespace fracprop
