#pragma once

#include <span>
#include <vector>

namespace fracprop {

/// Order beta and decay rate lambda of the kernel t^{beta-1} E_{beta,beta}(-lambda t^beta).
struct MLKernelSpec {
    double beta = 1.0;
    double lambda = 0.0;

    /// Throws DomainError unless 0 < beta <= 1 and lambda >= 0.
    void check() const;
};

/// Zone boundaries for Mittag-Leffler evaluation on the negative real axis.
struct MLZoneConfig {
    double series_radius = 1.0;    ///< Taylor series for |x| <= radius
    double asymptotic_cap = 1e3;   ///< asymptotic threshold is min(10^{2/beta}, cap)
    int contour_nodes = 18;        ///< parabolic contour in between
};

enum class MLZone { Series, Contour, Asymptotic };

double ml_asymptotic_threshold(double beta, const MLZoneConfig& cfg = {});
MLZone ml_zone(double beta, double x, const MLZoneConfig& cfg = {});

/// E_{beta,mu}(x) for 0 < beta <= 1, mu > 0, x <= 0.
double mittag_leffler(double beta, double mu, double x, const MLZoneConfig& cfg = {});

// Single-zone evaluators, exposed for zone-consistency checks.
double ml_series(double beta, double mu, double x);
double ml_contour(double beta, double mu, double x, int nodes = 18);
double ml_asymptotic(double beta, double mu, double x);

/// E_beta(-lambda t^beta), the relaxation function (head of a propagator chain).
double ml_relaxation(const MLKernelSpec& spec, double t);

/// t^{beta-1} E_{beta,beta}(-lambda t^beta) for t > 0.
double ml_kernel(const MLKernelSpec& spec, double t);

/// max over samples of (1 + t) E_beta(-t).
double ml_bound_probe(double beta, std::span<const double> t_samples);

/// max over samples of ml_kernel(beta, lambda, t) / (lambda^{eps-1} t^{eps beta - 1}).
double ml_kernel_ratio_probe(double beta, double lambda, double eps,
                             std::span<const double> t_samples);

/// n logarithmically spaced points on [a, b], a > 0.
std::vector<double> log_grid(double a, double b, int n);

} // namespace fracprop
