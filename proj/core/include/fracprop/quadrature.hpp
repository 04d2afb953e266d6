#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace fracprop {

/// Nodes and weights on [-1, 1] for the weight (1 - x)^alpha (1 + x)^beta.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double alpha = 0.0;
    double beta = 0.0;
};

/// Gauss-Jacobi rule with n nodes, alpha, beta > -1 (Newton on the
/// three-term recurrence). Nodes are returned in increasing order.
QuadratureRule gauss_jacobi(int n, double alpha, double beta);

/// Cached, immutable rule; safe to call concurrently.
std::shared_ptr<const QuadratureRule> cached_gauss_jacobi(int n, double alpha, double beta);

inline std::shared_ptr<const QuadratureRule> cached_gauss_legendre(int n) {
    return cached_gauss_jacobi(n, 0.0, 0.0);
}

/// Panel layout for integrals with an algebraic endpoint singularity at `a`:
/// panels [a, a+h_1], [a+h_1, a+h_2], ... with widths growing geometrically
/// by `ratio` so that the first panel has width (b - a) ratio^{-(levels-1)}.
struct GradedOptions {
    int levels = 40;
    double ratio = 2.0;
    int nodes = 16;
};

/// Integral over [a, b] of f(x), where f(x) ~ (x - a)^exponent near a
/// (exponent > -1). The first panel uses the Jacobi weight so the leading
/// singular factor is integrated exactly; f is evaluated on the full value.
double integrate_graded(const std::function<double(double)>& f, double a, double b,
                        double exponent, const GradedOptions& opts = {});

} // namespace fracprop
