#include "fracprop/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "fracprop/errors.hpp"

namespace fracprop {

namespace {

// Jacobi P_n and P_{n-1} at z for weight (1-x)^a (1+x)^b; returns (p_n, p_{n-1}, dp_n).
struct JacobiEval {
    double p;
    double p_prev;
    double dp;
};

JacobiEval jacobi_eval(int n, double a, double b, double z) {
    const double ab = a + b;
    double p1 = 0.5 * (a - b + (2.0 + ab) * z);
    double p2 = 1.0;
    double temp = 2.0 + ab;
    for (int j = 2; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        temp = 2.0 * j + ab;
        const double c1 = 2.0 * j * (j + ab) * (temp - 2.0);
        const double c2 = (temp - 1.0) * (a * a - b * b + temp * (temp - 2.0) * z);
        const double c3 = 2.0 * (j - 1 + a) * (j - 1 + b) * temp;
        p1 = (c2 * p2 - c3 * p3) / c1;
    }
    if (n == 1) temp = 2.0 + ab;
    const double dp = (n * (a - b - temp * z) * p1 + 2.0 * (n + a) * (n + b) * p2) /
                      (temp * (1.0 - z * z));
    return {p1, p2, dp};
}

} // namespace

QuadratureRule gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw DomainError("Gauss-Jacobi rule needs n >= 1");
    if (!(alpha > -1.0 && beta > -1.0)) {
        throw DomainError("Gauss-Jacobi exponents must exceed -1");
    }
    QuadratureRule rule;
    rule.alpha = alpha;
    rule.beta = beta;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    if (n == 1) {
        rule.nodes[0] = (beta - alpha) / (alpha + beta + 2.0);
        rule.weights[0] = std::exp((alpha + beta + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                                   std::lgamma(beta + 1.0) - std::lgamma(alpha + beta + 2.0));
        return rule;
    }

    const double a = alpha, b = beta, ab = a + b;
    std::vector<double> x(n + 1);  // 1-based, decreasing
    double z = 0.0;
    for (int i = 1; i <= n; ++i) {
        // Initial guesses after Stroud & Secrest.
        if (i == 1) {
            const double an = a / n, bn = b / n;
            const double r1 = (1.0 + a) * (2.78 / (4.0 + n * n) + 0.768 * an / n);
            const double r2 = 1.0 + 1.48 * an + 0.96 * bn + 0.452 * an * an + 0.83 * an * bn;
            z = 1.0 - r1 / r2;
        } else if (i == 2) {
            const double r1 = (4.1 + a) / ((1.0 + a) * (1.0 + 0.156 * a));
            const double r2 = 1.0 + 0.06 * (n - 8.0) * (1.0 + 0.12 * a) / n;
            const double r3 = 1.0 + 0.012 * b * (1.0 + 0.25 * std::abs(a)) / n;
            z -= (1.0 - z) * r1 * r2 * r3;
        } else if (i == 3) {
            const double r1 = (1.67 + 0.28 * a) / (1.0 + 0.37 * a);
            const double r2 = 1.0 + 0.22 * (n - 8.0) / n;
            const double r3 = 1.0 + 8.0 * b / ((6.28 + b) * n * n);
            z -= (x[1] - z) * r1 * r2 * r3;
        } else if (i == n - 1) {
            const double r1 = (1.0 + 0.235 * b) / (0.766 + 0.119 * b);
            const double r2 = 1.0 / (1.0 + 0.639 * (n - 4.0) / (1.0 + 0.71 * (n - 4.0)));
            const double r3 = 1.0 / (1.0 + 20.0 * a / ((7.5 + a) * n * n));
            z += (z - x[n - 3]) * r1 * r2 * r3;
        } else if (i == n) {
            const double r1 = (1.0 + 0.37 * b) / (1.67 + 0.28 * b);
            const double r2 = 1.0 / (1.0 + 0.22 * (n - 8.0) / n);
            const double r3 = 1.0 / (1.0 + 8.0 * a / ((6.28 + a) * n * n));
            z += (z - x[n - 2]) * r1 * r2 * r3;
        } else {
            z = 3.0 * x[i - 1] - 3.0 * x[i - 2] + x[i - 3];
        }

        JacobiEval ev{};
        for (int it = 0; it < 100; ++it) {
            ev = jacobi_eval(n, a, b, z);
            const double z1 = z;
            z = z1 - ev.p / ev.dp;
            if (std::abs(z - z1) <= 1e-15) break;
        }
        ev = jacobi_eval(n, a, b, z);
        x[i] = z;
        const double temp = 2.0 * n + ab;
        const double w = std::exp(std::lgamma(a + n) + std::lgamma(b + n) - std::lgamma(n + 1.0) -
                                  std::lgamma(n + ab + 1.0)) *
                         temp * std::pow(2.0, ab) / (ev.dp * ev.p_prev);
        rule.nodes[n - i] = z;
        rule.weights[n - i] = w;
    }
    return rule;
}

std::shared_ptr<const QuadratureRule> cached_gauss_jacobi(int n, double alpha, double beta) {
    using Key = std::tuple<int, double, double>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<const QuadratureRule>> cache;
    const Key key{n, alpha, beta};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto rule = std::make_shared<const QuadratureRule>(gauss_jacobi(n, alpha, beta));
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(rule)).first->second;
}

double integrate_graded(const std::function<double(double)>& f, double a, double b,
                        double exponent, const GradedOptions& opts) {
    if (!(b > a)) return 0.0;
    if (!(exponent > -1.0)) throw DomainError("integrate_graded: exponent must exceed -1");
    const double e = std::min(exponent, 0.0);
    const auto jac = cached_gauss_jacobi(opts.nodes, 0.0, e);
    const auto leg = cached_gauss_legendre(opts.nodes);

    const double len = b - a;
    const double first = len * std::pow(opts.ratio, -(opts.levels - 1));

    // First panel [a, a + first]: f(x) = r^e g(x) with r = x - a, and the
    // factor (1 + xi)^e of r^e is carried by the Jacobi weight.
    double total = 0.0;
    {
        const double half = 0.5 * first;
        const double scale = std::pow(half, e + 1.0);
        for (std::size_t q = 0; q < jac->nodes.size(); ++q) {
            const double r = half * (1.0 + jac->nodes[q]);
            total += jac->weights[q] * scale * f(a + r) / std::pow(r, e);
        }
    }
    double lo = first;
    for (int level = 1; level < opts.levels; ++level) {
        const double hi = (level == opts.levels - 1) ? len : lo * opts.ratio;
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (std::size_t q = 0; q < leg->nodes.size(); ++q) {
            total += half * leg->weights[q] * f(a + mid + half * leg->nodes[q]);
        }
        lo = hi;
    }
    return total;
}

} // namespace fracprop
