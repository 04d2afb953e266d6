#include "fracprop/frac_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracprop/quadrature.hpp"

namespace fracprop {

TimeGrid::TimeGrid(std::vector<double> nodes, double grading)
    : nodes_(std::move(nodes)), grading_(grading) {}

TimeGrid TimeGrid::graded(double T, int steps, double grading) {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("time grid needs T > 0");
    if (steps < 2) throw DimensionError("time grid needs at least 2 steps");
    if (!(grading >= 1.0)) throw DomainError("grading exponent must be >= 1");
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) {
        t[i] = T * std::pow(static_cast<double>(i) / steps, grading);
    }
    t.back() = T;
    return TimeGrid(std::move(t), grading);
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 3) throw DimensionError("time grid needs at least 2 steps");
    if (nodes.front() != 0.0) throw DomainError("time grid must start at 0");
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (!(nodes[i] > nodes[i - 1]) || !std::isfinite(nodes[i])) {
            throw DomainError("time grid nodes must increase strictly");
        }
    }
    return TimeGrid(std::move(nodes), 1.0);
}

TimeGrid TimeGrid::subsample(std::size_t stride) const {
    if (stride == 0 || steps() % stride != 0 || steps() / stride < 2) {
        throw DimensionError("subsample stride must divide the step count");
    }
    std::vector<double> t;
    for (std::size_t i = 0; i < nodes_.size(); i += stride) t.push_back(nodes_[i]);
    return TimeGrid(std::move(t), grading_);
}

double default_grading(double beta_min) {
    return std::max(2.0, 2.0 / beta_min);
}

namespace {

// a^p - (a - tau)^p for 0 < tau <= a without cancellation.
double power_gap(double a, double tau, double p) {
    const double x = tau / a;
    if (x >= 1.0) return std::pow(a, p);
    return -std::pow(a, p) * std::expm1(p * std::log1p(-x));
}

} // namespace

double l1_weight(std::span<const double> t, double beta, std::size_t n, std::size_t k) {
    const double tau = t[k] - t[k - 1];
    if (beta == 1.0) return k == n ? 1.0 / tau : 0.0;
    const double a = t[n] - t[k - 1];
    return power_gap(a, tau, 1.0 - beta) * rgamma(2.0 - beta) / tau;
}

namespace {

void check_order(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw DomainError("fractional order must lie in (0,1], got " + std::to_string(beta));
    }
}

// Weights (w_left, w_right) of f_{k-1}, f_k in int_{t_{k-1}}^{t_k} (t_n - s)^{beta-1} f(s) ds.
std::pair<double, double> product_weights(double a, double tau, double beta) {
    const double d0 = power_gap(a, tau, beta) / beta;          // int_b^a u^{beta-1} du
    const double d1 = power_gap(a, tau, beta + 1.0) / (beta + 1.0);  // int_b^a u^beta du
    const double b = a - tau;
    // f = f_{k-1} (u - b)/tau + f_k (a - u)/tau with u = t_n - s
    const double w_left = (d1 - b * d0) / tau;
    const double w_right = (a * d0 - d1) / tau;
    return {w_left, w_right};
}

} // namespace

double rl_integral(const SampledFunction& f, double beta, std::size_t node) {
    check_order(beta);
    if (node >= f.grid.size()) throw DimensionError("rl_integral node out of range");
    const auto t = f.grid.nodes();
    CompensatedSum sum;
    for (std::size_t k = 1; k <= node; ++k) {
        const auto [wl, wr] = product_weights(t[node] - t[k - 1], t[k] - t[k - 1], beta);
        sum.add(wl * f.values[k - 1]);
        sum.add(wr * f.values[k]);
    }
    return sum.value() * rgamma(beta);
}

std::vector<double> rl_integral_all(const SampledFunction& f, double beta) {
    std::vector<double> out(f.grid.size());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = rl_integral(f, beta, n);
    return out;
}

double rl_derivative(const SampledFunction& f, double beta, std::size_t node) {
    check_order(beta);
    const std::size_t N = f.grid.steps();
    if (node == 0 || node > N) {
        throw DomainError("rl_derivative needs a node with a left neighbour");
    }
    const auto t = f.grid.nodes();
    auto I = [&](std::size_t i) {
        return beta == 1.0 ? f.values[i] : rl_integral(f, 1.0 - beta, i);
    };
    if (node < N) {
        const double h1 = t[node] - t[node - 1];
        const double h2 = t[node + 1] - t[node];
        return -h2 / (h1 * (h1 + h2)) * I(node - 1) + (h2 - h1) / (h1 * h2) * I(node) +
               h1 / (h2 * (h1 + h2)) * I(node + 1);
    }
    const double h1 = t[N] - t[N - 1];
    const double h0 = t[N - 1] - t[N - 2];
    return h1 / (h0 * (h0 + h1)) * I(N - 2) - (h0 + h1) / (h0 * h1) * I(N - 1) +
           (2.0 * h1 + h0) / (h1 * (h0 + h1)) * I(N);
}

std::vector<double> rl_derivative_cells(const SampledFunction& f, double order) {
    if (!(order >= 0.0 && order < 1.0)) {
        throw DomainError("RL derivative order must lie in [0,1)");
    }
    const auto I = rl_integral_all(f, 1.0 - order);
    const auto t = f.grid.nodes();
    std::vector<double> out(f.grid.steps());
    for (std::size_t k = 1; k < t.size(); ++k) {
        out[k - 1] = (I[k] - I[k - 1]) / (t[k] - t[k - 1]);
    }
    return out;
}

namespace {

// int_0^{t/2} x(tau) y(t - tau) dtau with x ~ tau^ax, geometric panels toward 0.
double half_convolution(const SingularKernel& x, const SingularKernel& y, double t, int panels,
                        int nodes) {
    const double ax = std::min(0.0, x.exponent);
    const double half = 0.5 * t;
    const auto gl = cached_gauss_legendre(nodes);
    const auto gj = cached_gauss_jacobi(nodes, 0.0, ax);
    CompensatedSum sum;
    double lo = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double hi = half * std::ldexp(1.0, p + 1 - panels);
        const double r = 0.5 * (hi - lo);
        if (p == 0) {
            const double scale = std::pow(r, ax + 1.0);
            for (std::size_t q = 0; q < gj->nodes.size(); ++q) {
                const double tau = r * (1.0 + gj->nodes[q]);
                sum.add(gj->weights[q] * scale * x.eval(tau) / std::pow(tau, ax) * y.eval(t - tau));
            }
        } else {
            const double c = 0.5 * (hi + lo);
            for (std::size_t q = 0; q < gl->nodes.size(); ++q) {
                const double tau = c + r * gl->nodes[q];
                sum.add(gl->weights[q] * r * x.eval(tau) * y.eval(t - tau));
            }
        }
        lo = hi;
    }
    return sum.value();
}

} // namespace

double conv_singular(const SingularKernel& a, const SingularKernel& b, double t, double tol,
                     const ConvolutionOptions& opts) {
    if (!(t > 0.0)) throw DomainError("convolution needs t > 0");
    if (!(tol > 0.0)) throw DomainError("convolution tolerance must be positive");
    if (a.exponent <= -1.0 || b.exponent <= -1.0) {
        throw DomainError("kernel exponents must exceed -1");
    }
    auto pass = [&](int panels) {
        return half_convolution(a, b, t, panels, opts.nodes) +
               half_convolution(b, a, t, panels, opts.nodes);
    };
    int panels = std::max(1, opts.initial_panels);
    double prev = pass(panels);
    double err = 0.0;
    while (panels < opts.max_panels) {
        panels *= 2;
        const double cur = pass(panels);
        err = std::abs(cur - prev);
        if (err <= tol) return cur;
        prev = cur;
    }
    throw ToleranceError("convolution did not reach tolerance at t = " + std::to_string(t), err,
                         tol);
}

double conv_chain(std::span<const MLKernelSpec> specs, bool head_one_param,
                  const MLKernelSpec& head_spec, double t, double tol,
                  const ConvolutionOptions& opts) {
    head_spec.check();
    for (const auto& s : specs) s.check();
    if (!(t > 0.0)) throw DomainError("conv_chain needs t > 0");

    auto kernel_exponent = [](const MLKernelSpec& s) {
        return s.beta == 1.0 ? 0.0 : s.beta - 1.0;
    };
    const std::size_t p = specs.size();
    if (p == 0) {
        return head_one_param ? ml_relaxation(head_spec, t) : ml_kernel(head_spec, t);
    }
    const double level_tol = tol / static_cast<double>(p);

    // chain[r] evaluates (head * k_1 * ... * k_r)
    std::vector<SingularKernel> chain(p + 1);
    if (head_one_param) {
        chain[0] = {[head_spec](double tau) { return ml_relaxation(head_spec, tau); }, 0.0};
    } else {
        chain[0] = {[head_spec](double tau) { return ml_kernel(head_spec, tau); },
                    kernel_exponent(head_spec)};
    }
    for (std::size_t r = 1; r <= p; ++r) {
        const MLKernelSpec spec = specs[r - 1];
        SingularKernel k{[spec](double tau) { return ml_kernel(spec, tau); },
                         kernel_exponent(spec)};
        const SingularKernel prev = chain[r - 1];
        const double exponent = std::min(0.0, prev.exponent + spec.beta);
        chain[r] = {[prev, k, level_tol, opts](double tau) {
                        return conv_singular(prev, k, tau, level_tol, opts);
                    },
                    exponent};
    }
    return chain[p].eval(t);
}

} // namespace fracprop
