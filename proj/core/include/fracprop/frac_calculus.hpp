#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "fracprop/errors.hpp"
#include "fracprop/mlf.hpp"
#include "fracprop/special.hpp"

namespace fracprop {

/// Strictly increasing time nodes t_0 = 0 < t_1 < ... < t_N = T, N >= 2.
class TimeGrid {
public:
    /// t_i = T (i/N)^r.
    static TimeGrid graded(double T, int steps, double grading = 1.0);
    static TimeGrid uniform(double T, int steps) { return graded(T, steps, 1.0); }
    /// Throws DomainError unless nodes start at 0, increase strictly and N >= 2.
    static TimeGrid from_nodes(std::vector<double> nodes);

    std::size_t steps() const { return nodes_.size() - 1; }
    std::size_t size() const { return nodes_.size(); }
    double T() const { return nodes_.back(); }
    double grading() const { return grading_; }
    double operator[](std::size_t i) const { return nodes_[i]; }
    std::span<const double> nodes() const { return nodes_; }

    /// Every `stride`-th node (stride must divide steps()).
    TimeGrid subsample(std::size_t stride) const;

private:
    TimeGrid(std::vector<double> nodes, double grading);
    std::vector<double> nodes_;
    double grading_ = 1.0;
};

/// Grading exponent max(2, 2 / beta_min) used for fractional time meshes.
double default_grading(double beta_min);

/// Values aligned with the nodes of a grid.
template <class T>
struct BasicSampledFunction {
    TimeGrid grid;
    std::vector<T> values;

    BasicSampledFunction(TimeGrid g, std::vector<T> v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid.size()) {
            throw DimensionError("sampled values do not match the grid size");
        }
    }
};

using SampledFunction = BasicSampledFunction<double>;
using ComplexSampledFunction = BasicSampledFunction<std::complex<double>>;

/// Weight b such that the L1 approximation of D^beta f at node n reads
/// sum_{k=1..n} b_{n,k} (f_k - f_{k-1}).
double l1_weight(std::span<const double> t, double beta, std::size_t n, std::size_t k);

/// L1 approximation of the Caputo derivative D^beta f at every node; the
/// value at t_0 is NaN (undefined). For beta = 1 this is the backward difference.
template <class T>
BasicSampledFunction<T> caputo_l1(const BasicSampledFunction<T>& f, double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("Caputo order must lie in (0,1]");
    if (f.grid.steps() < 2) throw DimensionError("caputo_l1 needs at least 2 steps");
    const auto t = f.grid.nodes();
    std::vector<T> out(f.values.size());
    out[0] = T(std::numeric_limits<double>::quiet_NaN());
    for (std::size_t n = 1; n < t.size(); ++n) {
        T acc{};
        const std::size_t k0 = (beta == 1.0) ? n : 1;
        for (std::size_t k = k0; k <= n; ++k) {
            acc += l1_weight(t, beta, n, k) * (f.values[k] - f.values[k - 1]);
        }
        out[n] = acc;
    }
    return {f.grid, std::move(out)};
}

/// I^beta f(t_node) = (1/Gamma(beta)) int_0^t (t-s)^{beta-1} f(s) ds, exact
/// for the piecewise-linear interpolant of the samples.
double rl_integral(const SampledFunction& f, double beta, std::size_t node);

/// rl_integral at every node (O(N^2)).
std::vector<double> rl_integral_all(const SampledFunction& f, double beta);

/// Riemann-Liouville derivative of order beta in (0,1): d/dt I^{1-beta} f at
/// an interior node (three-point nonuniform central difference) or at the last
/// node (one-sided). Throws DomainError at t_0.
double rl_derivative(const SampledFunction& f, double beta, std::size_t node);

/// Cell means of the RL derivative d/dt I^{1-order} f of order in [0,1):
/// (I_k - I_{k-1}) / (t_k - t_{k-1}) for k = 1..N. Order 0 gives the cell
/// means of the piecewise-linear f itself.
std::vector<double> rl_derivative_cells(const SampledFunction& f, double order);

/// Kernel k(tau) = tau^exponent * (bounded factor) on (0, t].
struct SingularKernel {
    std::function<double(double)> eval;
    double exponent = 0.0;  ///< in (-1, 0]; positive exponents are treated as 0
};

struct ConvolutionOptions {
    int nodes = 32;           ///< Gauss-Jacobi nodes per panel
    int initial_panels = 8;   ///< geometric panels per half at the first pass
    int max_panels = 256;
};

/// int_0^t kA(tau) kB(t - tau) dtau, split at t/2 with Jacobi-weighted
/// panels at both endpoints; the number of geometric panels is doubled until
/// two successive passes agree to `tol`. Throws ToleranceError otherwise.
double conv_singular(const SingularKernel& a, const SingularKernel& b, double t, double tol,
                     const ConvolutionOptions& opts = {});

/// (head * k_1 * ... * k_p)(t) with k_i = ml_kernel(specs[i]) and head either
/// the relaxation function E_beta(-lambda t^beta) or ml_kernel(head_spec).
/// Evaluated by nested conv_singular with tolerance tol / p per level.
double conv_chain(std::span<const MLKernelSpec> specs, bool head_one_param,
                  const MLKernelSpec& head_spec, double t, double tol,
                  const ConvolutionOptions& opts = {});

} // namespace fracprop
