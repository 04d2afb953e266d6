#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "fracprop/errors.hpp"

namespace fracprop {

/// Trapezoidal Bromwich inversion on the parabola s(u) = mu (1 + iu)^2 with
/// mu = pi N / (12 t) and step 3/N. Singularities must lie on the closed
/// negative real axis; the transform must be real on the positive real axis.
struct ParabolicContour {
    int nodes = 18;

    /// f(t) for a scalar transform F(s) -> complex<double>.
    template <class Transform>
    double invert(Transform&& transform, double t) const {
        double out = 0.0;
        invert_many(
            [&](std::complex<double> s, std::span<std::complex<double>> values) {
                values[0] = transform(s);
            },
            t, std::span<double>(&out, 1));
        return out;
    }

    /// Vector-valued variant: transform(s, values) fills values[0..out.size()).
    template <class Transform>
    void invert_many(Transform&& transform, double t, std::span<double> out) const {
        if (!(t > 0.0)) {
            throw DomainError("Laplace inversion requires t > 0");
        }
        using cd = std::complex<double>;
        const double h = 3.0 / nodes;
        const double mu = M_PI * nodes / (12.0 * t);
        constexpr int kStackMax = 256;
        cd stack[kStackMax];
        std::span<cd> values(stack, out.size() <= kStackMax ? out.size() : 0);
        std::vector<cd> heap;
        if (out.size() > kStackMax) {
            heap.resize(out.size());
            values = heap;
        }
        for (auto& v : out) v = 0.0;
        for (int k = 0; k <= nodes; ++k) {
            const double u = k * h;
            const cd w(1.0, u);
            const cd s = mu * w * w;
            const cd ds = 2.0 * mu * w * cd(0.0, 1.0);
            // conjugate symmetry folds u < 0 onto u > 0
            const cd weight = (k == 0 ? 1.0 : 2.0) * std::exp(s * t) * ds / cd(0.0, 2.0 * M_PI);
            transform(s, values);
            for (std::size_t i = 0; i < out.size(); ++i) {
                out[i] += (weight * values[i]).real();
            }
        }
        for (auto& v : out) v *= h;
    }
};

} // namespace fracprop
