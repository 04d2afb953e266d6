#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fracprop/propagator.hpp"
#include "fracprop/symbols.hpp"
#include "fracprop/time_profile.hpp"

namespace fracprop {

using Lattice = std::vector<int>;

/// Band-limited function f(x) = sum_k c_k exp(-i x . xi_k), xi_k = 2 pi k / L.
struct SpectralField {
    int n = 1;
    double period = 2.0 * M_PI;
    bool real = false;  ///< claims c_{-k} = conj(c_k)
    std::map<Lattice, std::complex<double>> modes;

    SpectralField() = default;
    SpectralField(int dim, double L) : n(dim), period(L) {}

    std::vector<double> xi(const Lattice& k) const;
    std::complex<double> at(const Lattice& k) const;
    /// max_k |c_{-k} - conj(c_k)| <= tol * max_k |c_k|.
    bool is_hermitian(double tol = 1e-12) const;
    /// Throws DomainError if the real flag is set but the symmetry fails,
    /// DimensionError on lattice vectors of the wrong length.
    void check() const;
    /// f at a point.
    std::complex<double> operator()(std::span<const double> x) const;
};

/// Samples on the uniform periodic grid x_j = L j / N, flattened with x_1
/// varying fastest: index = j_1 + N j_2 + N^2 j_3 + ...
struct GridSamples {
    int n = 1;
    int N = 0;
    double period = 2.0 * M_PI;
    std::vector<std::complex<double>> values;

    std::vector<double> point(std::size_t index) const;
};

/// c_k = N^{-n} sum_j f(x_j) exp(+i x_j . xi_k) for |k_i| <= N/2; the Nyquist
/// coefficient is split evenly between k_i = +N/2 and -N/2. Modes with
/// |c_k| <= drop * max |c| are omitted. Throws DimensionError unless N is even
/// and values.size() == N^n.
SpectralField grid_to_modes(const GridSamples& samples, double drop = 1e-14);

/// Evaluates the field on the N^n grid.
GridSamples modes_to_grid(const SpectralField& f, int N);

/// Multiplies each amplitude by A(xi_k).
SpectralField apply_operator(const PolySymbol& sym, const SpectralField& f);

/// (sum_k (1 + |xi_k|^2)^tau |c_k|^2 (L / 2 pi)^n)^{1/2}.
double sobolev_norm(const SpectralField& f, double tau);

/// H(t, x) with h_i(t, x) = profile_i(t) g_i(x).
struct ForcingField {
    std::vector<SpectralField> spatial;
    std::vector<TimeProfile> profile;

    bool empty() const { return spatial.empty(); }
    ModeForcing at(const Lattice& k, std::size_t m) const;
};

struct SolveOptions {
    double tol = 1e-8;
    int workers = 1;  ///< 0 uses the hardware concurrency
    PropagatorOptions propagator{};
};

struct SolutionBundle {
    std::vector<double> times;
    std::vector<std::vector<SpectralField>> fields;  ///< [time][component]
    std::vector<Lattice> lattice;
    double tol = 0.0;
    std::size_t term_count = 0;              ///< per frequency
    std::vector<double> seconds_per_mode;    ///< aligned with lattice
    int workers = 1;
};

/// U(t) = S(t, D) Phi + int_0^t S'(eta, D) H(t - eta) d eta on the union of
/// the data lattices. Output at t = 0 is a copy of Phi. Validates the system
/// (InvalidSystemError); tolerance failures are rethrown naming (xi, t).
SolutionBundle solve(const TriangularSystem& sys, const std::vector<SpectralField>& phi,
                     const ForcingField& h, const std::vector<double>& times,
                     const SolveOptions& options = {});

/// Runs fn(i) for i in [0, count) on `workers` threads; the first exception
/// is rethrown after all threads finish.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

int resolve_workers(int requested);

struct ComponentHypothesis {
    int component = 0;     ///< 1-based
    double exponent = 0.0; ///< tau + p* - l_ii
    double phi_norm = 0.0;
    double h_norm_max = 0.0;
};

struct HypothesisReport {
    double tau = 0.0;
    int n = 1;
    int p_star = 0;
    bool tau_exceeds_half_dim = false;  ///< tau > n / 2
    std::vector<ComponentHypothesis> components;
};

/// Exponents and norms entering the existence theorem; h norms are maximized
/// over `time_samples` points of [0, T] (plus the nodes of sampled profiles).
HypothesisReport check_hypotheses(const TriangularSystem& sys,
                                  const std::vector<SpectralField>& phi, const ForcingField& h,
                                  double tau, double T = 1.0, int time_samples = 257);

} // namespace fracprop
