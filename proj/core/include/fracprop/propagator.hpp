#pragma once

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracprop/frac_calculus.hpp"
#include "fracprop/mlf.hpp"
#include "fracprop/symbols.hpp"
#include "fracprop/time_profile.hpp"

namespace fracprop {

using cplx = std::complex<double>;

/// Strictly decreasing index sequence k = i_0 > i_1 > ... > i_p = j (1-based).
struct Path {
    std::vector<int> indices;

    int top() const { return indices.front(); }
    int bottom() const { return indices.back(); }
    int length() const { return static_cast<int>(indices.size()) - 1; }
    bool operator==(const Path&) const = default;
};

/// All paths from k down to j, ordered by the bitmask of interior indices
/// {j+1, ..., k-1} (bit b selects index j+1+b). Throws DimensionError unless
/// 1 <= j <= k (and k <= m when m > 0).
std::vector<Path> enumerate_paths(int k, int j, int m = 0);

/// One summand of a propagator entry:
/// sign * prod_r A_{i_{r-1} i_r}(xi) * (head_j * k_{chain[0]} * ... )(t).
struct PropagatorTerm {
    Path path;
    int sign = 1;                                   ///< (-1)^p
    std::vector<std::pair<int, int>> coefficient;   ///< symbol positions (i_{r-1}, i_r), bottom first
    std::vector<int> chain;                         ///< path indices other than j, ascending
    int head = 0;                                   ///< j

    double coeff(const TriangularSystem& sys, std::span<const double> xi) const;
    std::vector<MLKernelSpec> chain_specs(const TriangularSystem& sys,
                                          std::span<const double> xi) const;
    MLKernelSpec head_spec(const TriangularSystem& sys, std::span<const double> xi) const;
};

/// Terms of entry (k, j), dropping paths through a zero symbol.
std::vector<PropagatorTerm> build_terms(const TriangularSystem& sys, int k, int j);

/// Human-readable structure, e.g. "-A31*[k3]*E1" or "+A21*A32*[k2,k3]*E1".
std::string term_structure(const PropagatorTerm& term, bool prime = false);

enum class ChainMethod {
    Contour,     ///< inverse Laplace of the summed path products on a parabola
    Quadrature,  ///< nested time-domain convolutions (conv_chain)
};

struct PropagatorOptions {
    double tol = 1e-8;
    ChainMethod method = ChainMethod::Contour;
    int max_m = 12;
    int contour_nodes = 18;
};

/// S(t, xi) and S'(eta, xi) of a system frozen at one frequency.
class FrequencyPropagator {
public:
    /// Throws DimensionError if m exceeds options.max_m or xi has the wrong
    /// length, DomainError if an order is outside (0,1] or a diagonal symbol
    /// is negative at xi.
    FrequencyPropagator(const TriangularSystem& sys, std::span<const double> xi,
                        PropagatorOptions options = {});

    int m() const { return m_; }
    const std::vector<double>& lambdas() const { return lambda_; }
    const PropagatorOptions& options() const { return options_; }
    std::size_t term_count() const;

    /// Row-major m x m; S(0) is the identity.
    std::vector<double> S(double t) const;
    /// Row-major m x m for eta > 0.
    std::vector<double> Sprime(double eta) const;
    double s_entry(int k, int j, double t) const;
    double sprime_entry(int k, int j, double eta) const;

    /// Value of a single term's time function (without sign and coefficient).
    double chain_value(const PropagatorTerm& term, double t, bool prime) const;

    /// Laplace-domain path sums at complex s: entries of (diag(s^B) + A)^{-1}
    /// times diag(s^{B-1}) (prime = false) or of (diag(s^B) + A)^{-1}.
    std::vector<cplx> laplace_matrix(cplx s, bool prime) const;

    std::vector<cplx> apply_S(double t, std::span<const cplx> phi) const;
    /// int_0^t S'(eta) h(t - eta) d eta.
    std::vector<cplx> duhamel(double t, const ModeForcing& h) const;
    /// int_0^t S(eta) d^{1-B} h(t - eta) d eta with the RL derivative.
    std::vector<cplx> duhamel_alt(double t, const ModeForcing& h, int cells = 2048) const;

private:
    struct EvalTerm {
        double coeff;      ///< sign * prod A
        int head;          ///< 0-based
        std::vector<int> chain;  ///< 0-based
        PropagatorTerm term;
    };

    std::vector<double> matrix(double t, bool prime) const;
    std::size_t slot(int k, int j) const;  // 0-based, k > j

    PropagatorOptions options_;
    int m_;
    std::vector<double> beta_;
    std::vector<double> lambda_;
    std::vector<std::pair<int, int>> offdiag_;           // 0-based (k, j) with terms
    std::vector<std::vector<EvalTerm>> terms_;           // per strictly-lower slot
};

/// Convenience wrappers; each validates the system (InvalidSystemError).
double s_entry(const TriangularSystem& sys, int k, int j, double t, std::span<const double> xi,
               double tol = 1e-8);
double sprime_entry(const TriangularSystem& sys, int k, int j, double eta,
                    std::span<const double> xi, double tol = 1e-8);
std::vector<cplx> apply_S(const TriangularSystem& sys, double t, std::span<const cplx> phi_hat,
                          std::span<const double> xi, double tol = 1e-8);
std::vector<cplx> duhamel_term(const TriangularSystem& sys, double t, const ModeForcing& h_hat,
                               std::span<const double> xi, double tol = 1e-8);
std::vector<cplx> duhamel_alt(const TriangularSystem& sys, double t, const ModeForcing& h_hat,
                              std::span<const double> xi, double tol = 1e-8);

/// Throws InvalidSystemError listing the violations if validation fails.
void require_valid(const TriangularSystem& sys, int sphere_samples = 64);

} // namespace fracprop
