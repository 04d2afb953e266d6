#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fracprop {

/// alpha = (alpha_1, ..., alpha_n), nonnegative.
struct MultiIndex {
    std::vector<int> components;

    int order() const;
    std::size_t dim() const { return components.size(); }
    auto operator<=>(const MultiIndex&) const = default;
};

/// Real polynomial symbol A(xi) = sum_alpha a_alpha xi^alpha in n variables.
class PolySymbol {
public:
    explicit PolySymbol(int dim = 1);

    /// Adds coeff to the coefficient of xi^alpha; zero results are dropped.
    PolySymbol& add_term(MultiIndex alpha, double coeff);

    int dim() const { return dim_; }
    /// Highest |alpha| over stored terms; 0 for the zero symbol.
    int order() const;
    bool is_zero() const { return terms_.empty(); }
    /// Every stored term has |alpha| == order().
    bool is_homogeneous() const;
    const std::map<MultiIndex, double>& terms() const { return terms_; }

    double operator()(std::span<const double> xi) const;

    static PolySymbol monomial(MultiIndex alpha, double coeff);

private:
    int dim_;
    std::map<MultiIndex, double> terms_;
};

/// Direct sum over terms with memoized integer powers. Throws DimensionError.
double eval_symbol(const PolySymbol& sym, std::span<const double> xi);

/// B = <beta_1, ..., beta_m>. Values are stored as given; range is checked by
/// validate_system so that out-of-range orders can be reported, not thrown.
class FracOrderVector {
public:
    FracOrderVector() = default;
    explicit FracOrderVector(std::vector<double> betas) : betas_(std::move(betas)) {}

    std::size_t size() const { return betas_.size(); }
    double operator[](std::size_t j) const { return betas_[j]; }
    const std::vector<double>& values() const { return betas_; }
    bool in_range() const;
    double min() const;
    double max() const;

private:
    std::vector<double> betas_;
};

/// Lower-triangular m x m matrix of symbols plus the order vector.
/// Indices are 1-based as in the mathematical notation: 1 <= j <= i <= m.
class TriangularSystem {
public:
    TriangularSystem(int m, int n, FracOrderVector betas);

    int m() const { return m_; }
    int n() const { return n_; }
    const FracOrderVector& betas() const { return betas_; }
    double beta(int j) const { return betas_[j - 1]; }

    /// Throws DimensionError for i < j, out-of-range indices or dimension mismatch.
    void set_entry(int i, int j, PolySymbol sym);
    const PolySymbol& entry(int i, int j) const;
    int order(int i, int j) const { return entry(i, j).order(); }

    int p_star() const;
    std::vector<int> q() const;

private:
    std::size_t slot(int i, int j) const;

    int m_;
    int n_;
    FracOrderVector betas_;
    std::vector<PolySymbol> entries_;  // packed row-major lower triangle
};

/// (max_j l_jj, [max_{j<=i<=m} l_ij]_j).
std::pair<int, std::vector<int>> p_star_and_q(const TriangularSystem& sys);

enum class ViolationKind { BetaRange, OrderCondition, NotHomogeneous, NotElliptic };

struct Violation {
    ViolationKind kind;
    int i = 0;  ///< 1-based row (0 when not applicable)
    int j = 0;  ///< 1-based column
    std::string message;
};

struct ValidationReport {
    bool valid = false;
    int p_star = 0;
    std::vector<int> q;
    std::vector<double> ellipticity_min;  ///< per diagonal entry: best sphere sample, refined locally
    std::vector<Violation> violations;
};

ValidationReport validate_system(const TriangularSystem& sys, int sphere_samples);

/// Quasi-uniform points on the unit sphere of R^n: {+1, -1} for n = 1,
/// equally spaced angles for n = 2, a Fibonacci lattice for n = 3 and a
/// seeded normalized-Gaussian set for n >= 4.
std::vector<std::vector<double>> sphere_points(int n, int count);

/// min over sampled unit xi of the smallest eigenvalue of the symmetric part
/// of A(xi), which equals min over unit mu in C^m of Re(A(xi) mu, mu).
double petrovsky_probe(const TriangularSystem& sys, int xi_samples);

} // namespace fracprop
