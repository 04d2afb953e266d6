#include "fracprop/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fracprop/errors.hpp"

namespace fracprop {

int MultiIndex::order() const { return std::accumulate(components.begin(), components.end(), 0); }

PolySymbol::PolySymbol(int dim) : dim_(dim) {
    if (dim < 1) throw DimensionError("symbol dimension must be >= 1");
}

PolySymbol& PolySymbol::add_term(MultiIndex alpha, double coeff) {
    if (static_cast<int>(alpha.dim()) != dim_) {
        throw DimensionError("multi-index length does not match symbol dimension");
    }
    if (std::any_of(alpha.components.begin(), alpha.components.end(), [](int a) { return a < 0; })) {
        throw DimensionError("multi-index components must be nonnegative");
    }
    if (!std::isfinite(coeff)) throw DomainError("symbol coefficients must be finite");
    const double updated = terms_[alpha] + coeff;
    if (updated == 0.0) {
        terms_.erase(alpha);
    } else {
        terms_[alpha] = updated;
    }
    return *this;
}

int PolySymbol::order() const {
    int best = 0;
    for (const auto& [alpha, c] : terms_) best = std::max(best, alpha.order());
    return best;
}

bool PolySymbol::is_homogeneous() const {
    const int l = order();
    return std::all_of(terms_.begin(), terms_.end(),
                       [l](const auto& kv) { return kv.first.order() == l; });
}

double PolySymbol::operator()(std::span<const double> xi) const { return eval_symbol(*this, xi); }

PolySymbol PolySymbol::monomial(MultiIndex alpha, double coeff) {
    PolySymbol s(static_cast<int>(alpha.dim()));
    s.add_term(std::move(alpha), coeff);
    return s;
}

double eval_symbol(const PolySymbol& sym, std::span<const double> xi) {
    if (static_cast<int>(xi.size()) != sym.dim()) {
        std::ostringstream os;
        os << "symbol of dimension " << sym.dim() << " evaluated at a point of dimension "
           << xi.size();
        throw DimensionError(os.str());
    }
    const int order = sym.order();
    const std::size_t n = xi.size();
    // powers[d * (order + 1) + p] = xi_d^p
    std::vector<double> powers(n * (order + 1), 1.0);
    for (std::size_t d = 0; d < n; ++d) {
        for (int p = 1; p <= order; ++p) {
            powers[d * (order + 1) + p] = powers[d * (order + 1) + p - 1] * xi[d];
        }
    }
    double sum = 0.0;
    for (const auto& [alpha, coeff] : sym.terms()) {
        double term = coeff;
        for (std::size_t d = 0; d < n; ++d) term *= powers[d * (order + 1) + alpha.components[d]];
        sum += term;
    }
    return sum;
}

bool FracOrderVector::in_range() const {
    return std::all_of(betas_.begin(), betas_.end(), [](double b) { return b > 0.0 && b <= 1.0; });
}

double FracOrderVector::min() const { return *std::min_element(betas_.begin(), betas_.end()); }
double FracOrderVector::max() const { return *std::max_element(betas_.begin(), betas_.end()); }

TriangularSystem::TriangularSystem(int m, int n, FracOrderVector betas)
    : m_(m), n_(n), betas_(std::move(betas)) {
    if (m < 1) throw DimensionError("system size m must be >= 1");
    if (n < 1) throw DimensionError("spatial dimension n must be >= 1");
    if (static_cast<int>(betas_.size()) != m) {
        throw DimensionError("order vector length must equal m");
    }
    entries_.assign(static_cast<std::size_t>(m) * (m + 1) / 2, PolySymbol(n));
}

std::size_t TriangularSystem::slot(int i, int j) const {
    if (i < 1 || i > m_ || j < 1 || j > m_) {
        std::ostringstream os;
        os << "entry (" << i << "," << j << ") outside a " << m_ << "x" << m_ << " system";
        throw DimensionError(os.str());
    }
    if (i < j) {
        std::ostringstream os;
        os << "entry (" << i << "," << j << ") lies above the diagonal";
        throw DimensionError(os.str());
    }
    return static_cast<std::size_t>(i - 1) * i / 2 + (j - 1);
}

void TriangularSystem::set_entry(int i, int j, PolySymbol sym) {
    if (sym.dim() != n_) throw DimensionError("symbol dimension does not match system");
    entries_[slot(i, j)] = std::move(sym);
}

const PolySymbol& TriangularSystem::entry(int i, int j) const { return entries_[slot(i, j)]; }

int TriangularSystem::p_star() const { return p_star_and_q(*this).first; }
std::vector<int> TriangularSystem::q() const { return p_star_and_q(*this).second; }

std::pair<int, std::vector<int>> p_star_and_q(const TriangularSystem& sys) {
    int p_star = 0;
    std::vector<int> q(sys.m(), 0);
    for (int j = 1; j <= sys.m(); ++j) {
        p_star = std::max(p_star, sys.order(j, j));
        for (int i = j; i <= sys.m(); ++i) q[j - 1] = std::max(q[j - 1], sys.order(i, j));
    }
    return {p_star, q};
}

std::vector<std::vector<double>> sphere_points(int n, int count) {
    if (n < 1 || count < 1) throw DimensionError("sphere_points needs n >= 1 and count >= 1");
    std::vector<std::vector<double>> pts;
    if (n == 1) return {{1.0}, {-1.0}};
    pts.reserve(count);
    if (n == 2) {
        for (int k = 0; k < count; ++k) {
            const double a = 2.0 * M_PI * k / count;
            pts.push_back({std::cos(a), std::sin(a)});
        }
        return pts;
    }
    if (n == 3) {
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            pts.push_back({r * std::cos(golden * k), r * std::sin(golden * k), z});
        }
        return pts;
    }
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    while (static_cast<int>(pts.size()) < count) {
        std::vector<double> v(n);
        double norm = 0.0;
        for (auto& c : v) {
            c = normal(rng);
            norm += c * c;
        }
        norm = std::sqrt(norm);
        if (norm < 1e-12) continue;
        for (auto& c : v) c /= norm;
        pts.push_back(std::move(v));
    }
    return pts;
}

namespace {

// Pattern search on the unit sphere started from a sample point.
double refine_sphere_min(const PolySymbol& sym, std::vector<double> xi) {
    const int n = static_cast<int>(xi.size());
    double best = eval_symbol(sym, xi);
    if (n == 1) return best;
    std::vector<double> trial(n);
    for (double h = 0.1; h > 1e-9;) {
        bool moved = false;
        for (int k = 0; k < n && !moved; ++k) {
            for (double dir : {h, -h}) {
                trial = xi;
                trial[k] += dir;
                double norm = 0.0;
                for (double v : trial) norm += v * v;
                norm = std::sqrt(norm);
                for (auto& v : trial) v /= norm;
                const double val = eval_symbol(sym, trial);
                if (val < best) {
                    best = val;
                    xi = trial;
                    moved = true;
                    break;
                }
            }
        }
        if (!moved) h *= 0.5;
    }
    return best;
}

} // namespace

ValidationReport validate_system(const TriangularSystem& sys, int sphere_samples) {
    ValidationReport report;
    std::tie(report.p_star, report.q) = p_star_and_q(sys);
    const int m = sys.m();

    for (int j = 1; j <= m; ++j) {
        const double b = sys.beta(j);
        if (!(b > 0.0 && b <= 1.0)) {
            std::ostringstream os;
            os << "beta_" << j << " = " << b << " is outside the allowed range (0,1]";
            report.violations.push_back({ViolationKind::BetaRange, 0, j, os.str()});
        }
    }

    for (int j = 1; j <= m; ++j) {
        const int ljj = sys.order(j, j);
        for (int i = j + 1; i <= m; ++i) {
            const auto& sym = sys.entry(i, j);
            if (sym.is_zero()) continue;  // absent coupling: condition is vacuous
            if (!(ljj > sym.order())) {
                std::ostringstream os;
                os << "column " << j << ": order l_" << j << j << " = " << ljj
                   << " must exceed l_" << i << j << " = " << sym.order();
                report.violations.push_back({ViolationKind::OrderCondition, i, j, os.str()});
            }
        }
    }

    const auto pts = sphere_points(sys.n(), sphere_samples);
    report.ellipticity_min.assign(m, 0.0);
    for (int j = 1; j <= m; ++j) {
        const auto& diag = sys.entry(j, j);
        if (!diag.is_homogeneous()) {
            std::ostringstream os;
            os << "diagonal entry A_" << j << j << " is not homogeneous";
            report.violations.push_back({ViolationKind::NotHomogeneous, j, j, os.str()});
        }
        double lo = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double v = eval_symbol(diag, pts[k]);
            if (v < lo) {
                lo = v;
                arg = k;
            }
        }
        lo = std::min(lo, refine_sphere_min(diag, pts[arg]));
        report.ellipticity_min[j - 1] = lo;
        if (!(lo > 0.0)) {
            std::ostringstream os;
            os << "diagonal entry A_" << j << j << " is not elliptic: minimum " << lo
               << " on the unit sphere sample";
            report.violations.push_back({ViolationKind::NotElliptic, j, j, os.str()});
        }
    }

    report.valid = report.violations.empty();
    return report;
}

double petrovsky_probe(const TriangularSystem& sys, int xi_samples) {
    const int m = sys.m();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& xi : sphere_points(sys.n(), xi_samples)) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
        for (int i = 1; i <= m; ++i) {
            for (int j = 1; j <= i; ++j) {
                const double v = eval_symbol(sys.entry(i, j), xi);
                h(i - 1, j - 1) += 0.5 * v;
                h(j - 1, i - 1) += 0.5 * v;
            }
        }
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h, Eigen::EigenvaluesOnly);
        best = std::min(best, eig.eigenvalues().minCoeff());
    }
    return best;
}

} // namespace fracprop
