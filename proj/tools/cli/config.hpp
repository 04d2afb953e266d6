#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracprop/spectral.hpp"
#include "fracprop/symbols.hpp"

namespace fracprop::cli {

/// Malformed configuration; `where` is a JSON pointer or "file:line".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(where) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

struct LaplaceGrid {
    std::vector<double> betas;
    std::vector<double> lambdas{0.5, 1.0, 10.0};
    std::vector<double> s{0.5, 1.0, 2.0};
};

struct VerifySettings {
    std::optional<std::vector<double>> xi;  ///< frequency for the per-mode checks
    std::optional<double> t;                ///< time for the Duhamel check
    int oracle_steps = 4096;
    int oracle_modes = 4;
    int residual_steps = 64;
    int residual_levels = 3;
    std::optional<std::filesystem::path> solution;  ///< bundle JSON to check instead of solving
    double tau = -1.0;                              ///< < 0 selects n/2 + 0.1
    double epsilon = 0.5;
    LaplaceGrid laplace;
};

struct RunConfig {
    std::filesystem::path source;
    TriangularSystem system{1, 1, FracOrderVector({1.0})};
    std::vector<SpectralField> phi;
    ForcingField forcing;
    std::vector<double> times;
    std::map<std::string, double> tolerances;
    std::filesystem::path output_dir = "fracprop-out";
    std::string format = "csv";
    int grid_N = 32;
    int workers = 1;
    VerifySettings verify;

    double tol(const std::string& key, double fallback) const;
};

/// Reads and checks a configuration file; throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base);

/// {"m", "n", "betas", "entries": [{"i", "j", "terms": [{"alpha", "coeff"}]}]}.
TriangularSystem parse_system(const nlohmann::json& j, const std::string& where = "/system");
nlohmann::json system_to_json(const TriangularSystem& sys);

/// {"period": L, "modes": [{"k": [..], "re": r, "im": i}], "real": bool?}.
SpectralField parse_field(const nlohmann::json& j, int n, const std::string& where);
nlohmann::json field_to_json(const SpectralField& f);

/// CSV with header x1,...,xn,value on a uniform periodic grid.
GridSamples read_grid_csv(const std::filesystem::path& path, int n, double period);
void write_grid_csv(std::ostream& os, const GridSamples& g);

/// Bundle as {"times": [...], "fields": [[field per component] per time]}.
nlohmann::json bundle_to_json(const SolutionBundle& b);
SolutionBundle bundle_from_json(const nlohmann::json& j, int n, const std::string& where);

/// t,component,x1..xn,value (real part) on the N^n grid; returns the largest
/// imaginary part seen.
double write_bundle_csv(std::ostream& os, const SolutionBundle& b, int N);

/// Shortest round-trip representation with 17 significant digits.
std::string num(double v);

} // namespace fracprop::cli
