#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracprop/oracle.hpp"

#include "config.hpp"

namespace fracprop::cli {

struct CommonOptions {
    std::filesystem::path config;
    std::optional<int> workers;
    std::optional<double> tol;
    std::optional<std::filesystem::path> output;
    std::optional<std::string> format;
    std::optional<std::string> only;
};

/// --workers, then FRACPROP_WORKERS, then the config value.
int effective_workers(const CommonOptions& opts, const RunConfig& cfg);

int cmd_validate(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_solve(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_bench(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_ml(double beta, double mu, double x, std::ostream& out, std::ostream& err);

/// Names accepted by --only.
const std::vector<std::string>& check_families();

/// Runs the selected verification families on the config.
VerificationReport run_verification(const RunConfig& cfg, const std::optional<std::string>& only,
                                    int workers);

nlohmann::json report_to_json(const VerificationReport& report);

/// Leading m' x m' block of a system.
TriangularSystem leading_block(const TriangularSystem& sys, int m);

} // namespace fracprop::cli
