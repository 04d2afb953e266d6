#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fracprop/errors.hpp"

namespace fracprop::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double RunConfig::tol(const std::string& key, double fallback) const {
    auto it = tolerances.find(key);
    return it == tolerances.end() ? fallback : it->second;
}

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(where + "/" + key, "missing required field");
    return *it;
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(where, "number is not finite");
    return v;
}

int as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ConfigError(where, "expected an integer");
    return j.get<int>();
}

std::vector<double> as_numbers(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(as_number(j[i], where + "/" + std::to_string(i)));
    }
    return out;
}

std::vector<int> as_ints(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where, "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(as_int(j[i], where + "/" + std::to_string(i)));
    }
    return out;
}

json read_json(const fs::path& path, const std::string& where) {
    std::ifstream in(path);
    if (!in) throw ConfigError(where, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), e.what());
    }
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

} // namespace

TriangularSystem parse_system(const json& j, const std::string& where) {
    const int m = as_int(require(j, "m", where), where + "/m");
    const int n = as_int(require(j, "n", where), where + "/n");
    if (m < 1) throw ConfigError(where + "/m", "must be >= 1");
    if (n < 1) throw ConfigError(where + "/n", "must be >= 1");
    const auto betas = as_numbers(require(j, "betas", where), where + "/betas");
    if (static_cast<int>(betas.size()) != m) {
        throw ConfigError(where + "/betas", "expected " + std::to_string(m) + " orders");
    }
    TriangularSystem sys(m, n, FracOrderVector(betas));
    const auto& entries = require(j, "entries", where);
    if (!entries.is_array()) throw ConfigError(where + "/entries", "expected an array");
    for (std::size_t e = 0; e < entries.size(); ++e) {
        const std::string at = where + "/entries/" + std::to_string(e);
        const int i = as_int(require(entries[e], "i", at), at + "/i");
        const int jj = as_int(require(entries[e], "j", at), at + "/j");
        if (i < jj) throw ConfigError(at, "entry above the diagonal (i < j) is not allowed");
        if (jj < 1 || i > m) throw ConfigError(at, "entry index outside 1..m");
        PolySymbol sym(n);
        const auto& terms = require(entries[e], "terms", at);
        if (!terms.is_array()) throw ConfigError(at + "/terms", "expected an array");
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const std::string tat = at + "/terms/" + std::to_string(t);
            auto alpha = as_ints(require(terms[t], "alpha", tat), tat + "/alpha");
            const double coeff = as_number(require(terms[t], "coeff", tat), tat + "/coeff");
            try {
                sym.add_term(MultiIndex{std::move(alpha)}, coeff);
            } catch (const std::exception& ex) {
                throw ConfigError(tat, ex.what());
            }
        }
        sys.set_entry(i, jj, std::move(sym));
    }
    return sys;
}

json system_to_json(const TriangularSystem& sys) {
    json entries = json::array();
    for (int i = 1; i <= sys.m(); ++i) {
        for (int j = 1; j <= i; ++j) {
            const auto& sym = sys.entry(i, j);
            if (sym.is_zero()) continue;
            json terms = json::array();
            for (const auto& [alpha, c] : sym.terms()) {
                terms.push_back({{"alpha", alpha.components}, {"coeff", c}});
            }
            entries.push_back({{"i", i}, {"j", j}, {"terms", terms}});
        }
    }
    return {{"m", sys.m()}, {"n", sys.n()}, {"betas", sys.betas().values()}, {"entries", entries}};
}

SpectralField parse_field(const json& j, int n, const std::string& where) {
    SpectralField f(n, 2.0 * M_PI);
    if (j.contains("period")) f.period = as_number(j["period"], where + "/period");
    if (!(f.period > 0.0)) throw ConfigError(where + "/period", "must be positive");
    const auto& modes = require(j, "modes", where);
    if (!modes.is_array()) throw ConfigError(where + "/modes", "expected an array");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::string at = where + "/modes/" + std::to_string(i);
        auto k = as_ints(require(modes[i], "k", at), at + "/k");
        if (static_cast<int>(k.size()) != n) {
            throw ConfigError(at + "/k", "expected " + std::to_string(n) + " components");
        }
        const double re = modes[i].contains("re") ? as_number(modes[i]["re"], at + "/re") : 0.0;
        const double im = modes[i].contains("im") ? as_number(modes[i]["im"], at + "/im") : 0.0;
        f.modes[k] += std::complex<double>(re, im);
    }
    if (j.contains("real")) {
        if (!j["real"].is_boolean()) throw ConfigError(where + "/real", "expected a boolean");
        f.real = j["real"].get<bool>();
    }
    try {
        f.check();
    } catch (const std::exception& ex) {
        throw ConfigError(where, ex.what());
    }
    return f;
}

json field_to_json(const SpectralField& f) {
    json modes = json::array();
    for (const auto& [k, c] : f.modes) {
        modes.push_back({{"k", k}, {"re", c.real()}, {"im", c.imag()}});
    }
    return {{"period", f.period}, {"real", f.real}, {"modes", modes}};
}

GridSamples read_grid_csv(const fs::path& path, int n, double period) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open grid file");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path.string() + ":1", "missing header");
    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError(path.string() + ":" + std::to_string(lineno),
                                  "not a number: '" + cell + "'");
            }
        }
        if (static_cast<int>(row.size()) != n + 1) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno),
                              "expected " + std::to_string(n + 1) + " columns");
        }
        rows.push_back(std::move(row));
    }
    const int N = static_cast<int>(std::lround(std::pow(static_cast<double>(rows.size()), 1.0 / n)));
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= N;
    if (total != rows.size() || N % 2 != 0) {
        throw ConfigError(path.string(), "row count is not N^n for an even N");
    }
    GridSamples g{n, N, period, std::vector<std::complex<double>>(total)};
    std::vector<bool> seen(total, false);
    for (const auto& row : rows) {
        std::size_t idx = 0, mul = 1;
        for (int i = 0; i < n; ++i) {
            const long j = std::lround(row[i] * N / period);
            if (j < 0 || j >= N || std::abs(row[i] - period * j / N) > 1e-9 * period) {
                throw ConfigError(path.string(), "point is not on the uniform grid");
            }
            idx += static_cast<std::size_t>(j) * mul;
            mul *= N;
        }
        if (seen[idx]) throw ConfigError(path.string(), "duplicate grid point");
        seen[idx] = true;
        g.values[idx] = row[n];
    }
    return g;
}

void write_grid_csv(std::ostream& os, const GridSamples& g) {
    for (int i = 1; i <= g.n; ++i) os << 'x' << i << ',';
    os << "value\n";
    for (std::size_t idx = 0; idx < g.values.size(); ++idx) {
        for (double x : g.point(idx)) os << num(x) << ',';
        os << num(g.values[idx].real()) << '\n';
    }
}

json bundle_to_json(const SolutionBundle& b) {
    json fields = json::array();
    for (const auto& per_time : b.fields) {
        json comps = json::array();
        for (const auto& f : per_time) comps.push_back(field_to_json(f));
        fields.push_back(comps);
    }
    return {{"times", b.times},
            {"fields", fields},
            {"metadata",
             {{"tol", b.tol},
              {"term_count", b.term_count},
              {"workers", b.workers},
              {"seconds_per_mode", b.seconds_per_mode}}}};
}

SolutionBundle bundle_from_json(const json& j, int n, const std::string& where) {
    SolutionBundle b;
    b.times = as_numbers(require(j, "times", where), where + "/times");
    const auto& fields = require(j, "fields", where);
    if (!fields.is_array() || fields.size() != b.times.size()) {
        throw ConfigError(where + "/fields", "expected one entry per time");
    }
    std::vector<Lattice> lattice;
    for (std::size_t t = 0; t < fields.size(); ++t) {
        std::vector<SpectralField> comps;
        if (!fields[t].is_array()) throw ConfigError(where + "/fields", "expected arrays");
        for (std::size_t c = 0; c < fields[t].size(); ++c) {
            comps.push_back(parse_field(fields[t][c], n,
                                        where + "/fields/" + std::to_string(t) + "/" +
                                            std::to_string(c)));
            for (const auto& [k, v] : comps.back().modes) lattice.push_back(k);
        }
        b.fields.push_back(std::move(comps));
    }
    std::sort(lattice.begin(), lattice.end());
    lattice.erase(std::unique(lattice.begin(), lattice.end()), lattice.end());
    b.lattice = std::move(lattice);
    return b;
}

double write_bundle_csv(std::ostream& os, const SolutionBundle& b, int N) {
    const int n = b.fields.empty() || b.fields.front().empty() ? 1 : b.fields.front().front().n;
    os << "t,component";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    os << ",value\n";
    double max_imag = 0.0;
    for (std::size_t t = 0; t < b.fields.size(); ++t) {
        for (std::size_t c = 0; c < b.fields[t].size(); ++c) {
            const auto g = modes_to_grid(b.fields[t][c], N);
            for (std::size_t idx = 0; idx < g.values.size(); ++idx) {
                os << num(b.times[t]) << ',' << (c + 1);
                for (double x : g.point(idx)) os << ',' << num(x);
                os << ',' << num(g.values[idx].real()) << '\n';
                max_imag = std::max(max_imag, std::abs(g.values[idx].imag()));
            }
        }
    }
    return max_imag;
}

namespace {

SpectralField parse_field_spec(const json& j, int n, double period, const fs::path& base,
                               const std::string& where) {
    if (!j.is_object()) throw ConfigError(where, "expected an object");
    if (j.contains("modes")) {
        json copy = j;
        if (!copy.contains("period")) copy["period"] = period;
        return parse_field(copy, n, where);
    }
    if (j.contains("file")) {
        if (!j["file"].is_string()) throw ConfigError(where + "/file", "expected a path");
        const fs::path path = resolve(base, j["file"].get<std::string>());
        if (!fs::exists(path)) throw ConfigError(where + "/file", "file not found: " + path.string());
        const json doc = read_json(path, where + "/file");
        if (doc.contains("fields")) {
            const auto b = bundle_from_json(doc, n, path.string());
            const std::size_t ti =
                j.contains("time_index") ? as_int(j["time_index"], where + "/time_index") : 0;
            const std::size_t c =
                j.contains("component") ? as_int(j["component"], where + "/component") : 1;
            if (ti >= b.fields.size() || c < 1 || c > b.fields[ti].size()) {
                throw ConfigError(where, "time_index or component outside the bundle");
            }
            return b.fields[ti][c - 1];
        }
        return parse_field(doc, n, path.string());
    }
    if (j.contains("grid_csv")) {
        if (!j["grid_csv"].is_string()) throw ConfigError(where + "/grid_csv", "expected a path");
        const fs::path path = resolve(base, j["grid_csv"].get<std::string>());
        if (!fs::exists(path)) {
            throw ConfigError(where + "/grid_csv", "file not found: " + path.string());
        }
        return grid_to_modes(read_grid_csv(path, n, period));
    }
    throw ConfigError(where, "expected \"modes\", \"file\" or \"grid_csv\"");
}

TimeProfile parse_profile(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where, "expected an object");
    if (j.contains("samples")) {
        const auto& s = j["samples"];
        auto t = as_numbers(require(s, "t", where + "/samples"), where + "/samples/t");
        auto v = as_numbers(require(s, "values", where + "/samples"), where + "/samples/values");
        if (t.size() != v.size()) throw ConfigError(where + "/samples", "t and values differ in length");
        try {
            return TimeProfile::sampled(TimeGrid::from_nodes(std::move(t)), std::move(v));
        } catch (const std::exception& ex) {
            throw ConfigError(where + "/samples", ex.what());
        }
    }
    const auto& cat = require(j, "catalog", where);
    if (!cat.is_array()) throw ConfigError(where + "/catalog", "expected an array");
    TimeProfile p;
    for (std::size_t i = 0; i < cat.size(); ++i) {
        const std::string at = where + "/catalog/" + std::to_string(i);
        const auto& kind = require(cat[i], "kind", at);
        if (!kind.is_string()) throw ConfigError(at + "/kind", "expected a string");
        const double c = cat[i].contains("coeff") ? as_number(cat[i]["coeff"], at + "/coeff") : 1.0;
        CatalogTerm term{CatalogTerm::Kind::Constant, c, 0.0};
        const auto k = kind.get<std::string>();
        if (k == "constant") {
        } else if (k == "monomial") {
            term.kind = CatalogTerm::Kind::Monomial;
            term.param = as_number(require(cat[i], "gamma", at), at + "/gamma");
        } else if (k == "exponential") {
            term.kind = CatalogTerm::Kind::Exponential;
            term.param = as_number(require(cat[i], "a", at), at + "/a");
        } else {
            throw ConfigError(at + "/kind", "unknown kind '" + k + "'");
        }
        try {
            p.add(term);
        } catch (const std::exception& ex) {
            throw ConfigError(at, ex.what());
        }
    }
    return p;
}

} // namespace

RunConfig parse_config(const json& j, const fs::path& base) {
    RunConfig cfg;
    if (!j.is_object()) throw ConfigError("/", "expected a JSON object");
    const auto& schema = require(j, "schema", "");
    if (!schema.is_number_integer() || schema.get<int>() != 1) {
        throw ConfigError("/schema", "unsupported schema version (expected 1)");
    }
    cfg.system = parse_system(require(j, "system", ""), "/system");
    const int m = cfg.system.m();
    const int n = cfg.system.n();

    if (j.contains("data")) {
        const auto& data = j["data"];
        double period = 2.0 * M_PI;
        if (data.contains("period")) period = as_number(data["period"], "/data/period");
        if (!(period > 0.0)) throw ConfigError("/data/period", "must be positive");
        const auto& phi = require(data, "phi", "/data");
        if (!phi.is_array() || static_cast<int>(phi.size()) != m) {
            throw ConfigError("/data/phi", "expected " + std::to_string(m) + " fields");
        }
        for (std::size_t i = 0; i < phi.size(); ++i) {
            cfg.phi.push_back(
                parse_field_spec(phi[i], n, period, base, "/data/phi/" + std::to_string(i)));
        }
        if (data.contains("forcing") && !data["forcing"].is_null()) {
            const auto& h = data["forcing"];
            if (!h.is_array() || static_cast<int>(h.size()) != m) {
                throw ConfigError("/data/forcing", "expected " + std::to_string(m) + " entries");
            }
            for (std::size_t i = 0; i < h.size(); ++i) {
                const std::string at = "/data/forcing/" + std::to_string(i);
                if (h[i].is_null()) {
                    cfg.forcing.spatial.emplace_back(n, cfg.phi.front().period);
                    cfg.forcing.profile.emplace_back();
                    continue;
                }
                cfg.forcing.spatial.push_back(
                    parse_field_spec(require(h[i], "field", at), n, period, base, at + "/field"));
                cfg.forcing.profile.push_back(parse_profile(require(h[i], "time", at), at + "/time"));
            }
        }
    }

    if (j.contains("times")) {
        cfg.times = as_numbers(j["times"], "/times");
        for (std::size_t i = 0; i < cfg.times.size(); ++i) {
            if (cfg.times[i] < 0.0) {
                throw ConfigError("/times/" + std::to_string(i), "times must be >= 0");
            }
        }
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (!t.is_object()) throw ConfigError("/tolerances", "expected an object");
        for (auto it = t.begin(); it != t.end(); ++it) {
            const double v = as_number(it.value(), "/tolerances/" + it.key());
            if (!(v > 0.0)) throw ConfigError("/tolerances/" + it.key(), "must be positive");
            cfg.tolerances[it.key()] = v;
        }
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        if (o.contains("dir")) {
            if (!o["dir"].is_string()) throw ConfigError("/output/dir", "expected a path");
            cfg.output_dir = resolve(base, o["dir"].get<std::string>());
        }
        if (o.contains("format")) {
            if (!o["format"].is_string()) throw ConfigError("/output/format", "expected a string");
            cfg.format = o["format"].get<std::string>();
            if (cfg.format != "csv" && cfg.format != "json") {
                throw ConfigError("/output/format", "expected csv or json");
            }
        }
        if (o.contains("grid_N")) {
            cfg.grid_N = as_int(o["grid_N"], "/output/grid_N");
            if (cfg.grid_N < 2 || cfg.grid_N % 2) {
                throw ConfigError("/output/grid_N", "must be even and >= 2");
            }
        }
    }
    if (j.contains("workers")) {
        cfg.workers = as_int(j["workers"], "/workers");
        if (cfg.workers < 1) throw ConfigError("/workers", "must be >= 1");
    }
    if (j.contains("verify")) {
        const auto& v = j["verify"];
        auto& s = cfg.verify;
        if (v.contains("xi")) {
            s.xi = as_numbers(v["xi"], "/verify/xi");
            if (static_cast<int>(s.xi->size()) != n) throw ConfigError("/verify/xi", "wrong dimension");
        }
        if (v.contains("t")) s.t = as_number(v["t"], "/verify/t");
        if (v.contains("oracle_steps")) s.oracle_steps = as_int(v["oracle_steps"], "/verify/oracle_steps");
        if (v.contains("oracle_modes")) s.oracle_modes = as_int(v["oracle_modes"], "/verify/oracle_modes");
        if (v.contains("residual_steps")) {
            s.residual_steps = as_int(v["residual_steps"], "/verify/residual_steps");
        }
        if (v.contains("residual_levels")) {
            s.residual_levels = as_int(v["residual_levels"], "/verify/residual_levels");
        }
        if (v.contains("solution")) {
            if (!v["solution"].is_string()) throw ConfigError("/verify/solution", "expected a path");
            s.solution = resolve(base, v["solution"].get<std::string>());
            if (!fs::exists(*s.solution)) {
                throw ConfigError("/verify/solution", "file not found: " + s.solution->string());
            }
        }
        if (v.contains("tau")) s.tau = as_number(v["tau"], "/verify/tau");
        if (v.contains("epsilon")) s.epsilon = as_number(v["epsilon"], "/verify/epsilon");
        if (v.contains("laplace")) {
            const auto& l = v["laplace"];
            if (l.contains("betas")) s.laplace.betas = as_numbers(l["betas"], "/verify/laplace/betas");
            if (l.contains("lambdas")) s.laplace.lambdas = as_numbers(l["lambdas"], "/verify/laplace/lambdas");
            if (l.contains("s")) s.laplace.s = as_numbers(l["s"], "/verify/laplace/s");
        }
    }
    if (cfg.verify.laplace.betas.empty()) {
        for (double b : cfg.system.betas().values()) {
            if (b > 0.0 && b <= 1.0 &&
                std::find(cfg.verify.laplace.betas.begin(), cfg.verify.laplace.betas.end(), b) ==
                    cfg.verify.laplace.betas.end()) {
                cfg.verify.laplace.betas.push_back(b);
            }
        }
    }
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError(path.string(), "config file not found");
    const json j = read_json(path, path.string());
    RunConfig cfg = parse_config(j, path.parent_path());
    cfg.source = path;
    return cfg;
}

} // namespace fracprop::cli
