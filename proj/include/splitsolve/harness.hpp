/// @file harness.hpp
/// @brief Experiment runner: builds problems, sweeps methods, and emits
///        deterministic result tables (CSV or markdown).

#ifndef SPLITSOLVE_HARNESS_HPP
#define SPLITSOLVE_HARNESS_HPP

#include "gmres.hpp"
#include "problems.hpp"
#include "splittings.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace splitsolve {

struct MethodSpec {
    bool unpreconditioned = false;
    SplittingScheme scheme;
    KrylovFlavor flavor = KrylovFlavor::GMRES;
    double inner_reduction = 1e-10;
    index_t max_inner = 20;

    std::string label() const { return unpreconditioned ? "No-pre" : scheme.label(); }
};

struct ExperimentSpec {
    int example = 2;             // 1 | 2 | 3, or 0 for a problem loaded from files
    std::vector<index_t> ms = {64};
    double omega = 1.0;
    double sigma1 = 100.0;
    double sigma2 = 100.0;
    ProblemPaths paths;          // used when example == 0
    std::vector<MethodSpec> methods;
    double outer_reduction = 1e-10;
    index_t max_outer = 1000;
    unsigned seed = 1;           // spectral probes only; solves are deterministic
    std::string format = "csv";
    std::string output;          // empty writes to stdout

    void validate() const {
        if (example < 0 || example > 3) throw std::invalid_argument("spec: example must be 0..3");
        if (example != 0 && ms.empty()) throw std::invalid_argument("spec: no grid sizes");
        if (format != "csv" && format != "markdown")
            throw std::invalid_argument("spec: format must be csv or markdown");
        if (!(outer_reduction > 0.0 && outer_reduction < 1.0))
            throw std::invalid_argument("spec: outer reduction out of range");
        for (const MethodSpec& m : methods) {
            if (!m.unpreconditioned) m.scheme.validate();
            if (!(m.inner_reduction > 0.0 && m.inner_reduction < 1.0))
                throw std::invalid_argument("spec: inner reduction out of range");
            if (!m.unpreconditioned && m.flavor == KrylovFlavor::GMRES && m.inner_reduction > 1e-8)
                throw std::invalid_argument(
                    "spec: inner reduction looser than 1e-8 requires FGMRES");
        }
    }
};

struct ExperimentRow {
    std::string method;
    index_t n = 0;
    std::string params;
    index_t iters = 0;
    bool converged = false;
    double cpu_s = 0.0;
    double R_k = std::numeric_limits<double>::infinity();
    std::optional<double> E_k;
    double inner1 = 0.0;
    double inner2 = 0.0;
};

struct CensusRow {
    double reduction = 0.0;
    index_t outer_iters = 0;
    double mean_sub1 = 0.0;
    double mean_sub2 = 0.0;
};

namespace detail {

inline ProblemInstance build_problem(const ExperimentSpec& spec, index_t m) {
    switch (spec.example) {
        case 1: return example1(m, spec.omega);
        case 2: return example2(m, spec.sigma1, spec.sigma2);
        case 3: return example3(m);
        default: return load_problem(spec.paths);
    }
}

inline std::string problem_params(const ProblemInstance& p) {
    std::ostringstream os;
    os << p.name;
    for (const auto& [k, v] : p.params) {
        if (k == "h" || k == "mu") continue;
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%g", v);
        os << " " << k << "=" << buf;
    }
    return os.str();
}

inline ExperimentRow run_cell(const ProblemInstance& p, const MethodSpec& m,
                              const ExperimentSpec& spec) {
    ExperimentRow row;
    row.method = m.label();
    row.n = p.n;
    row.params = problem_params(p);
    KrylovConfig kcfg;
    kcfg.flavor = m.unpreconditioned ? KrylovFlavor::None : m.flavor;
    kcfg.outer_reduction = spec.outer_reduction;
    kcfg.max_outer = spec.max_outer;
    try {
        SolveReport rep;
        if (m.unpreconditioned) {
            rep = gmres_solve(p, nullptr, kcfg).second;
        } else {
            ChebyshevConfig inner;
            inner.reduction = m.inner_reduction;
            inner.max_iters = m.max_inner;
            const SplittingOperators ops = build_operators(p, m.scheme, inner);
            rep = gmres_solve(p, &ops, kcfg).second;
        }
        row.iters = rep.iters;
        row.converged = rep.converged;
        row.cpu_s = rep.wall_seconds;
        row.R_k = rep.R_k;
        row.E_k = rep.E_k;
        row.inner1 = rep.inner_mean_sub1;
        row.inner2 = rep.inner_mean_sub2;
    } catch (const std::exception&) {
        row.converged = false;  // recorded in the row, never aborts the sweep
    }
    return row;
}

inline std::string fmt_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

inline std::string fmt_fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace detail

/// Run every (problem, method) cell in spec order. Cell failures are recorded
/// in the row, never thrown.
inline std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<ExperimentRow> rows;
    if (spec.example == 0) {
        const ProblemInstance p = detail::build_problem(spec, 0);
        for (const MethodSpec& m : spec.methods) rows.push_back(detail::run_cell(p, m, spec));
        return rows;
    }
    for (index_t m : spec.ms) {
        const ProblemInstance p = detail::build_problem(spec, m);
        for (const MethodSpec& ms : spec.methods) rows.push_back(detail::run_cell(p, ms, spec));
    }
    return rows;
}

/// Mean Chebyshev iterations per subsystem over a full outer solve, one row
/// per inner reduction. Requires a single problem and a single scheme.
inline std::vector<CensusRow> chebyshev_census(const ExperimentSpec& spec,
                                               const std::vector<double>& reductions) {
    spec.validate();
    if (spec.methods.size() != 1 || spec.methods.front().unpreconditioned)
        throw std::invalid_argument("census: exactly one preconditioned method required");
    if (spec.example != 0 && spec.ms.size() != 1)
        throw std::invalid_argument("census: exactly one problem required");

    const MethodSpec& m = spec.methods.front();
    for (double red : reductions) {
        if (red > 1e-8 && m.flavor == KrylovFlavor::GMRES)
            throw std::invalid_argument("census: reductions looser than 1e-8 require FGMRES");
    }

    const ProblemInstance p = detail::build_problem(spec, spec.ms.empty() ? 0 : spec.ms.front());
    std::vector<CensusRow> rows;
    for (double red : reductions) {
        KrylovConfig kcfg;
        kcfg.flavor = m.flavor;
        kcfg.outer_reduction = spec.outer_reduction;
        kcfg.max_outer = spec.max_outer;
        ChebyshevConfig inner;
        inner.reduction = red;
        inner.max_iters = m.max_inner;
        const SplittingOperators ops = build_operators(p, m.scheme, inner);
        const SolveReport rep = gmres_solve(p, &ops, kcfg).second;
        rows.push_back({red, rep.iters, rep.inner_mean_sub1, rep.inner_mean_sub2});
    }
    return rows;
}

/// Deterministic byte output for fixed input: residual/error columns as 4
/// significant digits scientific, counts as integers. The cpu_s column is the
/// one nondeterministic field.
inline void emit_table(const std::vector<ExperimentRow>& rows, const std::string& format,
                       std::ostream& out) {
    const bool md = format == "markdown";
    if (!md && format != "csv") throw std::invalid_argument("emit_table: format must be csv or markdown");
    const char* header = "method,n,params,iters,converged,cpu_s,R_k,E_k,inner1,inner2";
    if (md) {
        out << "| method | n | params | iters | converged | cpu_s | R_k | E_k | inner1 | inner2 |\n";
        out << "|---|---|---|---|---|---|---|---|---|---|\n";
    } else {
        out << header << "\n";
    }
    for (const ExperimentRow& r : rows) {
        const std::string ek = r.E_k ? detail::fmt_sci(*r.E_k) : "-";
        char cpu[32];
        std::snprintf(cpu, sizeof(cpu), "%.3f", r.cpu_s);
        if (md) {
            out << "| " << r.method << " | " << r.n << " | " << r.params << " | " << r.iters
                << " | " << (r.converged ? 1 : 0) << " | " << cpu << " | " << detail::fmt_sci(r.R_k)
                << " | " << ek << " | " << detail::fmt_fixed2(r.inner1) << " | "
                << detail::fmt_fixed2(r.inner2) << " |\n";
        } else {
            out << r.method << "," << r.n << "," << r.params << "," << r.iters << ","
                << (r.converged ? 1 : 0) << "," << cpu << "," << detail::fmt_sci(r.R_k) << "," << ek
                << "," << detail::fmt_fixed2(r.inner1) << "," << detail::fmt_fixed2(r.inner2)
                << "\n";
        }
    }
}

inline void emit_census(const std::vector<CensusRow>& rows, const std::string& format,
                        std::ostream& out) {
    const bool md = format == "markdown";
    if (md) {
        out << "| reduction | outer_iters | mean_sub1 | mean_sub2 |\n|---|---|---|---|\n";
    } else {
        out << "reduction,outer_iters,mean_sub1,mean_sub2\n";
    }
    for (const CensusRow& r : rows) {
        if (md) {
            out << "| " << detail::fmt_sci(r.reduction) << " | " << r.outer_iters << " | "
                << detail::fmt_fixed2(r.mean_sub1) << " | " << detail::fmt_fixed2(r.mean_sub2)
                << " |\n";
        } else {
            out << detail::fmt_sci(r.reduction) << "," << r.outer_iters << ","
                << detail::fmt_fixed2(r.mean_sub1) << "," << detail::fmt_fixed2(r.mean_sub2) << "\n";
        }
    }
}

inline void emit_table_file(const std::vector<ExperimentRow>& rows, const std::string& format,
                            const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_table: cannot open " + path);
    emit_table(rows, format, out);
}

/// Parse the plain key=value experiment format with one [method] section per
/// scheme. Per-method defaults follow the example bindings: examples 1 and 3
/// pair FGMRES with inner 1e-2, example 2 pairs GMRES with inner 1e-10.
inline ExperimentSpec parse_experiment_config(std::istream& in) {
    ExperimentSpec spec;
    spec.ms.clear();
    bool in_method = false;
    MethodSpec cur;
    std::vector<std::pair<std::string, std::string>> method_kv;

    auto method_defaults = [&](MethodSpec& m) {
        if (spec.example == 2) {
            m.flavor = KrylovFlavor::GMRES;
            m.inner_reduction = 1e-10;
        } else {
            m.flavor = KrylovFlavor::FGMRES;
            m.inner_reduction = 1e-2;
        }
    };
    auto flush_method = [&]() {
        if (!in_method) return;
        MethodSpec m;
        method_defaults(m);
        for (const auto& [key, value] : method_kv) {
            if (key == "scheme") {
                if (value == "I") m.scheme = SplittingScheme::method1();
                else if (value == "II") m.scheme = SplittingScheme::method2();
                else if (value == "III") m.scheme = SplittingScheme::method3(m.scheme.alpha);
                else if (value == "snss") m.scheme.kind = SplittingKind::SNSS;
                else if (value == "none") m.unpreconditioned = true;
                else throw std::invalid_argument("config: unknown scheme '" + value + "'");
            } else if (key == "alpha") m.scheme.alpha = std::stod(value);
            else if (key == "beta") m.scheme.beta = std::stod(value);
            else if (key == "krylov") {
                if (value == "gmres") m.flavor = KrylovFlavor::GMRES;
                else if (value == "fgmres") m.flavor = KrylovFlavor::FGMRES;
                else throw std::invalid_argument("config: unknown krylov '" + value + "'");
            } else if (key == "inner_tol") m.inner_reduction = std::stod(value);
            else if (key == "max_inner") m.max_inner = std::stoll(value);
            else throw std::invalid_argument("config: unknown method key '" + key + "'");
        }
        spec.methods.push_back(m);
        method_kv.clear();
    };

    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t'))
            line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        line = line.substr(start);
        if (line == "[method]") {
            flush_method();
            in_method = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config: expected key=value: " + line);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (in_method) {
            method_kv.emplace_back(key, value);
            continue;
        }
        if (key == "example") spec.example = std::stoi(value);
        else if (key == "m") {
            std::istringstream ms(value);
            std::string tok;
            while (std::getline(ms, tok, ',')) spec.ms.push_back(std::stoll(tok));
        } else if (key == "omega") spec.omega = std::stod(value);
        else if (key == "sigma1") spec.sigma1 = std::stod(value);
        else if (key == "sigma2") spec.sigma2 = std::stod(value);
        else if (key == "outer_tol") spec.outer_reduction = std::stod(value);
        else if (key == "max_outer") spec.max_outer = std::stoll(value);
        else if (key == "seed") spec.seed = static_cast<unsigned>(std::stoul(value));
        else if (key == "format") spec.format = value;
        else if (key == "out") spec.output = value;
        else if (key == "w1") spec.paths.w1 = value;
        else if (key == "w2") spec.paths.w2 = value;
        else if (key == "t") spec.paths.t = value;
        else if (key == "b") spec.paths.b = value;
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    flush_method();
    return spec;
}

} // namespace splitsolve

#endif // SPLITSOLVE_HARNESS_HPP
