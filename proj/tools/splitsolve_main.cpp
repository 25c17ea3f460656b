// splitsolve command line: generate the test problems, run single solves,
// reproduce experiment tables, census the inner Chebyshev work, and print
// spectral estimates.
//
// Exit codes: 0 success, 2 validation/configuration error, 3 when any
// requested solve failed to converge.

#include <splitsolve/splitsolve.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace splitsolve;

struct ProblemFlags {
    int example = 2;
    index_t m = 64;
    double omega = 1.0;
    double sigma1 = 100.0;
    double sigma2 = 100.0;
    std::string w1, w2, t, b;  // example 0: load from files

    void attach(CLI::App* cmd) {
        cmd->add_option("--example", example, "problem family: 1, 2, 3 (0 = load from files)")
            ->check(CLI::Range(0, 3));
        cmd->add_option("--m", m, "interior grid size per dimension (n = m^2)");
        cmd->add_option("--omega", omega, "driving frequency (example 1)");
        cmd->add_option("--sigma1", sigma1, "real shift coefficient (example 2)");
        cmd->add_option("--sigma2", sigma2, "imaginary shift coefficient (example 2)");
        cmd->add_option("--w1", w1, "Matrix Market file for W1 (example 0)");
        cmd->add_option("--w2", w2, "Matrix Market file for W2 (example 0)");
        cmd->add_option("--t", t, "Matrix Market file for T (example 0)");
        cmd->add_option("--b", b, "Matrix Market file for b (example 0)");
    }

    ProblemInstance build() const {
        switch (example) {
            case 1: return example1(m, omega);
            case 2: return example2(m, sigma1, sigma2);
            case 3: return example3(m);
            default: return load_problem({w1, w2, t, b});
        }
    }
};

struct MethodFlags {
    std::string method = "I";
    std::optional<double> alpha;
    std::optional<double> beta;
    std::string krylov;  // empty: bind by example
    std::optional<double> inner_tol;
    index_t max_inner = 20;
    std::string snss_defaults = "data/snss_defaults.txt";

    void attach(CLI::App* cmd) {
        cmd->add_option("--method", method, "splitting scheme: I, II, III, snss, none");
        cmd->add_option("--alpha", alpha, "scheme parameter (Method III, SNSS)");
        cmd->add_option("--beta", beta, "scheme parameter (SNSS)");
        cmd->add_option("--krylov", krylov, "outer method: gmres or fgmres")
            ->check(CLI::IsMember({"gmres", "fgmres"}));
        cmd->add_option("--inner-tol", inner_tol, "inner Chebyshev residual reduction");
        cmd->add_option("--max-inner", max_inner, "inner Chebyshev iteration cap");
        cmd->add_option("--snss-defaults", snss_defaults,
                        "transcribed SNSS parameter table (used when alpha/beta omitted)");
    }

    // transcribed-constants lookup for SNSS without explicit parameters
    std::pair<double, double> lookup_snss(const ProblemFlags& prob) const {
        std::ifstream in(snss_defaults);
        if (!in)
            throw std::invalid_argument("snss needs --alpha/--beta (defaults file '" +
                                        snss_defaults + "' not found)");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            std::string tok;
            int ex = -1;
            index_t mm = -1;
            double om = -1.0, s1 = -1.0, s2 = -1.0, al = 0.0, be = 0.0;
            bool have_ab = false;
            while (ls >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string k = tok.substr(0, eq);
                const double v = std::stod(tok.substr(eq + 1));
                if (k == "example") ex = static_cast<int>(v);
                else if (k == "m") mm = static_cast<index_t>(v);
                else if (k == "omega") om = v;
                else if (k == "sigma1") s1 = v;
                else if (k == "sigma2") s2 = v;
                else if (k == "alpha") al = v;
                else if (k == "beta") { be = v; have_ab = true; }
            }
            if (!have_ab || ex != prob.example || mm != prob.m) continue;
            if (ex == 1 && om != prob.omega) continue;
            if (ex == 2 && (s1 != prob.sigma1 || s2 != prob.sigma2)) continue;
            return {al, be};
        }
        throw std::invalid_argument(
            "snss needs --alpha/--beta (no transcribed default for this problem)");
    }

    MethodSpec resolve(const ProblemFlags& prob) const {
        MethodSpec spec;
        if (method == "none") {
            spec.unpreconditioned = true;
        } else if (method == "I") {
            spec.scheme = SplittingScheme::method1();
        } else if (method == "II") {
            spec.scheme = SplittingScheme::method2();
        } else if (method == "III") {
            spec.scheme = SplittingScheme::method3(alpha.value_or(1.0));
        } else if (method == "snss") {
            double al, be;
            if (alpha && beta) {
                al = *alpha;
                be = *beta;
            } else {
                std::tie(al, be) = lookup_snss(prob);
            }
            spec.scheme = SplittingScheme::snss(al, be);
        } else {
            throw std::invalid_argument("unknown --method '" + method + "'");
        }
        const bool example2_bindings = prob.example == 2 || prob.example == 0;
        spec.flavor = krylov.empty() ? (example2_bindings ? KrylovFlavor::GMRES : KrylovFlavor::FGMRES)
                                     : (krylov == "gmres" ? KrylovFlavor::GMRES : KrylovFlavor::FGMRES);
        spec.inner_reduction = inner_tol.value_or(example2_bindings ? 1e-10 : 1e-2);
        spec.max_inner = max_inner;
        return spec;
    }
};

int cmd_generate(const ProblemFlags& prob, const std::string& out) {
    const ProblemInstance p = prob.build();
    save_problem(p, out);
    std::printf("wrote %s/{W1,W2,T,b}.mtx and meta.txt (n=%lld)\n", out.c_str(),
                static_cast<long long>(p.n));
    return 0;
}

int cmd_solve(const ProblemFlags& prob, const MethodFlags& method, double outer_tol,
              index_t max_outer, const std::string& history_out) {
    const ProblemInstance p = prob.build();
    const MethodSpec m = method.resolve(prob);
    KrylovConfig cfg;
    cfg.flavor = m.unpreconditioned ? KrylovFlavor::None : m.flavor;
    cfg.outer_reduction = outer_tol;
    cfg.max_outer = max_outer;

    SolveReport rep;
    if (m.unpreconditioned) {
        rep = gmres_solve(p, nullptr, cfg).second;
    } else {
        ChebyshevConfig inner;
        inner.reduction = m.inner_reduction;
        inner.max_iters = m.max_inner;
        const SplittingOperators ops = build_operators(p, m.scheme, inner);
        rep = gmres_solve(p, &ops, cfg).second;
    }

    std::printf("problem=%s\n", p.name.c_str());
    std::printf("n=%lld\n", static_cast<long long>(p.n));
    std::printf("method=%s\n", m.label().c_str());
    std::printf("krylov=%s\n", m.unpreconditioned ? "none"
                               : cfg.flavor == KrylovFlavor::GMRES ? "gmres" : "fgmres");
    std::printf("iters=%lld\n", static_cast<long long>(rep.iters));
    std::printf("converged=%d\n", rep.converged ? 1 : 0);
    std::printf("R_k=%.4e\n", rep.R_k);
    if (rep.E_k) std::printf("E_k=%.4e\n", *rep.E_k);
    std::printf("inner_mean_sub1=%.2f\n", rep.inner_mean_sub1);
    std::printf("inner_mean_sub2=%.2f\n", rep.inner_mean_sub2);
    std::printf("wall_seconds=%.3f\n", rep.wall_seconds);

    if (!history_out.empty()) {
        std::ofstream hist(history_out);
        if (!hist) throw std::runtime_error("cannot open " + history_out);
        hist << "iter,relres\n";
        for (std::size_t k = 0; k < rep.residual_history.size(); ++k) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6e", rep.residual_history[k]);
            hist << k << "," << buf << "\n";
        }
    }
    return rep.converged ? 0 : 3;
}

int cmd_experiment(const std::string& config_path, ExperimentSpec inline_spec, bool have_config) {
    ExperimentSpec spec;
    if (have_config) {
        std::ifstream in(config_path);
        if (!in) throw std::invalid_argument("cannot open config " + config_path);
        spec = parse_experiment_config(in);
    } else {
        spec = std::move(inline_spec);
    }
    const auto rows = run_experiment(spec);
    if (spec.output.empty()) {
        emit_table(rows, spec.format, std::cout);
    } else {
        emit_table_file(rows, spec.format, spec.output);
    }
    for (const ExperimentRow& r : rows)
        if (!r.converged) return 3;
    return 0;
}

int cmd_census(const ProblemFlags& prob, const MethodFlags& method,
               const std::vector<double>& reductions, double outer_tol, index_t max_outer,
               const std::string& format, const std::string& out) {
    ExperimentSpec spec;
    spec.example = prob.example;
    spec.ms = {prob.m};
    spec.omega = prob.omega;
    spec.sigma1 = prob.sigma1;
    spec.sigma2 = prob.sigma2;
    spec.paths = {prob.w1, prob.w2, prob.t, prob.b};
    spec.outer_reduction = outer_tol;
    spec.max_outer = max_outer;
    spec.methods = {method.resolve(prob)};
    const auto rows = chebyshev_census(spec, reductions);
    if (out.empty()) {
        emit_census(rows, format, std::cout);
    } else {
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot open " + out);
        emit_census(rows, format, os);
    }
    return 0;
}

int cmd_spectrum(const ProblemFlags& prob, const MethodFlags& method, bool probe_rho,
                 index_t restarts, index_t iters, unsigned seed) {
    const ProblemInstance p = prob.build();
    const MethodSpec m = method.resolve(prob);
    std::optional<double> rho;
    if (probe_rho && !m.unpreconditioned) {
        ChebyshevConfig inner;  // contraction_estimate enforces exact inner solves itself
        const SplittingOperators ops = build_operators(p, m.scheme, inner);
        rho = contraction_estimate(ops, restarts, iters, seed);
    }
    const SpectralEstimates est = spectral_estimates(p, m.scheme.alpha, rho);
    std::printf("problem=%s\n", p.name.c_str());
    std::printf("n=%lld\n", static_cast<long long>(p.n));
    std::printf("method=%s\n", m.label().c_str());
    std::printf("what_norm_1=%.6e\n", est.what_norm_1);
    std::printf("what_norm_2=%.6e\n", est.what_norm_2);
    std::printf("bound_method12=%.6e\n", est.bound_method12);
    std::printf("alpha=%.6g\n", est.alpha);
    std::printf("bound_method3=%.6e\n", est.bound_method3);
    std::printf("alpha_opt=%.6e\n", est.alpha_opt);
    if (est.rho_B_estimate) std::printf("rho_B_estimate=%.6e\n", *est.rho_B_estimate);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse splitting-preconditioned solvers for complex symmetric systems "
                 "(W1 - W2 + iT) x = b"};
    app.require_subcommand(1);
    app.fallthrough();

    double outer_tol = 1e-10;
    index_t max_outer = 1000;
    std::string format = "csv";
    std::string out;
    unsigned seed = 1;
    app.add_option("--outer-tol", outer_tol, "outer residual reduction")->capture_default_str();
    app.add_option("--max-outer", max_outer, "outer iteration cap")->capture_default_str();
    app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "markdown"}));
    app.add_option("--out", out, "output path (default: stdout)");
    app.add_option("--seed", seed, "seed for spectral probes");

    auto* generate = app.add_subcommand("generate", "write a problem as Matrix Market files");
    ProblemFlags gen_prob;
    gen_prob.attach(generate);

    auto* solve = app.add_subcommand("solve", "run one solver on one problem");
    ProblemFlags solve_prob;
    MethodFlags solve_method;
    solve_prob.attach(solve);
    solve_method.attach(solve);

    auto* experiment = app.add_subcommand("experiment", "run a method x problem sweep");
    std::string config_path;
    ProblemFlags exp_prob;
    MethodFlags exp_method;
    experiment->add_option("--config", config_path, "experiment config file (key=value + [method] sections)");
    exp_prob.attach(experiment);
    exp_method.attach(experiment);

    auto* census = app.add_subcommand("census", "mean inner Chebyshev iterations per reduction");
    ProblemFlags census_prob;
    MethodFlags census_method;
    std::vector<double> reductions{1e-2, 1e-4, 1e-6, 1e-10};
    census_prob.attach(census);
    census_method.attach(census);
    census->add_option("--reductions", reductions, "inner reductions to sweep")->delimiter(',');

    auto* spectrum = app.add_subcommand("spectrum", "print norm estimates and bounds");
    ProblemFlags spec_prob;
    MethodFlags spec_method;
    bool probe_rho = false;
    index_t rho_restarts = 3, rho_iters = 100;
    spec_prob.attach(spectrum);
    spec_method.attach(spectrum);
    spectrum->add_flag("--probe-rho", probe_rho, "estimate rho(B) by power iteration on sweeps");
    spectrum->add_option("--rho-restarts", rho_restarts, "random starts for the rho probe");
    spectrum->add_option("--rho-iters", rho_iters, "power iterations per start");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            if (out.empty()) throw std::invalid_argument("generate requires --out DIR");
            return cmd_generate(gen_prob, out);
        }
        if (solve->parsed()) {
            return cmd_solve(solve_prob, solve_method, outer_tol, max_outer, out);
        }
        if (experiment->parsed()) {
            ExperimentSpec inline_spec;
            inline_spec.example = exp_prob.example;
            inline_spec.ms = {exp_prob.m};
            inline_spec.omega = exp_prob.omega;
            inline_spec.sigma1 = exp_prob.sigma1;
            inline_spec.sigma2 = exp_prob.sigma2;
            inline_spec.paths = {exp_prob.w1, exp_prob.w2, exp_prob.t, exp_prob.b};
            inline_spec.outer_reduction = outer_tol;
            inline_spec.max_outer = max_outer;
            inline_spec.seed = seed;
            inline_spec.format = format;
            inline_spec.output = out;
            if (config_path.empty()) inline_spec.methods = {exp_method.resolve(exp_prob)};
            return cmd_experiment(config_path, std::move(inline_spec), !config_path.empty());
        }
        if (census->parsed()) {
            return cmd_census(census_prob, census_method, reductions, outer_tol, max_outer,
                              format, out);
        }
        if (spectrum->parsed()) {
            return cmd_spectrum(spec_prob, spec_method, probe_rho, rho_restarts, rho_iters, seed);
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const splitsolve::MatrixMarketError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const splitsolve::NonPositivePivot& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
