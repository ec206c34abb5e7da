#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hyperpower/generators.hpp"
#include "hyperpower/io.hpp"
#include "hyperpower/oracle.hpp"
#include "hyperpower/solver.hpp"

namespace {

using namespace hyperpower;

struct Options {
    std::string method = "sshp2";
    std::string methods;
    std::string input;
    std::string gen;
    std::string trace_path;
    std::string format = "csv";
    std::string output;
    std::size_t n = 8;
    std::uint64_t seed = 0;
    double eig_a = std::numeric_limits<double>::quiet_NaN();
    double eig_b = std::numeric_limits<double>::quiet_NaN();
    double eps = 1e-10;
    std::size_t max_iter = 1000;
    double denom_tol = 0.0;
    bool denom_rel = false;
    bool as_complex = false;
};

void add_matrix_source_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--input", o.input, "read the matrix from a Matrix Market file");
    cmd->add_option("--gen", o.gen,
                    "generate the matrix: spd, diag-dominant, hilbert, two-eig, "
                    "random-complex or symmetric");
    cmd->add_option("--n", o.n, "generated matrix size")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "generator seed (same seed, same matrix)");
    cmd->add_option("--eig-a", o.eig_a, "two-eig: first eigenvalue");
    cmd->add_option("--eig-b", o.eig_b, "two-eig: second eigenvalue");
    cmd->add_flag("--complex", o.as_complex, "treat the input/generated matrix as complex");
}

void add_solver_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--eps", o.eps, "residual-norm stopping tolerance")
        ->capture_default_str();
    cmd->add_option("--max-iter", o.max_iter, "iteration limit")->capture_default_str();
    cmd->add_option("--denom-tol", o.denom_tol,
                    "Gram determinant tolerance (default 1e-12 real, 1e-5 complex)");
    cmd->add_flag("--denom-rel", o.denom_rel,
                  "test the determinant relative to max(1, c00*c11) instead of absolutely");
    cmd->add_option("--trace", o.trace_path, "write the per-iteration trace here");
    cmd->add_option("--format", o.format, "trace format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

MatrixVariant promote_if_requested(MatrixVariant m, bool as_complex) {
    if (as_complex && std::holds_alternative<RealMatrix>(m)) {
        const RealMatrix& r = std::get<RealMatrix>(m);
        ComplexMatrix c(r.rows(), r.cols());
        for (std::size_t i = 0; i < r.data().size(); ++i) c.data()[i] = r.data()[i];
        return c;
    }
    return m;
}

std::pair<MatrixVariant, std::optional<std::uint64_t>> load_or_generate(const Options& o) {
    if (!o.input.empty() && !o.gen.empty()) {
        throw std::invalid_argument("give either --input or --gen, not both");
    }
    if (o.input.empty() && o.gen.empty()) {
        throw std::invalid_argument("one of --input or --gen is required");
    }
    if (!o.input.empty()) {
        return {promote_if_requested(read_matrix_market(o.input), o.as_complex),
                std::nullopt};
    }
    GeneratorSpec spec;
    spec.kind = parse_generator(o.gen);
    spec.n = o.n;
    spec.seed = o.seed;
    if (spec.kind == GenKind::two_eig) {
        if (std::isnan(o.eig_a) || std::isnan(o.eig_b)) {
            throw std::invalid_argument("two-eig requires --eig-a and --eig-b");
        }
        spec.eig_a = o.eig_a;
        spec.eig_b = o.eig_b;
    }
    if (spec.kind == GenKind::hilbert && spec.n > 12) {
        std::cerr << "warning: hilbert matrices above n=12 are numerically hopeless "
                     "in double precision\n";
    }
    return {promote_if_requested(generate_matrix(spec), o.as_complex), o.seed};
}

SolverConfig make_config(const Options& o) {
    SolverConfig cfg;
    cfg.epsilon = o.eps;
    cfg.max_iter = o.max_iter;
    cfg.denom_tol = o.denom_tol;
    cfg.denom_mode = o.denom_rel ? DenomMode::relative : DenomMode::absolute;
    cfg.record_trace = true;
    return cfg;
}

struct RunOutcome {
    std::string method;
    std::size_t n = 0;
    std::size_t iterations = 0;
    std::size_t matmuls = 0;
    double final_res = 0.0;
    bool converged = false;
    std::string reason;
    std::int64_t wall_ns = 0;
};

template <typename Scalar>
RunOutcome execute(const DenseMatrix<Scalar>& a, MethodKind method, const SolverConfig& cfg,
                   SolveReport<Scalar>* keep = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport<Scalar> rep = run(a, method, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    RunOutcome out;
    out.method = method_name(method);
    out.n = a.rows();
    out.iterations = rep.iterations;
    out.matmuls = rep.matmul_count;
    out.final_res = rep.final_res;
    out.converged = rep.converged;
    out.reason = rep.reason;
    out.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
    if (keep) *keep = std::move(rep);
    return out;
}

int do_gen(const Options& o) {
    if (o.output.empty()) throw std::invalid_argument("gen requires --output <path.mtx>");
    auto [m, seed] = load_or_generate(o);
    write_matrix_market(m, o.output);
    std::cout << "wrote " << generator_name(parse_generator(o.gen)) << " n=" << o.n
              << " seed=" << o.seed << " to " << o.output << "\n";
    return 0;
}

int do_run(const Options& o) {
    auto [m, seed] = load_or_generate(o);
    const MethodKind method = parse_method(o.method);
    const SolverConfig cfg = make_config(o);
    const TraceFormat fmt = parse_trace_format(o.format);

    RunOutcome out;
    std::visit(
        [&](const auto& a) {
            using Scalar = typename std::decay_t<decltype(a)>::scalar_type;
            SolveReport<Scalar> rep;
            out = execute(a, method, cfg, &rep);
            if (!o.trace_path.empty()) export_trace(rep, fmt, o.trace_path, seed);
            if (!o.output.empty()) write_matrix_market(rep.x, o.output);
        },
        m);

    std::cout << "method=" << out.method << " n=" << out.n << " iterations=" << out.iterations
              << " converged=" << (out.converged ? "true" : "false") << " reason=" << out.reason
              << " final_res=" << std::scientific << std::setprecision(3) << out.final_res
              << " matmuls=" << out.matmuls << " wall_ms=" << std::fixed
              << std::setprecision(3) << static_cast<double>(out.wall_ns) / 1e6 << "\n";
    return out.converged ? 0 : 2;
}

int do_compare(const Options& o) {
    std::vector<std::string> names;
    {
        std::string cur;
        for (char c : o.methods) {
            if (c == ',') {
                if (!cur.empty()) names.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) names.push_back(cur);
    }
    if (names.size() < 2) {
        throw std::invalid_argument("compare requires --methods with at least two entries");
    }
    std::vector<MethodKind> methods;
    for (const std::string& s : names) methods.push_back(parse_method(s));

    auto [m, seed] = load_or_generate(o);
    const SolverConfig cfg = make_config(o);

    // Independent solves; run them concurrently and report in request order.
    std::vector<std::future<RunOutcome>> futures;
    for (MethodKind method : methods) {
        futures.push_back(std::async(std::launch::async, [&m, method, &cfg]() {
            return std::visit([&](const auto& a) { return execute(a, method, cfg); }, m);
        }));
    }
    std::vector<RunOutcome> outcomes;
    for (auto& f : futures) outcomes.push_back(f.get());

    std::cout << std::left << std::setw(8) << "method" << std::right << std::setw(11)
              << "iterations" << std::setw(9) << "matmuls" << std::setw(14) << "final_res"
              << std::setw(11) << "converged" << std::setw(12) << "wall_ms" << "\n";
    bool all_converged = true;
    for (const RunOutcome& r : outcomes) {
        std::cout << std::left << std::setw(8) << r.method << std::right << std::setw(11)
                  << r.iterations << std::setw(9) << r.matmuls << std::scientific
                  << std::setprecision(3) << std::setw(14) << r.final_res << std::setw(11)
                  << (r.converged ? "yes" : "no") << std::fixed << std::setprecision(3)
                  << std::setw(12) << static_cast<double>(r.wall_ns) / 1e6 << "\n";
        all_converged = all_converged && r.converged;
    }

    if (!o.trace_path.empty()) {
        std::ofstream csv(o.trace_path);
        if (!csv) throw std::runtime_error(o.trace_path + ": cannot open for writing");
        csv << "method,n,iterations,matmuls,final_res,converged,wall_ns\n";
        for (const RunOutcome& r : outcomes) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", r.final_res);
            csv << r.method << "," << r.n << "," << r.iterations << "," << r.matmuls << ","
                << buf << "," << (r.converged ? 1 : 0) << "," << r.wall_ns << "\n";
        }
    }
    return all_converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dense matrix inversion by variable-coefficient Schultz-type iteration"};
    app.require_subcommand(1);

    Options gen_opts, run_opts, cmp_opts;

    CLI::App* gen = app.add_subcommand("gen", "generate a test matrix and write it");
    add_matrix_source_flags(gen, gen_opts);
    gen->add_option("--output", gen_opts.output, "Matrix Market output path")->required();

    CLI::App* runc = app.add_subcommand("run", "invert one matrix with one method");
    runc->add_option("--method", run_opts.method, "sshp2, hp2 or hp3")
        ->capture_default_str();
    add_matrix_source_flags(runc, run_opts);
    add_solver_flags(runc, run_opts);
    runc->add_option("--output", run_opts.output, "write the computed inverse here (.mtx)");

    CLI::App* cmp = app.add_subcommand("compare", "run several methods on the same matrix");
    cmp->add_option("--methods", cmp_opts.methods, "comma-separated method list")->required();
    add_matrix_source_flags(cmp, cmp_opts);
    add_solver_flags(cmp, cmp_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(gen)) return do_gen(gen_opts);
        if (app.got_subcommand(runc)) return do_run(run_opts);
        if (app.got_subcommand(cmp)) return do_compare(cmp_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
