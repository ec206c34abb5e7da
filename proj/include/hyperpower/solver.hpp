#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hyperpower/coeff.hpp"
#include "hyperpower/dense.hpp"

namespace hyperpower {

enum class MethodKind { hp2, hp3, sshp2 };

inline const char* method_name(MethodKind m) {
    switch (m) {
        case MethodKind::hp2: return "hp2";
        case MethodKind::hp3: return "hp3";
        case MethodKind::sshp2: return "sshp2";
    }
    return "unknown";
}

inline MethodKind parse_method(const std::string& name) {
    if (name == "hp2") return MethodKind::hp2;
    if (name == "hp3") return MethodKind::hp3;
    if (name == "sshp2") return MethodKind::sshp2;
    throw std::invalid_argument("unknown method '" + name + "' (expected sshp2, hp2 or hp3)");
}

struct SolverConfig {
    double epsilon = 1e-10;       ///< stop when ||F_k||_F < epsilon
    std::size_t max_iter = 1000;
    double denom_tol = 0.0;       ///< 0 selects the per-path default: 1e-12 real, 1e-5 complex
    DenomMode denom_mode = DenomMode::absolute;
    bool record_trace = true;
    double init_scale = 0.0;      ///< 0 selects X0 = A*/(2||A||_F^2); else X0 = init_scale * A*
    bool recompute_residual = false;  ///< debug: rebuild F as I - A*X_k every iteration
};

/// One row of the per-iteration trace. res_norm is ||F_k||_F *before* the
/// step; alpha/beta are the coefficients the step then applied (fixed (0,1)
/// for hp2; recorded as (0,0) for hp3, which has no two-term form).
struct IterationRecord {
    std::size_t k = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double res_norm = 0.0;
    bool fallback = false;
    std::int64_t wall_ns = 0;
};

template <typename Scalar>
struct SolveReport {
    MethodKind method = MethodKind::sshp2;
    DenseMatrix<Scalar> x;        ///< approximate inverse
    double final_res = 0.0;       ///< ||F||_F at termination
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<IterationRecord> trace;
    std::size_t matmul_count = 0;
    std::string reason;           ///< "converged", "max_iter" or "stagnated"
    SolverConfig config;          ///< the configuration the run used
};

using RealSolveReport = SolveReport<double>;
using ComplexSolveReport = SolveReport<std::complex<double>>;

/// X0 = A*/(2*||A||_F^2), which places the eigenvalues of A*X0 in (0, 1/2]
/// so that the spectral radius of F0 stays below 1. A nonzero init_scale
/// overrides the constant: X0 = init_scale * A*.
template <typename Scalar>
DenseMatrix<Scalar> initial_guess(const DenseMatrix<Scalar>& a, double init_scale = 0.0) {
    if (!a.square()) {
        throw std::invalid_argument("initial_guess: matrix must be square");
    }
    const double nrm = frob_norm(a);
    if (nrm == 0.0) {
        throw std::invalid_argument("initial_guess: zero matrix is not invertible");
    }
    const double scale = (init_scale != 0.0) ? init_scale : 1.0 / (2.0 * nrm * nrm);
    DenseMatrix<Scalar> x = adjoint(a);
    for (Scalar& v : x.data()) v *= scale;
    return x;
}

/// F = I - A*X (one matrix multiplication).
template <typename Scalar>
DenseMatrix<Scalar> compute_residual(const DenseMatrix<Scalar>& a,
                                     const DenseMatrix<Scalar>& x) {
    if (!a.square() || a.rows() != x.rows() || a.cols() != x.cols()) {
        throw std::invalid_argument("compute_residual: shape mismatch");
    }
    DenseMatrix<Scalar> f = matmul(a, x);
    for (Scalar& v : f.data()) v = -v;
    for (std::size_t i = 0; i < f.rows(); ++i) f(i, i) += Scalar{1};
    return f;
}

/// One SSHP2 update: x_next = x*((alpha+beta)I + beta*F) (one matmul) and
/// f_next = (1-(alpha+beta))I + alpha*F + beta*F^2 (no matmul; the residual
/// is propagated by the recurrence, not recomputed from A).
template <typename Scalar>
std::pair<DenseMatrix<Scalar>, DenseMatrix<Scalar>> sshp2_step(
    const DenseMatrix<Scalar>& x, const DenseMatrix<Scalar>& f,
    const DenseMatrix<Scalar>& f2, double alpha, double beta) {
    if (!std::isfinite(alpha) || !std::isfinite(beta)) {
        throw std::invalid_argument("sshp2_step: non-finite coefficients");
    }
    DenseMatrix<Scalar> x_next = matmul(x, affine_combine(alpha + beta, beta, 0.0, f, f2));
    DenseMatrix<Scalar> f_next = affine_combine(1.0 - (alpha + beta), alpha, beta, f, f2);
    return {std::move(x_next), std::move(f_next)};
}

/// One Schultz (HP2) update: x_next = x*(I + F), f_next = F^2. Two matmuls.
template <typename Scalar>
std::pair<DenseMatrix<Scalar>, DenseMatrix<Scalar>> hp2_step(const DenseMatrix<Scalar>& x,
                                                             const DenseMatrix<Scalar>& f) {
    DenseMatrix<Scalar> x_next = matmul(x, affine_combine(1.0, 1.0, 0.0, f, f));
    DenseMatrix<Scalar> f_next = matmul(f, f);
    return {std::move(x_next), std::move(f_next)};
}

/// One third-order hyper-power (HP3) update: x_next = x*(I + F + F^2),
/// f_next = F*F^2 = F^3. Two matmuls here plus the caller's F^2.
template <typename Scalar>
std::pair<DenseMatrix<Scalar>, DenseMatrix<Scalar>> hp3_step(const DenseMatrix<Scalar>& x,
                                                             const DenseMatrix<Scalar>& f,
                                                             const DenseMatrix<Scalar>& f2) {
    DenseMatrix<Scalar> x_next = matmul(x, affine_combine(1.0, 1.0, 1.0, f, f2));
    DenseMatrix<Scalar> f_next = matmul(f, f2);
    return {std::move(x_next), std::move(f_next)};
}

/// Full iteration driver. Counts every matrix multiplication actually
/// performed: 1 for the initial residual plus 2 (sshp2, hp2) or 3 (hp3) per
/// iteration. Terminates on ||F|| < epsilon, max_iter, or the stagnation
/// guard (no 0.999-factor improvement across 25 consecutive iterations,
/// which catches the idempotent-limit plateau); a non-finite residual throws.
template <typename Scalar>
SolveReport<Scalar> run(const DenseMatrix<Scalar>& a, MethodKind method,
                        const SolverConfig& cfg = {}) {
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("run: epsilon must be positive");
    if (cfg.max_iter < 1) throw std::invalid_argument("run: max_iter must be at least 1");
    const double denom_tol =
        (cfg.denom_tol > 0.0) ? cfg.denom_tol : (is_complex_v<Scalar> ? 1e-5 : 1e-12);

    SolveReport<Scalar> report;
    report.method = method;
    report.config = cfg;

    DenseMatrix<Scalar> x = initial_guess(a, cfg.init_scale);
    DenseMatrix<Scalar> f = compute_residual(a, x);
    report.matmul_count = 1;

    double best = std::numeric_limits<double>::infinity();
    std::size_t since_improve = 0;
    double res = frob_norm(f);

    while (true) {
        if (!std::isfinite(res)) {
            throw std::runtime_error("diverged: non-finite residual at iteration " +
                                     std::to_string(report.iterations));
        }
        if (res < cfg.epsilon) {
            report.converged = true;
            report.reason = "converged";
            break;
        }
        if (report.iterations >= cfg.max_iter) {
            report.reason = "max_iter";
            break;
        }
        if (res < 0.999 * best) {
            best = res;
            since_improve = 0;
        } else if (++since_improve >= 25) {
            report.reason = "stagnated";
            break;
        }

        const auto t0 = std::chrono::steady_clock::now();
        IterationRecord rec;
        rec.k = report.iterations;
        rec.res_norm = res;

        switch (method) {
            case MethodKind::sshp2: {
                DenseMatrix<Scalar> f2 = matmul(f, f);
                ++report.matmul_count;
                const GramSystem g = build_gram(f, f2);
                const CoefficientResult c = solve_coefficients(g, denom_tol, cfg.denom_mode);
                rec.alpha = c.alpha;
                rec.beta = c.beta;
                rec.fallback = c.fallback;
                auto [xn, fn] = sshp2_step(x, f, f2, c.alpha, c.beta);
                ++report.matmul_count;
                x = std::move(xn);
                f = std::move(fn);
                break;
            }
            case MethodKind::hp2: {
                rec.alpha = 0.0;
                rec.beta = 1.0;
                auto [xn, fn] = hp2_step(x, f);
                report.matmul_count += 2;
                x = std::move(xn);
                f = std::move(fn);
                break;
            }
            case MethodKind::hp3: {
                DenseMatrix<Scalar> f2 = matmul(f, f);
                auto [xn, fn] = hp3_step(x, f, f2);
                report.matmul_count += 3;
                x = std::move(xn);
                f = std::move(fn);
                break;
            }
        }
        if (cfg.recompute_residual) {
            f = compute_residual(a, x);
            ++report.matmul_count;
        }

        rec.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        if (cfg.record_trace) report.trace.push_back(rec);
        ++report.iterations;
        res = frob_norm(f);
    }

    report.x = std::move(x);
    report.final_res = res;
    return report;
}

}  // namespace hyperpower
