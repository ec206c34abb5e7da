#include "hyperpower/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hyperpower {

namespace {

double off_diagonal_norm(const RealMatrix& b) {
    detail::kahan_sum<double> s;
    for (std::size_t i = 0; i < b.rows(); ++i) {
        for (std::size_t j = i + 1; j < b.cols(); ++j) s.add(2.0 * b(i, j) * b(i, j));
    }
    return std::sqrt(s.sum);
}

}  // namespace

std::vector<double> jacobi_eigenvalues(const RealMatrix& s, double tol) {
    if (!s.square()) throw std::invalid_argument("jacobi_eigenvalues: matrix must be square");
    if (!(tol > 0.0)) throw std::invalid_argument("jacobi_eigenvalues: tol must be positive");
    const std::size_t n = s.rows();
    const double norm = frob_norm(s);

    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = s(i, j) - s(j, i);
            asym += 2.0 * d * d;
        }
    }
    if (std::sqrt(asym) > 1e-10 * std::max(norm, 1e-300)) {
        throw std::invalid_argument("jacobi_eigenvalues: input is not symmetric");
    }

    RealMatrix b = s;
    // Symmetrize exactly so the rotation updates can mirror entries.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m = 0.5 * (b(i, j) + b(j, i));
            b(i, j) = b(j, i) = m;
        }
    }

    const double stop = tol * norm;
    const int max_sweeps = 100;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(b) <= stop) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = b(p, q);
                if (apq == 0.0) continue;
                const double theta = (b(q, q) - b(p, p)) / (2.0 * apq);
                const double t =
                    (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                const double tau = sn / (1.0 + c);
                b(p, p) -= t * apq;
                b(q, q) += t * apq;
                b(p, q) = b(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = b(i, p);
                    const double aiq = b(i, q);
                    b(i, p) = b(p, i) = aip - sn * (aiq + tau * aip);
                    b(i, q) = b(q, i) = aiq + sn * (aip - tau * aiq);
                }
            }
        }
    }
    if (sweep == max_sweeps && off_diagonal_norm(b) > stop) {
        throw std::runtime_error("jacobi_eigenvalues: sweep limit exceeded");
    }

    std::vector<double> lams(n);
    for (std::size_t i = 0; i < n; ++i) lams[i] = b(i, i);
    std::sort(lams.begin(), lams.end());
    return lams;
}

SpectrumDiag coeffs_from_spectrum(const std::vector<double>& lams) {
    if (lams.empty()) throw std::invalid_argument("coeffs_from_spectrum: empty spectrum");
    const std::size_t n = lams.size();
    detail::kahan_sum<double> a_sum, b_sum, d_sum, s1;
    for (std::size_t i = 0; i < n; ++i) {
        s1.add((1.0 - lams[i]) * (1.0 - lams[i]));
        for (std::size_t j = i + 1; j < n; ++j) {
            const double wi = 1.0 - lams[i];
            const double wj = 1.0 - lams[j];
            const double diff = lams[j] - lams[i];
            const double d2 = diff * diff;
            a_sum.add(wi * wj * (lams[i] + lams[j]) * d2);
            b_sum.add(wi * wj * d2);
            d_sum.add(wi * wi * wj * wj * d2);
        }
    }
    SpectrumDiag out;
    out.eigenvalues = lams;
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    const double d = d_sum.sum;
    if (d < 1e-12 * s1.sum * s1.sum) {
        out.alpha = 0.0;
        out.beta = 1.0;
        out.degenerate = true;
        return out;
    }
    out.alpha = -a_sum.sum / d;
    out.beta = b_sum.sum / d;
    out.degenerate = false;
    return out;
}

std::vector<SpectrumDiag> scalar_recurrence(const std::vector<double>& lams0,
                                            std::size_t steps) {
    std::vector<SpectrumDiag> out;
    out.reserve(steps);
    std::vector<double> cur = lams0;
    for (std::size_t k = 0; k < steps; ++k) {
        SpectrumDiag step = coeffs_from_spectrum(cur);
        const double c0 = 1.0 - (step.alpha + step.beta);
        for (double& l : cur) l = c0 + step.alpha * l + step.beta * l * l;
        std::sort(cur.begin(), cur.end());
        step.eigenvalues = cur;
        out.push_back(std::move(step));
    }
    return out;
}

namespace {

/// Running worst-case tracker for one named check. Feed the signed excess
/// (or absolute deviation) plus the tolerance it must stay within.
struct CheckAccum {
    InvariantCheck check;

    explicit CheckAccum(std::string name) { check.name = std::move(name); }

    void feed(double value, double tol, std::size_t k) {
        ++check.applied;
        const double ratio = value / std::max(tol, 1e-300);
        if (check.applied == 1 || ratio > check.ratio) {
            check.ratio = ratio;
            check.worst = value;
            check.tol = tol;
            check.worst_iteration = k;
        }
        if (value > tol) check.pass = false;
    }
};

double relative_gap(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace

InvariantReport check_invariants(const RealSolveReport& report, const RealMatrix& a,
                                 bool with_spectral) {
    if (report.trace.size() != report.iterations) {
        throw std::invalid_argument(
            "check_invariants: report must carry a full trace (record_trace=true)");
    }
    if (!a.square()) throw std::invalid_argument("check_invariants: matrix must be square");
    const std::size_t n = a.rows();
    const double nd = static_cast<double>(n);

    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = a(i, j) - a(j, i);
            asym += 2.0 * d * d;
        }
    }
    const bool symmetric = std::sqrt(asym) <= 1e-10 * std::max(frob_norm(a), 1e-300);
    const bool spectral = with_spectral && symmetric && report.method == MethodKind::sshp2;
    const double cond_estimate = frob_norm(a) * frob_norm(report.x);
    const double epsilon = report.config.epsilon;

    CheckAccum correctness("correctness");
    CheckAccum monotonicity("monotonicity");
    CheckAccum domination("schultz_domination");
    CheckAccum orthogonality("orthogonality");
    CheckAccum trace_identity("trace_identity");
    CheckAccum sum_to_n("sum_to_n");
    CheckAccum decrement("decrement_identity");
    CheckAccum coeff_sum("coefficient_sum");
    CheckAccum coeff_limits("coefficient_limits");
    CheckAccum residual_consistency("residual_consistency");
    CheckAccum agreement("complex_real_agreement");
    CheckAccum spectral_bounds("spectral_bounds");
    CheckAccum numerator_identity("numerator_identity");

    // Replay the run with the recorded coefficients; identical operations in
    // identical order reproduce the original trajectory bit for bit.
    RealMatrix x = initial_guess(a, report.config.init_scale);
    RealMatrix f = compute_residual(a, x);
    bool prev_fallback = true;

    for (std::size_t k = 0; k < report.iterations; ++k) {
        const IterationRecord& rec = report.trace[k];
        const double r = frob_norm(f);
        RealMatrix f2 = matmul(f, f);

        detail::kahan_sum<double> u2_sum;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double u = (i == j ? 1.0 : 0.0) - f(i, j);
                u2_sum.add(u * u);
            }
        }
        const double u2 = u2_sum.sum;  // ||I - F_k||_F^2

        if (symmetric && report.method == MethodKind::sshp2 && k >= 1 && !prev_fallback) {
            trace_identity.feed(std::abs(r * r - trace(f)), 1e-8 * nd, k);
            sum_to_n.feed(std::abs(r * r + u2 - nd), 1e-8 * nd, k);
            coeff_sum.feed(1.0 - (rec.alpha + rec.beta), 1e-8, k);
        }
        if (report.method == MethodKind::sshp2 && !rec.fallback && r <= 1e-3) {
            coeff_limits.feed(std::max(std::abs(rec.alpha), std::abs(rec.beta - 1.0)), 0.01, k);
        }

        std::vector<double> lams;
        if (spectral) {
            lams = jacobi_eigenvalues(f);
            double rr = 0.0;
            for (double l : lams) rr = std::max(rr, std::abs(l));
            if (rr < 1.0) {
                const double om = 1.0 - rr;
                spectral_bounds.feed(std::abs(rec.alpha) - 2.0 * rr / (om * om), 1e-8, k);
                spectral_bounds.feed(1.0 / ((1.0 + rr) * (1.0 + rr)) - rec.beta, 1e-8, k);
                spectral_bounds.feed(rec.beta - 1.0 / (om * om), 1e-8, k);
            }
            if (k >= 1 && !prev_fallback) {
                detail::kahan_sum<double> a_sum, b_sum, d_sum, t_sum;
                for (double l : lams) t_sum.add(l * l - l * l * l);
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = i + 1; j < n; ++j) {
                        const double wi = 1.0 - lams[i];
                        const double wj = 1.0 - lams[j];
                        const double d2 = (lams[j] - lams[i]) * (lams[j] - lams[i]);
                        a_sum.add(wi * wj * (lams[i] + lams[j]) * d2);
                        b_sum.add(wi * wj * d2);
                        d_sum.add(wi * wi * wj * wj * d2);
                    }
                }
                const double ak = -a_sum.sum;  // sign-normalized so alpha = A_k / D_k
                const double t = t_sum.sum;
                numerator_identity.feed(std::abs(ak + b_sum.sum - d_sum.sum - t * t),
                                        1e-7 * std::max(1.0, d_sum.sum), k);
            }
        }

        if (cond_estimate <= 1e6) {
            RealMatrix fresh = compute_residual(a, x);
            detail::kahan_sum<double> diff;
            for (std::size_t i = 0; i < n * n; ++i) {
                const double d = fresh.data()[i] - f.data()[i];
                diff.add(d * d);
            }
            residual_consistency.feed(std::sqrt(diff.sum),
                                      1e-8 * std::max(1.0, frob_norm(a) * frob_norm(x)), k);
        }

        RealMatrix x_next(n, n), f_next(n, n);
        switch (report.method) {
            case MethodKind::sshp2: {
                auto [xn, fn] = sshp2_step(x, f, f2, rec.alpha, rec.beta);
                x_next = std::move(xn);
                f_next = std::move(fn);
                break;
            }
            case MethodKind::hp2: {
                auto [xn, fn] = hp2_step(x, f);
                x_next = std::move(xn);
                f_next = std::move(fn);
                break;
            }
            case MethodKind::hp3: {
                auto [xn, fn] = hp3_step(x, f, f2);
                x_next = std::move(xn);
                f_next = std::move(fn);
                break;
            }
        }
        const double r_next = frob_norm(f_next);

        if (report.method == MethodKind::sshp2 && !rec.fallback) {
            monotonicity.feed(r_next - r, 1e-9 * std::max(1.0, r), k);
            domination.feed(r_next - frob_norm(f2), 1e-9 * nd, k);
            if (symmetric) {
                detail::kahan_sum<double> t1, t2;
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        const double delta = (i == j ? 1.0 : 0.0);
                        t1.add(f_next(i, j) * (delta - f(j, i)));
                        t2.add(f_next(i, j) * (delta - f2(j, i)));
                    }
                }
                orthogonality.feed(std::abs(t1.sum), 1e-8 * nd, k);
                orthogonality.feed(std::abs(t2.sum), 1e-8 * nd, k);
            }
            if (symmetric && k >= 1 && !prev_fallback) {
                decrement.feed(
                    std::abs(r * r - r_next * r_next - (rec.alpha + rec.beta - 1.0) * u2),
                    1e-7 * nd, k);
            }
        }

        x = std::move(x_next);
        f = std::move(f_next);
        prev_fallback = rec.fallback;
    }

    if (report.converged) {
        correctness.feed(frob_norm(compute_residual(a, report.x)), epsilon, report.iterations);
    }

    // The complex engine on the (real) input must retrace the real engine.
    // Pin the effective denominator tolerance so the complex path does not
    // swap in its own 1e-5 default.
    {
        SolverConfig cfg = report.config;
        cfg.denom_tol = (cfg.denom_tol > 0.0) ? cfg.denom_tol : 1e-12;
        ComplexMatrix ac(n, n);
        for (std::size_t i = 0; i < n * n; ++i) ac.data()[i] = a.data()[i];
        const ComplexSolveReport crep = run(ac, report.method, cfg);
        if (crep.iterations != report.iterations || crep.converged != report.converged) {
            agreement.feed(1.0, 1e-12, 0);
        } else {
            for (std::size_t k = 0; k < report.iterations; ++k) {
                const IterationRecord& rr = report.trace[k];
                const IterationRecord& cc = crep.trace[k];
                double gap = std::max(relative_gap(cc.res_norm, rr.res_norm),
                                      std::max(std::abs(cc.alpha - rr.alpha) /
                                                   std::max(std::abs(rr.alpha), 1.0),
                                               std::abs(cc.beta - rr.beta) /
                                                   std::max(std::abs(rr.beta), 1.0)));
                if (cc.fallback != rr.fallback) gap = std::max(gap, 1.0);
                agreement.feed(gap, 1e-12, k);
            }
        }
    }

    InvariantReport out;
    out.checks = {correctness.check,     monotonicity.check, domination.check,
                  orthogonality.check,   trace_identity.check, sum_to_n.check,
                  decrement.check,       coeff_sum.check,    coeff_limits.check,
                  residual_consistency.check, agreement.check};
    if (spectral) {
        out.checks.push_back(spectral_bounds.check);
        out.checks.push_back(numerator_identity.check);
    }
    return out;
}

}  // namespace hyperpower
