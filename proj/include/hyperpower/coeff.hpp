#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "hyperpower/dense.hpp"

namespace hyperpower {

/// How the Gram determinant is tested against denom_tol.
/// `absolute` is the published algorithm's check; `relative` scales the
/// tolerance by max(1, c00*c11), which keeps the gate meaningful when all
/// Gram entries approach n near convergence.
enum class DenomMode { absolute, relative };

/// The 2x2 normal-equation system for the optimal step coefficients.
/// For complex residuals the published K-coefficients carry a factor 2 on
/// both sides of the system; it cancels in the solve and is not stored, so
/// one struct serves both scalar types.
struct GramSystem {
    double c00 = 0.0;  ///< ||I - F||_F^2
    double c01 = 0.0;  ///< Re<I - F, I - F^2>
    double c11 = 0.0;  ///< ||I - F^2||_F^2
    double b1 = 0.0;   ///< n - Re tr(F)
    double b2 = 0.0;   ///< n - Re tr(F^2)
    double det = 0.0;  ///< c00*c11 - c01^2 (>= 0 up to rounding, Cauchy-Schwarz)
    std::size_t dim = 0;
};

/// Solved step coefficients; fallback=true means the degenerate branch
/// (alpha, beta) = (0, 1) — a plain Schultz step — was taken.
struct CoefficientResult {
    double alpha = 0.0;
    double beta = 1.0;
    bool fallback = true;
    double det = 0.0;
};

namespace detail {

/// a*b - c*d to ~1.5 ulp via fma (Kahan). The naive expression loses all
/// significant digits when a*b and c*d agree to many digits, which is
/// exactly the situation for the Gram determinant near convergence.
inline double diff_of_products(double a, double b, double c, double d) {
    const double w = c * d;
    const double e = std::fma(c, d, -w);
    const double f = std::fma(a, b, -w);
    return f - e;
}

}  // namespace detail

/// Build the Gram system from a residual F and its square F2 = F*F.
/// All five entries are accumulated with compensated sums; the determinant
/// uses the fma product difference. Tiny negative determinants (inside
/// -1e-9*max(1, c00*c11), pure rounding) are clamped to zero so the solve's
/// degeneracy test sees them as singular.
template <typename Scalar>
GramSystem build_gram(const DenseMatrix<Scalar>& f, const DenseMatrix<Scalar>& f2) {
    if (!f.square()) {
        throw std::invalid_argument("build_gram: residual must be square");
    }
    if (f.rows() != f2.rows() || f.cols() != f2.cols()) {
        throw std::invalid_argument("build_gram: F and F^2 shapes differ");
    }
    const std::size_t n = f.rows();
    detail::kahan_sum<double> c00, c01, c11, b1, b2;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Scalar delta = (i == j) ? Scalar{1} : Scalar{0};
            const Scalar u = delta - f(i, j);
            const Scalar v = delta - f2(i, j);
            c00.add(detail::abs_sq(u));
            c11.add(detail::abs_sq(v));
            if constexpr (is_complex_v<Scalar>) {
                c01.add((std::conj(u) * v).real());
            } else {
                c01.add(u * v);
            }
        }
        if constexpr (is_complex_v<Scalar>) {
            b1.add(1.0 - f(i, i).real());
            b2.add(1.0 - f2(i, i).real());
        } else {
            b1.add(1.0 - f(i, i));
            b2.add(1.0 - f2(i, i));
        }
    }
    GramSystem g;
    g.c00 = c00.sum;
    g.c01 = c01.sum;
    g.c11 = c11.sum;
    g.b1 = b1.sum;
    g.b2 = b2.sum;
    g.dim = n;
    g.det = detail::diff_of_products(g.c00, g.c11, g.c01, g.c01);
    if (g.det < 0.0) {
        const double slop = 1e-9 * std::max(1.0, g.c00 * g.c11);
        if (g.det < -slop) {
            throw std::runtime_error("build_gram: Gram determinant negative beyond rounding slop");
        }
        g.det = 0.0;
    }
    return g;
}

/// Cramer's rule on the Gram system with the degenerate-branch fallback.
/// Non-degenerate: alpha = (c11*b1 - c01*b2)/det, beta = (c00*b2 - c01*b1)/det,
/// numerators evaluated with the fma product difference. Degenerate
/// (|det| below the tolerance in the selected mode): (0, 1), one Schultz step.
inline CoefficientResult solve_coefficients(const GramSystem& g, double denom_tol,
                                            DenomMode mode = DenomMode::absolute) {
    if (!(denom_tol > 0.0)) {
        throw std::invalid_argument("solve_coefficients: denom_tol must be positive");
    }
    if (!std::isfinite(g.c00) || !std::isfinite(g.c01) || !std::isfinite(g.c11) ||
        !std::isfinite(g.b1) || !std::isfinite(g.b2) || !std::isfinite(g.det)) {
        throw std::invalid_argument("solve_coefficients: non-finite Gram entry");
    }
    const double threshold = (mode == DenomMode::relative)
                                 ? denom_tol * std::max(1.0, g.c00 * g.c11)
                                 : denom_tol;
    CoefficientResult r;
    r.det = g.det;
    if (std::abs(g.det) >= threshold) {
        r.alpha = detail::diff_of_products(g.c11, g.b1, g.c01, g.b2) / g.det;
        r.beta = detail::diff_of_products(g.c00, g.b2, g.c01, g.b1) / g.det;
        r.fallback = false;
    } else {
        r.alpha = 0.0;
        r.beta = 1.0;
        r.fallback = true;
    }
    return r;
}

}  // namespace hyperpower
