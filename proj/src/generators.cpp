#include "hyperpower/generators.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hyperpower {

const char* generator_name(GenKind kind) {
    switch (kind) {
        case GenKind::spd: return "spd";
        case GenKind::diag_dominant: return "diag-dominant";
        case GenKind::hilbert: return "hilbert";
        case GenKind::two_eig: return "two-eig";
        case GenKind::random_complex: return "random-complex";
        case GenKind::symmetric: return "symmetric";
    }
    return "unknown";
}

GenKind parse_generator(const std::string& name) {
    if (name == "spd") return GenKind::spd;
    if (name == "diag-dominant") return GenKind::diag_dominant;
    if (name == "hilbert") return GenKind::hilbert;
    if (name == "two-eig") return GenKind::two_eig;
    if (name == "random-complex") return GenKind::random_complex;
    if (name == "symmetric") return GenKind::symmetric;
    throw std::invalid_argument("unknown generator '" + name +
                                "' (expected spd, diag-dominant, hilbert, two-eig, "
                                "random-complex or symmetric)");
}

namespace {

/// The documented uniform stream: mt19937_64 words mapped to [-1,1) by hand.
class UniformStream {
 public:
    explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double symmetric() { return 2.0 * unit() - 1.0; }

 private:
    std::mt19937_64 engine_;
};

RealMatrix random_square(UniformStream& rng, std::size_t n) {
    RealMatrix b(n, n);
    for (double& v : b.data()) v = rng.symmetric();
    return b;
}

/// Modified Gram-Schmidt on the columns of a random matrix; near-dependent
/// columns (never seen in practice) are redrawn from the same stream.
RealMatrix random_orthogonal(UniformStream& rng, std::size_t n) {
    RealMatrix q = random_square(rng, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (int attempt = 0;; ++attempt) {
            for (std::size_t i = 0; i < j; ++i) {
                detail::kahan_sum<double> dot;
                for (std::size_t r = 0; r < n; ++r) dot.add(q(r, i) * q(r, j));
                for (std::size_t r = 0; r < n; ++r) q(r, j) -= dot.sum * q(r, i);
            }
            detail::kahan_sum<double> nrm2;
            for (std::size_t r = 0; r < n; ++r) nrm2.add(q(r, j) * q(r, j));
            const double nrm = std::sqrt(nrm2.sum);
            if (nrm > 1e-8) {
                for (std::size_t r = 0; r < n; ++r) q(r, j) /= nrm;
                break;
            }
            if (attempt > 32) {
                throw std::runtime_error("random_orthogonal: could not complete a basis");
            }
            for (std::size_t r = 0; r < n; ++r) q(r, j) = rng.symmetric();
        }
    }
    return q;
}

}  // namespace

RealMatrix symmetric_from_spectrum(const std::vector<double>& lams, std::uint64_t seed) {
    const std::size_t n = lams.size();
    if (n == 0) throw std::invalid_argument("symmetric_from_spectrum: empty spectrum");
    UniformStream rng(seed);
    RealMatrix q = random_orthogonal(rng, n);
    // (Q D) Q^T with D diagonal: scale the columns of Q, then multiply.
    RealMatrix qd = q;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) qd(i, j) *= lams[j];
    }
    return matmul(qd, adjoint(q));
}

MatrixVariant generate_matrix(const GeneratorSpec& spec) {
    const std::size_t n = spec.n;
    if (n == 0) throw std::invalid_argument("generate_matrix: n must be at least 1");
    UniformStream rng(spec.seed);

    switch (spec.kind) {
        case GenKind::spd: {
            RealMatrix b = random_square(rng, n);
            RealMatrix a = matmul(adjoint(b), b);
            for (std::size_t i = 0; i < n; ++i) a(i, i) += static_cast<double>(n);
            return a;
        }
        case GenKind::diag_dominant: {
            RealMatrix a = random_square(rng, n);
            for (std::size_t i = 0; i < n; ++i) {
                detail::kahan_sum<double> row;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j != i) row.add(std::abs(a(i, j)));
                }
                a(i, i) = row.sum + 1.0;
            }
            return a;
        }
        case GenKind::hilbert: {
            RealMatrix a(n, n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    a(i, j) = 1.0 / static_cast<double>(i + j + 1);
                }
            }
            return a;
        }
        case GenKind::two_eig: {
            if (spec.eig_a == spec.eig_b) {
                throw std::invalid_argument("generate_matrix: two-eig requires eig_a != eig_b");
            }
            std::vector<double> lams(n, spec.eig_b);
            const std::size_t half = (n + 1) / 2;
            for (std::size_t i = 0; i < half; ++i) lams[i] = spec.eig_a;
            return symmetric_from_spectrum(lams, spec.seed);
        }
        case GenKind::random_complex: {
            ComplexMatrix a(n, n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    const double re = rng.symmetric();
                    const double im = rng.symmetric();
                    a(i, j) = {re, im};
                }
            }
            for (std::size_t i = 0; i < n; ++i) a(i, i) += static_cast<double>(n);
            return a;
        }
        case GenKind::symmetric: {
            RealMatrix b = random_square(rng, n);
            RealMatrix a(n, n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (b(i, j) + b(j, i));
            }
            for (std::size_t i = 0; i < n; ++i) a(i, i) += static_cast<double>(n);
            return a;
        }
    }
    throw std::invalid_argument("generate_matrix: unknown generator kind");
}

}  // namespace hyperpower
