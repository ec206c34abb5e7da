#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hyperpower/dense.hpp"

namespace hyperpower {

using MatrixVariant = std::variant<RealMatrix, ComplexMatrix>;

enum class GenKind { spd, diag_dominant, hilbert, two_eig, random_complex, symmetric };

const char* generator_name(GenKind kind);
GenKind parse_generator(const std::string& name);

/// Deterministic generator request. Identical (kind, n, seed, eig_a, eig_b)
/// produce bit-identical matrices: entries are drawn from std::mt19937_64
/// seeded with `seed`, mapped to doubles as (x >> 11) * 2^-53 (uniform in
/// [0,1)) and then affinely to [-1,1), filled in row-major order (re before
/// im for complex entries). This mapping is fixed by hand because the
/// standard library's distribution objects are implementation-defined.
struct GeneratorSpec {
    GenKind kind = GenKind::spd;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double eig_a = 0.0;  ///< two-eig only: first eigenvalue
    double eig_b = 0.0;  ///< two-eig only: second eigenvalue
};

/// Construct the requested test matrix:
///   spd:            B^T B + n I, B uniform in [-1,1)
///   diag-dominant:  uniform entries, diagonal overwritten with row abs-sum + 1
///   hilbert:        H_ij = 1/(i+j-1) (1-based); ill-conditioned by design
///   two-eig:        Q diag(a,...,a,b,...,b) Q^T, Q from Gram-Schmidt on a
///                   random matrix; a gets the first ceil(n/2) slots
///   random-complex: re, im uniform in [-1,1) plus an n*I diagonal shift
///   symmetric:      (B + B^T)/2 + n I
MatrixVariant generate_matrix(const GeneratorSpec& spec);

/// Q diag(lams) Q^T for a seeded random orthogonal Q; the workhorse behind
/// two-eig, exposed so oracle tests can build symmetric matrices with a
/// prescribed spectrum.
RealMatrix symmetric_from_spectrum(const std::vector<double>& lams, std::uint64_t seed);

}  // namespace hyperpower
